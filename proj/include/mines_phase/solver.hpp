#pragma once

// The linear-time play: reveal the top-left corner, flood the zeros, split the
// rest into islands and run exact inference on every island that fits a
// 100x100 box. A guessing variant picks a uniform two_way cell when stuck.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "mines_phase/grid.hpp"
#include "mines_phase/inference.hpp"
#include "mines_phase/rng.hpp"

namespace mines_phase {

enum class Verdict : std::uint8_t { solved, hit_mine, gave_up_oversized, gave_up_ambiguous };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::solved: return "Solved";
    case Verdict::hit_mine: return "HitMine";
    case Verdict::gave_up_oversized: return "GaveUpOversized";
    case Verdict::gave_up_ambiguous: return "GaveUpAmbiguous";
  }
  return "?";
}

inline std::ostream& operator<<(std::ostream& os, Verdict v) { return os << to_string(v); }

struct BoundingBox {
  int top = 0;
  int left = 0;
  int rows = 0;
  int cols = 0;
};

/// 8-connected component of cells that are not Clue(0).
struct Island {
  std::vector<Cell> cells;
  BoundingBox box;
  /// Ground-truth mines inside; -1 when no assignment was supplied.
  int mines_inside = -1;
  /// Hidden cells touching a clue.
  std::vector<Cell> frontier;
};

struct IslandSummary {
  Cell top_left;
  BoundingBox box;
  std::size_t cell_count = 0;
  int mines_inside = -1;
  Verdict verdict = Verdict::solved;
};

struct PlayOutcome {
  Verdict verdict = Verdict::solved;
  std::size_t reveals = 0;
  std::vector<IslandSummary> islands;
  std::size_t guess_count = 0;
  /// Flood worklist pops plus one scan of the board for island labeling.
  std::size_t cell_touches = 0;
  /// Island labeling, local copies and completion search nodes.
  std::size_t island_work = 0;
};

struct PlayOptions {
  int box_limit = 100;
  std::uint64_t node_budget = 10'000'000;
  /// Receives "REVEAL r c -> v", "GUESS r c" and a final "VERDICT v".
  std::ostream* trace = nullptr;
  /// Solve islands in a shuffled order (deterministic mode only).
  std::optional<Seed> island_order_seed;
  /// Receives the final grid state.
  GridState* final_state = nullptr;
};

/// The state after revealing (0,0) and flooding its zeros. A mined corner
/// shows as a shown mine with everything else hidden.
inline GridState initial_state(const MineAssignment& m) {
  GridState s(m.dims());
  if (m.is_mine({0, 0}))
    s.set({0, 0}, CellValue::shown_mine());
  else
    flood_reveal_in_place(m, s, {0, 0});
  return s;
}

/// Islands of `s`, sorted by their first cell in row-major order.
inline std::vector<Island> decompose_islands(const GridState& s, const MineAssignment* truth = nullptr,
                                             std::size_t* work = nullptr) {
  const GridDims dims = s.dims();
  const std::size_t n = dims.size();
  const int rows = dims.rows, cols = dims.cols;
  const CellValue zero = CellValue::clue(0);
  constexpr std::uint32_t kUnlabeled = 0xFFFFFFFFu;

  // Pass 1: label components with an explicit stack.
  std::vector<std::uint32_t> label(n, kUnlabeled);
  std::vector<BoundingBox> boxes;
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> stack;
  std::size_t touched = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnlabeled || s.at_index(i) == zero) continue;
    const auto id = static_cast<std::uint32_t>(boxes.size());
    int r0 = rows, r1 = -1, c0 = cols, c1 = -1;
    std::size_t size = 0;
    label[i] = id;
    stack.push_back(i);
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      ++size;
      const int r = static_cast<int>(k / static_cast<std::size_t>(cols));
      const int c = static_cast<int>(k % static_cast<std::size_t>(cols));
      r0 = std::min(r0, r);
      r1 = std::max(r1, r);
      c0 = std::min(c0, c);
      c1 = std::max(c1, c);
      for (int rr = std::max(r - 1, 0); rr <= std::min(r + 1, rows - 1); ++rr)
        for (int cc = std::max(c - 1, 0); cc <= std::min(c + 1, cols - 1); ++cc) {
          ++touched;
          const std::size_t j = static_cast<std::size_t>(rr) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(cc);
          if (label[j] != kUnlabeled || s.at_index(j) == zero) continue;
          label[j] = id;
          stack.push_back(j);
        }
    }
    boxes.push_back({r0, c0, r1 - r0 + 1, c1 - c0 + 1});
    sizes.push_back(size);
  }

  // Pass 2: collect cells in row-major order, so each island's list is sorted
  // and islands are ordered by their first cell.
  std::vector<Island> out(boxes.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].box = boxes[k];
    out[k].cells.reserve(sizes[k]);
    out[k].mines_inside = truth ? 0 : -1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] == kUnlabeled) continue;
    Island& island = out[label[i]];
    const Cell c = dims.cell(i);
    island.cells.push_back(c);
    if (truth && truth->is_mine_index(i)) ++island.mines_inside;
    if (!s.at_index(i).is_hidden()) continue;
    bool touches_clue = false;
    for (int rr = std::max(c.row - 1, 0); rr <= std::min(c.row + 1, rows - 1) && !touches_clue; ++rr)
      for (int cc = std::max(c.col - 1, 0); cc <= std::min(c.col + 1, cols - 1); ++cc)
        if (s.at_index(static_cast<std::size_t>(rr) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(cc)).is_clue()) {
          touches_clue = true;
          break;
        }
    if (touches_clue) island.frontier.push_back(c);
  }
  if (work) *work += touched + n;
  return out;
}

/// Mines of an island joined when within distance 3.
struct AdjacencyGraph {
  std::vector<Cell> vertices;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  bool is_connected() const {
    if (vertices.size() <= 1) return true;
    std::vector<std::vector<std::size_t>> adj(vertices.size());
    for (auto [a, b] : edges) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    std::vector<std::uint8_t> seen(vertices.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t u : adj[v])
        if (!seen[u]) {
          seen[u] = 1;
          ++reached;
          stack.push_back(u);
        }
    }
    return reached == vertices.size();
  }
};

inline AdjacencyGraph island_adjacency_graph(const Island& island, const MineAssignment& m) {
  AdjacencyGraph g;
  for (Cell c : island.cells)
    if (m.is_mine(c)) g.vertices.push_back(c);
  for (std::size_t a = 0; a < g.vertices.size(); ++a)
    for (std::size_t b = a + 1; b < g.vertices.size(); ++b)
      if (grid_distance(g.vertices[a], g.vertices[b]) <= 3) g.edges.emplace_back(a, b);
  return g;
}

namespace detail {

class Player {
public:
  Player(const MineAssignment& m, const PlayOptions& opts, Rng* rng)
      : m_(m), opts_(opts), rng_(rng), s_(m.dims()) {}

  PlayOutcome run() {
    const Cell corner{0, 0};
    if (m_.is_mine(corner)) {
      s_.set(corner, CellValue::shown_mine());
      ++outcome_.reveals;
      trace_reveal(corner, s_.at(corner));
      return finish(Verdict::hit_mine);
    }
    flood(corner);
    outcome_.cell_touches += m_.dims().size();
    std::vector<Island> islands = decompose_islands(s_, &m_, &outcome_.island_work);

    std::vector<std::size_t> order(islands.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (opts_.island_order_seed && !rng_) {
      Rng shuffle(*opts_.island_order_seed);
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.uniform_below(i)]);
    }

    outcome_.islands.resize(islands.size());
    bool hit = false, oversized = false, ambiguous = false;
    for (std::size_t k : order) {
      const Island& island = islands[k];
      IslandSummary& summary = outcome_.islands[k];
      summary = {island.cells.front(), island.box, island.cells.size(), island.mines_inside, Verdict::solved};
      if (island.box.rows > opts_.box_limit || island.box.cols > opts_.box_limit)
        summary.verdict = Verdict::gave_up_oversized;
      else
        summary.verdict = solve_island(island);
      hit |= summary.verdict == Verdict::hit_mine;
      oversized |= summary.verdict == Verdict::gave_up_oversized;
      ambiguous |= summary.verdict == Verdict::gave_up_ambiguous;
      // A guessing player that hits a mine has lost the game.
      if (hit) break;
    }
    if (hit) return finish(Verdict::hit_mine);
    if (oversized) return finish(Verdict::gave_up_oversized);
    if (ambiguous) return finish(Verdict::gave_up_ambiguous);
    if (!is_solved(m_, s_)) throw std::logic_error("every island finished but the board is not solved");
    return finish(Verdict::solved);
  }

private:
  void trace_reveal(Cell c, CellValue v) {
    if (opts_.trace) *opts_.trace << "REVEAL " << c.row << ' ' << c.col << " -> " << state_char(v) << '\n';
  }

  void flood(Cell start) {
    FloodStats stats;
    std::function<void(Cell, CellValue)> on_reveal;
    if (opts_.trace) on_reveal = [this](Cell c, CellValue v) { trace_reveal(c, v); };
    outcome_.reveals += flood_reveal_in_place(m_, s_, start, FloodOrder::lifo, &stats, on_reveal);
    outcome_.cell_touches += stats.pops;
  }

  // Local copy of the island's bounding box: island cells keep their value,
  // every other cell becomes a zero clue. Cells outside the island never touch
  // a hidden island cell (those are separated by revealed zeros), so the
  // placeholders add no constraints.
  GridState local_view(const Island& island, const std::vector<std::uint8_t>& mask) const {
    const BoundingBox b = island.box;
    GridState local(GridDims(b.rows, b.cols));
    for (int r = 0; r < b.rows; ++r)
      for (int c = 0; c < b.cols; ++c) {
        const std::size_t li = static_cast<std::size_t>(r) * static_cast<std::size_t>(b.cols) + static_cast<std::size_t>(c);
        local.set_index(li, mask[li] ? s_.at({b.top + r, b.left + c}) : CellValue::clue(0));
      }
    return local;
  }

  Verdict solve_island(const Island& island) {
    const BoundingBox b = island.box;
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(b.rows) * static_cast<std::size_t>(b.cols), 0);
    for (Cell c : island.cells)
      mask[static_cast<std::size_t>(c.row - b.top) * static_cast<std::size_t>(b.cols) + static_cast<std::size_t>(c.col - b.left)] = 1;
    const InferenceOptions inference{opts_.node_budget, false};
    for (;;) {
      const GridState local = local_view(island, mask);
      outcome_.island_work += mask.size();
      InferenceReport r;
      try {
        r = classify_hidden(local, inference);
      } catch (const SearchBudgetExceeded&) {
        return Verdict::gave_up_oversized;
      }
      auto global = [&](Cell c) { return Cell{c.row + b.top, c.col + b.left}; };
      if (!r.never_mine.empty()) {
        for (Cell c : r.never_mine)
          if (s_.at(global(c)).is_hidden()) flood(global(c));
        continue;
      }
      if (r.two_way.empty()) return Verdict::solved;
      if (!rng_) return Verdict::gave_up_ambiguous;

      const Cell guess = global(r.two_way[rng_->uniform_below(r.two_way.size())]);
      ++outcome_.guess_count;
      if (opts_.trace) *opts_.trace << "GUESS " << guess.row << ' ' << guess.col << '\n';
      if (m_.is_mine(guess)) {
        s_.set(guess, CellValue::shown_mine());
        ++outcome_.reveals;
        trace_reveal(guess, s_.at(guess));
        return Verdict::hit_mine;
      }
      flood(guess);
    }
  }

  PlayOutcome finish(Verdict v) {
    outcome_.verdict = v;
    if (opts_.trace) *opts_.trace << "VERDICT " << to_string(v) << '\n';
    if (opts_.final_state) *opts_.final_state = s_;
    return std::move(outcome_);
  }

  const MineAssignment& m_;
  const PlayOptions& opts_;
  Rng* rng_;
  GridState s_;
  PlayOutcome outcome_;
};

}  // namespace detail

/// Deterministic inference play. Gives up on oversized or ambiguous islands.
inline PlayOutcome play(const MineAssignment& m, const PlayOptions& opts = {}) {
  return detail::Player(m, opts, nullptr).run();
}

/// As play, but reveals a uniformly chosen two_way cell whenever an island's
/// inference stalls.
inline PlayOutcome play_with_guessing(const MineAssignment& m, Rng& rng, const PlayOptions& opts = {}) {
  return detail::Player(m, opts, &rng).run();
}

}  // namespace mines_phase
