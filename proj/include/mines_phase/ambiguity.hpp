#pragma once

// Ambiguity of grid states and patterns, exhaustive enumeration of small
// ambiguous patterns, and the single-mine non-monotonicity witness.

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>
#include <vector>

#include "mines_phase/grid.hpp"
#include "mines_phase/inference.hpp"
#include "mines_phase/io.hpp"
#include "mines_phase/patterns.hpp"

namespace mines_phase {

/// At least one hidden cell, no shown mine, and every hidden cell two_way.
inline bool is_ambiguous_state(const GridState& s, const InferenceOptions& opts = {}) {
  if (s.count_hidden() == 0) return false;
  const InferenceReport r = classify_hidden(s, opts);
  return r.always_mine.empty() && r.never_mine.empty();
}

/// Result of playing a pattern out with maximal safe information.
struct PlayOut {
  MineAssignment board;
  Cell anchor;
  /// Final state: every deducible safe cell revealed, every forced mine flagged.
  GridState state;
  bool ambiguous = false;
};

/// Embeds `p` with `padding` empty rings, reveals every cell outside the
/// mines' neighborhoods, then reveals never_mine cells until none remain and
/// finally flags the always_mine cells. The pattern is ambiguous iff hidden
/// cells survive.
///
/// Single-clue deductions run first and exact inference only when they stall.
/// Revealing a safe cell can only shrink the completion set, so the order of
/// deductions does not change the fixpoint.
inline PlayOut play_out(const Pattern& p, int padding = 3) {
  if (padding < 1) throw ContractViolation("play-out needs at least one padding ring");
  const GridDims frame = p.frame();
  const GridDims dims(frame.rows + 2 * padding, frame.cols + 2 * padding);
  const Cell anchor{padding, padding};
  PlayOut out{embed(p, dims, anchor), anchor, GridState(dims), false};
  const MineAssignment& m = out.board;
  const std::size_t n = dims.size();

  // Every cell within distance 2 of a mine lies at least 3 cells inside the
  // board, so neighbor offsets never leave it for the cells touched below.
  const auto w = static_cast<std::ptrdiff_t>(dims.cols);
  const std::ptrdiff_t around[9] = {-w - 1, -w, -w + 1, -1, 0, 1, w - 1, w, w + 1};

  enum : std::uint8_t { kHidden = 0, kOpen = 1, kMine = 2 };
  std::vector<std::uint8_t> counts(n, 0), view(n, kHidden), queued(n, 0);
  for (Cell mine : m.mines()) {
    const auto i = static_cast<std::ptrdiff_t>(dims.index(mine));
    for (auto d : around) ++counts[static_cast<std::size_t>(i + d)];
  }
  std::vector<std::size_t> queue;
  auto push_clues_around = [&](std::size_t i) {
    for (auto d : around) {
      const auto j = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + d);
      if (view[j] == kOpen && counts[j] > 0 && !queued[j]) {
        queued[j] = 1;
        queue.push_back(j);
      }
    }
  };
  auto open = [&](std::size_t i) {
    if (m.is_mine_index(i)) throw std::logic_error("play-out deduced a mine as safe");
    view[i] = kOpen;
    push_clues_around(i);
  };

  // Zero clues everywhere, then their neighbors, which the zeros prove safe.
  for (std::size_t i = 0; i < n; ++i)
    if (counts[i] == 0) view[i] = kOpen;
  for (std::size_t i = 0; i < n; ++i) {
    if (counts[i] == 0 || m.is_mine_index(i)) continue;
    for (auto d : around)
      if (counts[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + d)] == 0) {
        open(i);
        break;
      }
  }

  auto to_state = [&] {
    GridState st(dims);
    for (std::size_t i = 0; i < n; ++i) {
      if (view[i] == kOpen)
        st.set_index(i, CellValue::clue(counts[i]));
      else if (view[i] == kMine)
        st.set_index(i, CellValue::flag());
    }
    return st;
  };
  auto any_unresolved = [&] { return std::find(view.begin(), view.end(), kHidden) != view.end(); };

  for (;;) {
    while (!queue.empty()) {
      const std::size_t i = queue.back();
      queue.pop_back();
      queued[i] = 0;
      int known = 0, open_count = 0;
      std::size_t open_cells[9];
      for (auto d : around) {
        const auto j = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + d);
        if (view[j] == kMine)
          ++known;
        else if (view[j] == kHidden)
          open_cells[open_count++] = j;
      }
      if (open_count == 0) continue;
      const int left = counts[i] - known;
      if (left == 0) {
        for (int k = 0; k < open_count; ++k) open(open_cells[k]);
      } else if (left == open_count) {
        for (int k = 0; k < open_count; ++k) {
          view[open_cells[k]] = kMine;
          push_clues_around(open_cells[k]);
        }
      }
    }
    if (!any_unresolved()) break;

    // Single-clue deductions stalled; known mines enter as flags.
    const InferenceReport r = classify_hidden(to_state());
    for (Cell c : r.always_mine) {
      view[dims.index(c)] = kMine;
      push_clues_around(dims.index(c));
    }
    if (r.never_mine.empty()) break;
    for (Cell c : r.never_mine) open(dims.index(c));
  }

  out.state = to_state();
  out.ambiguous = any_unresolved();
  return out;
}

inline bool is_ambiguous_pattern(const Pattern& p) { return play_out(p).ambiguous; }

namespace detail {

// Bitboard form of the first play-out rounds for mine sets inside a 32x64
// window: true iff some empty cell has its whole neighborhood inside the
// mines' neighborhoods, i.e. stays hidden after the zero clues are used.
// Cells are (row, col) with 2 <= row < 30 and 2 <= col < 62.
inline bool leaves_hidden_empty_cell(const Cell* cells, std::size_t count) {
  std::uint64_t mines[32] = {};
  for (std::size_t i = 0; i < count; ++i) mines[cells[i].row] |= std::uint64_t{1} << cells[i].col;
  auto dilate_row = [](std::uint64_t x) { return x | (x << 1) | (x >> 1); };
  std::uint64_t near[32];  // cells with a mine in N(c)
  for (int r = 0; r < 32; ++r) {
    std::uint64_t acc = dilate_row(mines[r]);
    if (r > 0) acc |= dilate_row(mines[r - 1]);
    if (r < 31) acc |= dilate_row(mines[r + 1]);
    near[r] = acc;
  }
  for (int r = 1; r < 31; ++r) {
    auto erode_row = [](std::uint64_t x) { return x & (x << 1) & (x >> 1); };
    const std::uint64_t interior = erode_row(near[r - 1]) & erode_row(near[r]) & erode_row(near[r + 1]);
    if (interior & ~mines[r]) return true;
  }
  return false;
}

}  // namespace detail

struct EnumerationStats {
  std::uint64_t candidates = 0;
  /// Candidates that needed the full inference play-out.
  std::uint64_t full_checks = 0;
  /// Played-out ambiguous states rejected by envelope_pruning_checks.
  std::uint64_t pruned = 0;
};

struct EnumerateOptions {
  unsigned threads = 1;
  EnumerationStats* stats = nullptr;
};

/// All ambiguous patterns with at most `max_mines` mines (max 7), sorted.
///
/// Candidates are the connected mine clusters under "distance <= 3",
/// generated once per translation class by Redelmeier's method: the origin
/// is the lexicographically smallest mine and cells are only added after it.
inline std::vector<Pattern> enumerate_ambiguous(int max_mines, const EnumerateOptions& opts = {}) {
  if (max_mines < 1) throw ContractViolation("max_mines must be at least 1");
  if (max_mines > 7) throw ContractViolation("max_mines above 7 exceeds the enumeration budget");

  const int reach = 3 * (max_mines - 1);
  const int H = reach + 1, W = 2 * reach + 1;
  // Placement inside the bitboard window of leaves_hidden_empty_cell.
  constexpr int kRowOff = 4, kColOff = 4;
  auto key = [&](int r, int c) { return r * W + (c + reach); };
  auto allowed = [&](int r, int c) { return r >= 0 && r < H && c >= -reach && c <= reach && (r > 0 || c >= 0); };

  struct Task {
    std::vector<int> poly;
    std::vector<int> untried;
    std::vector<std::uint8_t> seen;
  };

  std::mutex out_mutex;
  std::vector<Pattern> found;
  std::atomic<std::uint64_t> candidates{0}, full_checks{0}, pruned{0};
  const PruningOptions pruning{max_mines <= 6 ? std::optional<int>(5) : std::nullopt};

  auto evaluate = [&](const std::vector<int>& poly) {
    candidates.fetch_add(1, std::memory_order_relaxed);
    Cell cells[8];
    for (std::size_t i = 0; i < poly.size(); ++i)
      cells[i] = {poly[i] / W + kRowOff, poly[i] % W + kColOff};
    if (!detail::leaves_hidden_empty_cell(cells, poly.size())) return;
    full_checks.fetch_add(1, std::memory_order_relaxed);
    const Pattern p = Pattern::from_mines(std::vector<Cell>(cells, cells + poly.size()));
    const PlayOut po = play_out(p);
    if (!po.ambiguous) return;
    if (!envelope_pruning_checks(po.state, pruning)) {
      pruned.fetch_add(1, std::memory_order_relaxed);
      return;
    }
    std::lock_guard lock(out_mutex);
    found.push_back(p);
  };

  // Redelmeier step: consume `untried` LIFO; each popped cell extends poly.
  auto extend = [&](auto&& self, Task& t, int split_depth, std::vector<Task>* split) -> void {
    while (!t.untried.empty()) {
      const int cell = t.untried.back();
      t.untried.pop_back();
      t.poly.push_back(cell);
      evaluate(t.poly);
      if (static_cast<int>(t.poly.size()) < max_mines) {
        std::vector<int> added;
        std::vector<int> saved_untried = t.untried;
        const int r = cell / W, c = cell % W - reach;
        for (int dr = -3; dr <= 3; ++dr)
          for (int dc = -3; dc <= 3; ++dc) {
            const int rr = r + dr, cc = c + dc;
            if (!allowed(rr, cc)) continue;
            const int k = key(rr, cc);
            if (t.seen[static_cast<std::size_t>(k)]) continue;
            t.seen[static_cast<std::size_t>(k)] = 1;
            added.push_back(k);
            t.untried.push_back(k);
          }
        if (split && static_cast<int>(t.poly.size()) == split_depth) {
          split->push_back(t);
        } else {
          self(self, t, split_depth, split);
        }
        for (int k : added) t.seen[static_cast<std::size_t>(k)] = 0;
        t.untried = std::move(saved_untried);
      }
      t.poly.pop_back();
    }
  };

  Task root;
  root.seen.assign(static_cast<std::size_t>(H * W), 0);
  root.untried.push_back(key(0, 0));
  root.seen[static_cast<std::size_t>(key(0, 0))] = 1;

  const unsigned threads = std::max(1u, opts.threads);
  if (threads == 1) {
    extend(extend, root, 0, nullptr);
  } else {
    // Serial prefix up to two mines, then the subtrees in parallel.
    std::vector<Task> tasks;
    extend(extend, root, 2, &tasks);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) extend(extend, tasks[i], 0, nullptr);
      });
    for (auto& th : pool) th.join();
  }

  std::sort(found.begin(), found.end());
  if (opts.stats) *opts.stats = {candidates.load(), full_checks.load(), pruned.load()};
  return found;
}

/// Writes pattern_NNN.txt files and a summary.txt with "count=<k> max_mines=<m>".
inline void write_pattern_directory(const std::filesystem::path& dir, const std::vector<Pattern>& patterns,
                                    int max_mines) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "pattern_%03zu.txt", i);
    write_file_atomic(dir / name, [&](std::ostream& os) { write_pattern(os, patterns[i]); });
  }
  write_file_atomic(dir / "summary.txt", [&](std::ostream& os) {
    os << "count=" << patterns.size() << " max_mines=" << max_mines << '\n';
  });
}

struct WitnessReport {
  /// First witness in row-major order, in P1 frame coordinates.
  Cell cell;
  /// Every single-cell addition that makes P1 non-ambiguous.
  std::vector<Cell> witnesses;
  std::size_t candidates_tested = 0;
};

/// Tries every single extra mine within three cells of P1's frame.
inline WitnessReport non_monotone_witness() {
  const Pattern p1 = canonical_p1_p2().p1;
  WitnessReport report;
  for (int r = -3; r < p1.frame().rows + 3; ++r)
    for (int c = -3; c < p1.frame().cols + 3; ++c) {
      const Cell extra{r, c};
      if (p1.is_mine(extra)) continue;
      auto mines = p1.mines();
      mines.push_back(extra);
      ++report.candidates_tested;
      if (!is_ambiguous_pattern(Pattern::from_mines(mines))) report.witnesses.push_back(extra);
    }
  if (report.witnesses.empty()) throw std::logic_error("no single-mine addition breaks the ambiguity of P1");
  report.cell = report.witnesses.front();
  return report;
}

}  // namespace mines_phase
