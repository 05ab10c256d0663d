#pragma once

// Patterns: translation-normalized mine layouts, the two six-mine ambiguous
// patterns and their shared state, occurrence scanning, exact occurrence
// expectations and envelope bookkeeping.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mines_phase/grid.hpp"

namespace mines_phase {

/// A mine layout on a frame whose two outer rings are empty and whose third
/// ring touches a mine on every side.
class Pattern {
public:
  Pattern(GridDims frame, std::vector<Cell> mines) : frame_(frame), mines_(std::move(mines)) {
    std::sort(mines_.begin(), mines_.end());
    mines_.erase(std::unique(mines_.begin(), mines_.end()), mines_.end());
    validate();
  }

  /// Builds the pattern whose frame wraps `mines` with two empty rings.
  static Pattern from_mines(const std::vector<Cell>& mines) {
    if (mines.empty()) throw ContractViolation("a pattern needs at least one mine");
    int r0 = mines[0].row, r1 = r0, c0 = mines[0].col, c1 = c0;
    for (Cell c : mines) {
      r0 = std::min(r0, c.row);
      r1 = std::max(r1, c.row);
      c0 = std::min(c0, c.col);
      c1 = std::max(c1, c.col);
    }
    std::vector<Cell> shifted;
    shifted.reserve(mines.size());
    for (Cell c : mines) shifted.push_back({c.row - r0 + 2, c.col - c0 + 2});
    return Pattern(GridDims(r1 - r0 + 5, c1 - c0 + 5), std::move(shifted));
  }

  GridDims frame() const { return frame_; }
  /// Row-major sorted.
  const std::vector<Cell>& mines() const { return mines_; }
  std::size_t mine_count() const { return mines_.size(); }
  bool is_mine(Cell c) const { return std::binary_search(mines_.begin(), mines_.end(), c); }

  MineAssignment to_assignment() const { return MineAssignment(frame_, mines_); }

  /// One of the 8 symmetries of the square; 0 is the identity, 1..3 rotate,
  /// 4..7 reflect.
  Pattern transformed(int symmetry) const {
    std::vector<Cell> out;
    out.reserve(mines_.size());
    for (Cell c : mines_) {
      int r = c.row, k = c.col;
      if (symmetry >= 4) k = -k;
      for (int i = 0; i < symmetry % 4; ++i) {
        const int nr = k, nk = -r;
        r = nr;
        k = nk;
      }
      out.push_back({r, k});
    }
    return from_mines(out);
  }

  friend bool operator==(const Pattern&, const Pattern&) = default;
  friend bool operator<(const Pattern& a, const Pattern& b) {
    if (a.mines_.size() != b.mines_.size()) return a.mines_.size() < b.mines_.size();
    if (a.frame_.rows != b.frame_.rows) return a.frame_.rows < b.frame_.rows;
    if (a.frame_.cols != b.frame_.cols) return a.frame_.cols < b.frame_.cols;
    return a.mines_ < b.mines_;
  }

private:
  void validate() const {
    const int rows = frame_.rows, cols = frame_.cols;
    if (rows < 5 || cols < 5) throw ContractViolation("pattern frame must be at least 5x5");
    bool top = false, bottom = false, left = false, right = false;
    for (Cell c : mines_) {
      if (!frame_.contains(c)) throw ContractViolation("pattern mine outside its frame");
      if (c.row < 2 || c.row > rows - 3 || c.col < 2 || c.col > cols - 3)
        throw ContractViolation("pattern has a mine in its two outer rings");
      top |= c.row == 2;
      bottom |= c.row == rows - 3;
      left |= c.col == 2;
      right |= c.col == cols - 3;
    }
    if (!(top && bottom && left && right)) throw ContractViolation("pattern frame has an empty third ring side");
  }

  GridDims frame_;
  std::vector<Cell> mines_;
};

/// Board of `pattern` placed at `anchor` on an otherwise empty `dims` grid.
inline MineAssignment embed(const Pattern& pattern, GridDims dims, Cell anchor) {
  MineAssignment m(dims);
  for (Cell c : pattern.mines()) m.add_mine({anchor.row + c.row, anchor.col + c.col});
  return m;
}

inline void plant(MineAssignment& m, const Pattern& pattern, Cell anchor) {
  for (Cell c : pattern.mines()) m.add_mine({anchor.row + c.row, anchor.col + c.col});
}

struct CanonicalPatterns {
  Pattern p1;
  Pattern p2;
  /// P1 embedded at `anchor` in an empty 14x14 board.
  MineAssignment board;
  Cell anchor;
  /// The ambiguous state shared by P1 and P2 on `board`'s grid.
  GridState s_min;
};

inline CanonicalPatterns canonical_p1_p2() {
  const GridDims frame(8, 8);
  Pattern p1(frame, {{2, 2}, {2, 5}, {5, 2}, {5, 5}, {3, 3}, {4, 4}});
  Pattern p2(frame, {{2, 2}, {2, 5}, {5, 2}, {5, 5}, {3, 4}, {4, 3}});
  const Cell anchor{3, 3};
  const GridDims dims(frame.rows + 6, frame.cols + 6);
  MineAssignment board = embed(p1, dims, anchor);

  auto in_center = [&](Cell c) {
    const int r = c.row - anchor.row, k = c.col - anchor.col;
    return r >= 3 && r <= 4 && k >= 3 && k <= 4;
  };
  GridState s(dims);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const Cell c = dims.cell(i);
    if (in_center(c)) continue;
    if (!board.is_mine(c)) s.set(c, CellValue::clue(clue_value(board, c)));
  }
  for (Cell corner : {Cell{2, 2}, Cell{2, 5}, Cell{5, 2}, Cell{5, 5}})
    s.set({anchor.row + corner.row, anchor.col + corner.col}, CellValue::flag());

  return {std::move(p1), std::move(p2), std::move(board), anchor, std::move(s)};
}

/// Top-left anchors of exact frame matches (mines and empties), row-major.
/// Driven from the mine list: each candidate anchor is the one placing the
/// pattern's first mine on an actual mine.
inline std::vector<Cell> occurrences(const MineAssignment& m, const Pattern& p) {
  std::vector<Cell> out;
  const GridDims dims = m.dims();
  const GridDims frame = p.frame();
  if (frame.rows > dims.rows || frame.cols > dims.cols) return out;
  const Cell first = p.mines().front();
  const MineAssignment shape = p.to_assignment();
  for (Cell x : m.mines()) {
    const Cell a{x.row - first.row, x.col - first.col};
    if (a.row < 0 || a.col < 0 || a.row + frame.rows > dims.rows || a.col + frame.cols > dims.cols) continue;
    bool match = true;
    for (int r = 0; r < frame.rows && match; ++r) {
      const std::size_t base = dims.index({a.row + r, a.col});
      const std::size_t pbase = frame.index({r, 0});
      for (int c = 0; c < frame.cols; ++c)
        if (m.plane()[base + static_cast<std::size_t>(c)] != shape.plane()[pbase + static_cast<std::size_t>(c)]) {
          match = false;
          break;
        }
    }
    if (match) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Exact E|occurrences| for i.i.d. Bernoulli(p_mine) mines, by linearity.
inline double expected_occurrences(GridDims dims, double p_mine, const Pattern& p) {
  const GridDims frame = p.frame();
  if (frame.rows > dims.rows || frame.cols > dims.cols) return 0.0;
  const double anchors = static_cast<double>(dims.rows - frame.rows + 1) * static_cast<double>(dims.cols - frame.cols + 1);
  const auto k = static_cast<double>(p.mine_count());
  const double empties = static_cast<double>(frame.size()) - k;
  return anchors * std::pow(p_mine, k) * std::pow(1.0 - p_mine, empties);
}

struct Envelope {
  std::vector<Cell> cells;
  std::vector<Cell> border;
  std::vector<Cell> corners;
};

/// Union of N(h) over hidden h, with border and corner cells.
inline Envelope envelope(const GridState& s) {
  const GridDims dims = s.dims();
  std::vector<std::uint8_t> in(dims.size(), 0);
  bool any_hidden = false;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (!s.at_index(i).is_hidden()) continue;
    any_hidden = true;
    for (Cell n : neighbors(dims.cell(i), dims)) in[dims.index(n)] = 1;
  }
  if (!any_hidden) throw ContractViolation("envelope of a state without hidden cells is vacuous");

  auto inside = [&](Cell c) { return dims.contains(c) && in[dims.index(c)]; };
  Envelope env;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (!in[i]) continue;
    const Cell c = dims.cell(i);
    env.cells.push_back(c);
    int covered = 0;
    for (Cell n : neighbors(c, dims)) covered += inside(n) ? 1 : 0;
    if (covered == 9) continue;
    env.border.push_back(c);
    int outside = 0;
    for (Cell o : {Cell{c.row - 1, c.col}, Cell{c.row + 1, c.col}, Cell{c.row, c.col - 1}, Cell{c.row, c.col + 1}})
      outside += inside(o) ? 0 : 1;
    if (outside >= 2) env.corners.push_back(c);
  }
  return env;
}

/// Clue minus the flags in its neighborhood.
inline int s_clue(const GridState& s, Cell c) {
  require_in_bounds(s.dims(), c);
  if (!s.at(c).is_clue()) throw ContractViolation("s_clue on a non-clue cell");
  int flags = 0;
  for (Cell n : neighbors(c, s.dims())) flags += s.at(n).is_flag() ? 1 : 0;
  return s.at(c).clue() - flags;
}

struct PruningResult {
  bool pass = true;
  std::string reason;

  explicit operator bool() const { return pass; }
};

struct PruningOptions {
  /// Flag ceiling valid when every candidate has at most six mines.
  std::optional<int> max_flags = 5;
};

/// Necessary conditions satisfied by every ambiguous state. A failure proves
/// the state is not ambiguous; passing proves nothing.
inline PruningResult envelope_pruning_checks(const GridState& s, const PruningOptions& opts = {}) {
  const GridDims dims = s.dims();
  if (s.count_hidden() == 0) return {false, "no hidden cells"};
  const Envelope env = envelope(s);

  for (Cell c : env.cells) {
    if (!s.at(c).is_clue()) continue;
    int hidden = 0;
    for (Cell n : neighbors(c, dims)) hidden += s.at(n).is_hidden() ? 1 : 0;
    if (hidden < 2) return {false, "lemma6: envelope clue with fewer than two hidden neighbors"};
    if (s_clue(s, c) <= 0) return {false, "lemma6: envelope clue with no unflagged mine"};
  }
  for (Cell c : env.border)
    if (s.at(c).is_hidden()) return {false, "lemma7: hidden envelope border cell"};
  for (Cell c : env.corners)
    if (!s.at(c).is_flag()) return {false, "lemma7: envelope corner is not a flag"};
  if (opts.max_flags) {
    const auto flags = std::count_if(s.values().begin(), s.values().end(), [](CellValue v) { return v.is_flag(); });
    if (flags > *opts.max_flags) return {false, "lemma8: too many flags"};
  }
  return {};
}

// Pattern files: a "; pattern" comment line followed by the mine grid.

inline void write_pattern(std::ostream& os, const Pattern& p) {
  os << "; pattern\n";
  write_grid(os, p.to_assignment());
}

inline Pattern read_pattern(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "; pattern") throw ParseError("pattern file must start with \"; pattern\"");
  const MineAssignment m = read_mines(in);
  return Pattern(m.dims(), m.sorted_mines());
}

}  // namespace mines_phase
