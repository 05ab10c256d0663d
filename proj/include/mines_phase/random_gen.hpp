#pragma once

// Random boards and the mine-addition process: i.i.d. sampling, the
// augmented construction, window statistics, border clearance, and a process
// state that tracks pattern occurrences, the window maximum and the hitting
// time incrementally.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mines_phase/grid.hpp"
#include "mines_phase/patterns.hpp"
#include "mines_phase/rng.hpp"

namespace mines_phase {

inline void require_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ContractViolation("probability must lie in [0, 1]");
}

/// Each cell is a mine independently with probability p, row-major draws.
inline MineAssignment sample_iid(GridDims dims, double p, Seed seed) {
  require_probability(p);
  Rng rng(seed);
  MineAssignment m(dims);
  for (std::size_t i = 0; i < dims.size(); ++i)
    if (rng.bernoulli(p)) m.add_mine(dims.cell(i));
  return m;
}

/// Keeps the mines of `base` and mines each other cell with probability p.
/// With an empty base this draws exactly the same board as sample_iid.
inline MineAssignment sample_augmented(const MineAssignment& base, double p, Seed seed) {
  require_probability(p);
  Rng rng(seed);
  MineAssignment m = base;
  const GridDims dims = base.dims();
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (base.is_mine_index(i)) continue;
    if (rng.bernoulli(p)) m.add_mine(dims.cell(i));
  }
  return m;
}

/// Largest mine count over all w x w windows, using one row band of column
/// sums (O(n) time, O(cols) extra space).
inline int window_mine_max(const MineAssignment& m, int w = 100) {
  const GridDims dims = m.dims();
  if (w < 1) throw ContractViolation("window size must be positive");
  if (w > dims.rows || w > dims.cols) throw ContractViolation("window larger than the board");
  const auto cols = static_cast<std::size_t>(dims.cols);
  const auto& plane = m.plane();
  std::vector<int> band(cols, 0);
  int best = 0;
  for (int r = 0; r < dims.rows; ++r) {
    const std::size_t add = static_cast<std::size_t>(r) * cols;
    for (std::size_t c = 0; c < cols; ++c) band[c] += plane[add + c];
    if (r >= w) {
      const std::size_t sub = static_cast<std::size_t>(r - w) * cols;
      for (std::size_t c = 0; c < cols; ++c) band[c] -= plane[sub + c];
    }
    if (r < w - 1) continue;
    int sum = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      sum += band[c];
      if (c >= static_cast<std::size_t>(w)) sum -= band[c - static_cast<std::size_t>(w)];
      if (c + 1 >= static_cast<std::size_t>(w)) best = std::max(best, sum);
    }
  }
  return best;
}

/// Minimum distance from a mine to the board edge; nullopt without mines.
inline std::optional<int> border_clearance(const MineAssignment& m) {
  const GridDims dims = m.dims();
  std::optional<int> best;
  for (Cell c : m.mines()) {
    const int d = std::min({c.row, c.col, dims.rows - 1 - c.row, dims.cols - 1 - c.col});
    if (!best || d < *best) best = d;
  }
  return best;
}

/// n^(71/84) rounded to the nearest integer.
inline std::int64_t kappa(std::int64_t n) {
  if (n < 0) throw ContractViolation("kappa of a negative size");
  return std::llround(std::pow(static_cast<double>(n), 71.0 / 84.0));
}

/// The mine-addition process. Tracks P1 and P2 (always patterns 0 and 1) plus
/// any extra patterns, the w x w window maximum and the hitting time: the
/// first t at which P1 or P2 occurs.
class ProcessState {
public:
  /// `window` 0 disables window tracking.
  explicit ProcessState(GridDims dims, int window = 100, std::vector<Pattern> extra = {})
      : board_(dims), window_(window) {
    const CanonicalPatterns canon = canonical_p1_p2();
    patterns_.push_back(canon.p1);
    patterns_.push_back(canon.p2);
    for (auto& p : extra) patterns_.push_back(std::move(p));
    for (const Pattern& p : patterns_) {
      Tracked t;
      t.frame = p.frame();
      t.shape = p.to_assignment();
      if (t.frame.rows <= dims.rows && t.frame.cols <= dims.cols) {
        t.anchor_rows = dims.rows - t.frame.rows + 1;
        t.anchor_cols = dims.cols - t.frame.cols + 1;
        t.present.assign(static_cast<std::size_t>(t.anchor_rows) * static_cast<std::size_t>(t.anchor_cols), 0);
      }
      tracked_.push_back(std::move(t));
    }
    if (window_ < 0 || window_ > dims.rows || window_ > dims.cols)
      throw ContractViolation("window larger than the board");
    if (window_ > 0) {
      win_rows_ = dims.rows - window_ + 1;
      win_cols_ = dims.cols - window_ + 1;
      win_counts_.assign(static_cast<std::size_t>(win_rows_) * static_cast<std::size_t>(win_cols_), 0);
    }
  }

  const MineAssignment& board() const { return board_; }
  GridDims dims() const { return board_.dims(); }
  std::size_t t() const { return events_.size(); }
  std::optional<std::size_t> tau() const { return tau_; }
  int window() const { return window_; }
  int window_max() const { return window_max_; }
  const std::vector<Pattern>& patterns() const { return patterns_; }
  std::size_t occurrence_count(std::size_t pattern) const { return tracked_.at(pattern).count; }
  /// Current anchors of `pattern`, row-major.
  std::vector<Cell> occurrence_anchors(std::size_t pattern) const {
    const Tracked& t = tracked_.at(pattern);
    std::vector<Cell> out;
    for (std::size_t i = 0; i < t.present.size(); ++i)
      if (t.present[i])
        out.push_back({static_cast<int>(i / static_cast<std::size_t>(t.anchor_cols)),
                       static_cast<int>(i % static_cast<std::size_t>(t.anchor_cols))});
    return out;
  }
  bool occurs_at(std::size_t pattern, Cell anchor) const {
    const Tracked& t = tracked_.at(pattern);
    if (t.present.empty() || anchor.row < 0 || anchor.col < 0 || anchor.row >= t.anchor_rows || anchor.col >= t.anchor_cols)
      return false;
    return t.present[static_cast<std::size_t>(anchor.row) * static_cast<std::size_t>(t.anchor_cols) +
                     static_cast<std::size_t>(anchor.col)] != 0;
  }
  /// Added cells in order; event i happened at t = i + 1.
  const std::vector<Cell>& events() const { return events_; }

  /// Adds a mine on a uniformly chosen empty cell.
  Cell step(Rng& rng) {
    const GridDims dims = board_.dims();
    const std::size_t n = dims.size();
    if (t() >= n) throw ContractViolation("process step on a full board");
    Cell chosen;
    if (2 * t() <= n) {
      // At least half the cells are empty: O(1) expected retries.
      std::size_t i;
      do i = rng.uniform_below(n);
      while (board_.is_mine_index(i));
      chosen = dims.cell(i);
    } else {
      std::uint64_t k = rng.uniform_below(n - t());
      std::size_t i = 0;
      for (;; ++i) {
        if (board_.is_mine_index(i)) continue;
        if (k-- == 0) break;
      }
      chosen = dims.cell(i);
    }
    add(chosen);
    return chosen;
  }

  /// Adds a mine on a chosen empty cell (planted schedules and replay).
  void add(Cell c) {
    require_in_bounds(board_.dims(), c);
    if (board_.is_mine(c)) throw ContractViolation("process add on a cell that already holds a mine");
    board_.add_mine(c);
    events_.push_back(c);
    update_occurrences(c);
    update_windows(c);
    if (!tau_ && tracked_[0].count + tracked_[1].count > 0) tau_ = t();
  }

  /// One "t row col" line per addition.
  void write_events(std::ostream& os) const {
    for (std::size_t i = 0; i < events_.size(); ++i)
      os << i + 1 << ' ' << events_[i].row << ' ' << events_[i].col << '\n';
  }

  /// Replays an event log onto a fresh process.
  static ProcessState replay(GridDims dims, std::istream& in, int window = 100, std::vector<Pattern> extra = {}) {
    ProcessState state(dims, window, std::move(extra));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::istringstream fields(line);
      std::size_t t = 0;
      Cell c;
      std::string rest;
      if (!(fields >> t >> c.row >> c.col) || (fields >> rest))
        throw ParseError("event log line " + std::to_string(line_no) + ": expected \"t row col\"");
      if (t != state.t() + 1)
        throw ParseError("event log line " + std::to_string(line_no) + ": expected t=" + std::to_string(state.t() + 1));
      if (!dims.contains(c)) throw ParseError("event log line " + std::to_string(line_no) + ": cell out of bounds");
      state.add(c);
    }
    return state;
  }

private:
  struct Tracked {
    GridDims frame{1, 1};
    MineAssignment shape{GridDims{1, 1}};
    int anchor_rows = 0;
    int anchor_cols = 0;
    std::vector<std::uint8_t> present;
    std::size_t count = 0;
  };

  bool matches(const Tracked& t, Cell a) const {
    const GridDims dims = board_.dims();
    const auto& plane = board_.plane();
    const auto& shape = t.shape.plane();
    for (int r = 0; r < t.frame.rows; ++r) {
      const std::size_t base = dims.index({a.row + r, a.col});
      const std::size_t pbase = t.frame.index({r, 0});
      for (int c = 0; c < t.frame.cols; ++c)
        if (plane[base + static_cast<std::size_t>(c)] != shape[pbase + static_cast<std::size_t>(c)]) return false;
    }
    return true;
  }

  // Only windows containing `x` can change. A present occurrence containing
  // x had x empty, so it is destroyed; a new one must have x as a mine.
  void update_occurrences(Cell x) {
    for (std::size_t k = 0; k < tracked_.size(); ++k) {
      Tracked& t = tracked_[k];
      if (t.present.empty()) continue;
      auto slot = [&](Cell a) {
        return static_cast<std::size_t>(a.row) * static_cast<std::size_t>(t.anchor_cols) + static_cast<std::size_t>(a.col);
      };
      if (t.count > 0) {
        const int r0 = std::max(0, x.row - t.frame.rows + 1), r1 = std::min(x.row, t.anchor_rows - 1);
        const int c0 = std::max(0, x.col - t.frame.cols + 1), c1 = std::min(x.col, t.anchor_cols - 1);
        for (int r = r0; r <= r1; ++r)
          for (int c = c0; c <= c1; ++c) {
            auto& present = t.present[slot({r, c})];
            if (present) {
              present = 0;
              --t.count;
            }
          }
      }
      for (Cell m : patterns_[k].mines()) {
        const Cell a{x.row - m.row, x.col - m.col};
        if (a.row < 0 || a.col < 0 || a.row >= t.anchor_rows || a.col >= t.anchor_cols) continue;
        if (!matches(t, a)) continue;
        t.present[slot(a)] = 1;
        ++t.count;
      }
    }
  }

  void update_windows(Cell x) {
    if (window_ == 0) return;
    const int r0 = std::max(0, x.row - window_ + 1), r1 = std::min(x.row, win_rows_ - 1);
    const int c0 = std::max(0, x.col - window_ + 1), c1 = std::min(x.col, win_cols_ - 1);
    for (int r = r0; r <= r1; ++r) {
      int* row = win_counts_.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(win_cols_);
      for (int c = c0; c <= c1; ++c) window_max_ = std::max(window_max_, ++row[c]);
    }
  }

  MineAssignment board_;
  std::vector<Pattern> patterns_;
  std::vector<Tracked> tracked_;
  std::vector<Cell> events_;
  std::optional<std::size_t> tau_;
  int window_;
  int win_rows_ = 0;
  int win_cols_ = 0;
  std::vector<int> win_counts_;
  int window_max_ = 0;
};

/// An event log whose only P1/P2 occurrence is completed at step `tau`.
struct PlantedSchedule {
  GridDims dims;
  Pattern pattern;
  Cell anchor;
  std::size_t tau = 0;
  std::vector<Cell> events;
};

/// Plants `pattern` (P1 or P2) at a random anchor and mixes tau - k isolated
/// filler mines into the first tau - 1 steps, where k is the pattern's mine
/// count; the last pattern mine arrives at step tau. `after` more fillers
/// follow. Fillers stay at least 3 cells from the border, 4 from each other
/// and 4 from the pattern frame, so before tau every island is a single mine
/// or part of the pattern.
inline PlantedSchedule planted_schedule(GridDims dims, const Pattern& pattern, std::size_t tau, std::size_t after,
                                        Rng& rng) {
  const GridDims frame = pattern.frame();
  const std::size_t k = pattern.mine_count();
  if (tau < k) throw ContractViolation("tau is smaller than the pattern's mine count");
  if (dims.rows < frame.rows + 2 || dims.cols < frame.cols + 2) throw ContractViolation("board too small for the pattern");

  // Anchor at least one cell inside the board, so the corner stays a zero.
  const Cell anchor{1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(dims.rows - frame.rows - 1))),
                    1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(dims.cols - frame.cols - 1)))};
  std::vector<Cell> fillers;
  const std::size_t filler_count = tau - k + after;
  auto far_enough = [&](Cell c) {
    const int dr = std::max({0, anchor.row - c.row, c.row - (anchor.row + frame.rows - 1)});
    const int dc = std::max({0, anchor.col - c.col, c.col - (anchor.col + frame.cols - 1)});
    if (std::max(dr, dc) < 4) return false;
    for (Cell f : fillers)
      if (grid_distance(f, c) < 4) return false;
    return true;
  };
  for (std::size_t attempts = 0; fillers.size() < filler_count; ++attempts) {
    if (attempts > 1000 * (filler_count + 1)) throw ContractViolation("board too small for the planted schedule");
    if (dims.rows < 7 || dims.cols < 7) throw ContractViolation("board too small for the planted schedule");
    const Cell c{3 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(dims.rows - 6))),
                 3 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(dims.cols - 6)))};
    if (far_enough(c)) fillers.push_back(c);
  }

  std::vector<Cell> pattern_mines;
  for (Cell m : pattern.mines()) pattern_mines.push_back({anchor.row + m.row, anchor.col + m.col});
  for (std::size_t i = pattern_mines.size(); i > 1; --i) std::swap(pattern_mines[i - 1], pattern_mines[rng.uniform_below(i)]);

  // Interleave the first k-1 pattern mines with tau-k fillers uniformly.
  std::vector<std::uint8_t> is_pattern(tau - 1, 0);
  std::fill(is_pattern.begin(), is_pattern.begin() + static_cast<std::ptrdiff_t>(k - 1), 1);
  for (std::size_t i = is_pattern.size(); i > 1; --i) std::swap(is_pattern[i - 1], is_pattern[rng.uniform_below(i)]);

  PlantedSchedule s{dims, pattern, anchor, tau, {}};
  std::size_t next_pattern = 0, next_filler = 0;
  for (std::uint8_t p : is_pattern) s.events.push_back(p ? pattern_mines[next_pattern++] : fillers[next_filler++]);
  s.events.push_back(pattern_mines[next_pattern++]);
  while (next_filler < fillers.size()) s.events.push_back(fillers[next_filler++]);
  return s;
}

}  // namespace mines_phase
