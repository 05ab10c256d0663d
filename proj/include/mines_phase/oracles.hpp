#pragma once

// Brute-force references for the fast algorithms. They share nothing with
// the code they check beyond the data types and the clue definition.

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mines_phase/grid.hpp"
#include "mines_phase/inference.hpp"
#include "mines_phase/patterns.hpp"
#include "mines_phase/rng.hpp"

namespace mines_phase::oracle {

struct NaiveClassification {
  std::vector<Cell> hidden;
  /// Per hidden cell, in the order of `hidden`.
  std::vector<HiddenClass> cls;
  /// Consistent assignments of all hidden cells.
  std::uint64_t assignments = 0;
};

/// Tries every mine/empty assignment of the hidden cells (h <= 24).
inline NaiveClassification classify(const GridState& s) {
  const GridDims dims = s.dims();
  NaiveClassification out;
  for (std::size_t i = 0; i < dims.size(); ++i)
    if (s.at_index(i).is_hidden()) out.hidden.push_back(dims.cell(i));
  const std::size_t h = out.hidden.size();
  if (h > 24) throw std::invalid_argument("naive classification limited to 24 hidden cells");

  std::vector<int> slot(dims.size(), -1);
  for (std::size_t k = 0; k < h; ++k) slot[dims.index(out.hidden[k])] = static_cast<int>(k);

  // Each clue becomes "popcount(bits & mask) == need".
  std::vector<std::pair<std::uint32_t, int>> checks;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const CellValue v = s.at_index(i);
    if (!v.is_clue()) continue;
    const Cell c = dims.cell(i);
    std::uint32_t mask = 0;
    int known = 0;
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc) {
        const Cell n{c.row + dr, c.col + dc};
        if (!dims.contains(n)) continue;
        const CellValue nv = s.at(n);
        if (nv.is_flag() || nv.is_shown_mine()) ++known;
        else if (nv.is_hidden()) mask |= std::uint32_t{1} << slot[dims.index(n)];
      }
    checks.emplace_back(mask, v.clue() - known);
  }

  std::vector<std::uint8_t> seen_mine(h, 0), seen_empty(h, 0);
  for (std::uint32_t bits = 0; bits < (std::uint32_t{1} << h); ++bits) {
    bool ok = true;
    for (const auto& [mask, need] : checks)
      if (std::popcount(bits & mask) != need) {
        ok = false;
        break;
      }
    if (!ok) continue;
    ++out.assignments;
    for (std::size_t k = 0; k < h; ++k) ((bits >> k) & 1U ? seen_mine : seen_empty)[k] = 1;
  }
  for (std::size_t k = 0; k < h; ++k)
    out.cls.push_back(seen_mine[k] && seen_empty[k] ? HiddenClass::two_way
                                                    : (seen_mine[k] ? HiddenClass::always_mine : HiddenClass::never_mine));
  return out;
}

/// Every anchor, every frame cell.
inline std::vector<Cell> occurrences(const MineAssignment& m, const Pattern& p) {
  std::vector<Cell> out;
  const GridDims dims = m.dims(), frame = p.frame();
  for (int r = 0; r + frame.rows <= dims.rows; ++r)
    for (int c = 0; c + frame.cols <= dims.cols; ++c) {
      bool match = true;
      for (int i = 0; i < frame.rows && match; ++i)
        for (int j = 0; j < frame.cols && match; ++j) match = m.is_mine({r + i, c + j}) == p.is_mine({i, j});
      if (match) out.push_back({r, c});
    }
  return out;
}

/// Every window, every cell.
inline int window_max(const MineAssignment& m, int w) {
  const GridDims dims = m.dims();
  int best = 0;
  for (int r = 0; r + w <= dims.rows; ++r)
    for (int c = 0; c + w <= dims.cols; ++c) {
      int sum = 0;
      for (int i = 0; i < w; ++i)
        for (int j = 0; j < w; ++j) sum += m.is_mine({r + i, c + j}) ? 1 : 0;
      best = std::max(best, sum);
    }
  return best;
}

/// A consistent random state on a small board with at most `max_hidden`
/// hidden cells: some clues revealed, some mines flagged, the rest hidden.
inline GridState random_state(Rng& rng, std::size_t max_hidden = 16) {
  const GridDims dims(3 + static_cast<int>(rng.uniform_below(5)), 3 + static_cast<int>(rng.uniform_below(5)));
  const double density = 0.1 + 0.3 * rng.uniform01();
  const double reveal = 0.2 + 0.6 * rng.uniform01();
  MineAssignment m(dims);
  for (std::size_t i = 0; i < dims.size(); ++i)
    if (rng.bernoulli(density)) m.add_mine(dims.cell(i));
  GridState s(dims);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const Cell c = dims.cell(i);
    if (m.is_mine(c)) {
      if (rng.bernoulli(0.2)) s.set(c, CellValue::flag());
    } else if (rng.bernoulli(reveal)) {
      s.set(c, CellValue::clue(clue_value(m, c)));
    }
  }
  while (s.count_hidden() > max_hidden) {
    const std::vector<Cell> hidden = s.hidden_cells();
    const Cell c = hidden[rng.uniform_below(hidden.size())];
    s.set(c, m.is_mine(c) ? CellValue::flag() : CellValue::clue(clue_value(m, c)));
  }
  return s;
}

}  // namespace mines_phase::oracle
