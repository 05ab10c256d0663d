#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "mines_phase/grid.hpp"
#include "mines_phase/patterns.hpp"
#include "mines_phase/rng.hpp"

using namespace mines_phase;

namespace {

std::vector<Cell> collect(const Neighborhood& nb) { return {nb.begin(), nb.end()}; }

// Chebyshev ball clipped to the board, by direct scan.
std::size_t ball_size(Cell c, GridDims d) {
  std::size_t k = 0;
  for (int r = 0; r < d.rows; ++r)
    for (int q = 0; q < d.cols; ++q) k += std::max(std::abs(r - c.row), std::abs(q - c.col)) <= 1;
  return k;
}

}  // namespace

TEST(Neighbors, InteriorCornerAndEdge) {
  EXPECT_EQ(neighbors({2, 2}, GridDims(5, 5)).size(), 9u);
  EXPECT_EQ(neighbors({0, 0}, GridDims(2, 2)).size(), 4u);
  EXPECT_EQ(neighbors({0, 0}, GridDims(40, 17)).size(), 4u);
  EXPECT_EQ(neighbors({0, 1}, GridDims(3, 3)).size(), 6u);
}

TEST(Neighbors, IncludesTheCellAndMatchesScan) {
  const GridDims d(4, 7);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Cell c = d.cell(i);
    const auto nb = collect(neighbors(c, d));
    EXPECT_NE(std::find(nb.begin(), nb.end(), c), nb.end());
    EXPECT_EQ(nb.size(), ball_size(c, d));
  }
}

TEST(Neighbors, OutOfBoundsIsRejected) {
  EXPECT_THROW(neighbors({5, 0}, GridDims(5, 5)), ContractViolation);
  EXPECT_THROW(neighbors({0, -1}, GridDims(5, 5)), ContractViolation);
}

TEST(GridDistance, Examples) {
  EXPECT_EQ(grid_distance({0, 0}, {0, 0}), 0);
  EXPECT_EQ(grid_distance({0, 0}, {1, 1}), 1);
  EXPECT_EQ(grid_distance({2, 3}, {5, 1}), 3);
  EXPECT_EQ(grid_distance({5, 1}, {2, 3}), 3);
}

TEST(ClueValue, Examples) {
  const GridDims d(6, 6);
  MineAssignment empty(d);
  EXPECT_EQ(clue_value(empty, {3, 3}), 0);
  MineAssignment one(d, {{2, 2}});
  EXPECT_EQ(clue_value(one, {1, 1}), 1);
  EXPECT_EQ(clue_value(one, {2, 2}), 1);  // counts itself
  const Pattern p1 = canonical_p1_p2().p1;
  EXPECT_EQ(clue_value(p1.to_assignment(), {2, 3}), 2);
}

TEST(MineAssignment, AddRemoveAndCount) {
  MineAssignment m(GridDims(3, 3));
  EXPECT_TRUE(m.add_mine({1, 1}));
  EXPECT_FALSE(m.add_mine({1, 1}));
  EXPECT_EQ(m.mine_count(), 1u);
  EXPECT_TRUE(m.remove_mine({1, 1}));
  EXPECT_FALSE(m.remove_mine({1, 1}));
  EXPECT_EQ(m.mine_count(), 0u);
  EXPECT_THROW(m.add_mine({3, 0}), ContractViolation);
}

TEST(Consistency, Examples) {
  const CanonicalPatterns canon = canonical_p1_p2();
  const GridDims d = canon.board.dims();
  EXPECT_TRUE(is_consistent(canon.board, GridState(d)));
  EXPECT_TRUE(is_consistent(canon.board, canon.s_min));
  EXPECT_TRUE(is_consistent(embed(canon.p2, d, canon.anchor), canon.s_min));

  GridState bad(GridDims(3, 3));
  bad.set({1, 1}, CellValue::clue(1));
  EXPECT_FALSE(is_consistent(MineAssignment(GridDims(3, 3)), bad));
}

TEST(Consistency, FlagAndShownMineMustSitOnMines) {
  const GridDims d(3, 3);
  MineAssignment m(d, {{0, 0}});
  GridState s(d);
  s.set({0, 0}, CellValue::flag());
  EXPECT_TRUE(is_consistent(m, s));
  s.set({0, 0}, CellValue::shown_mine());
  EXPECT_TRUE(is_consistent(m, s));
  s.set({2, 2}, CellValue::flag());
  EXPECT_FALSE(is_consistent(m, s));
}

TEST(Reveal, Examples) {
  const GridDims d(4, 4);
  MineAssignment empty(d);
  const GridState s = reveal(empty, GridState(d), {0, 0});
  EXPECT_EQ(s.at({0, 0}), CellValue::clue(0));
  EXPECT_EQ(s.count_hidden(), d.size() - 1);

  MineAssignment mined(d, {{2, 2}});
  EXPECT_TRUE(reveal(mined, GridState(d), {2, 2}).at({2, 2}).is_shown_mine());
  EXPECT_THROW(reveal(empty, s, {0, 0}), ContractViolation);
}

TEST(FloodReveal, EmptyBoardOpensEverything) {
  const GridDims d(7, 11);
  MineAssignment m(d);
  const GridState s = flood_reveal(m, GridState(d), {3, 8});
  EXPECT_EQ(s.count_hidden(), 0u);
  for (CellValue v : s.values()) EXPECT_EQ(v, CellValue::clue(0));
  EXPECT_TRUE(is_solved(m, s));
}

TEST(FloodReveal, CenterMineStaysHidden) {
  const GridDims d(9, 9);
  MineAssignment m(d, {{4, 4}});
  const GridState s = flood_reveal(m, GridState(d), {0, 0});
  EXPECT_EQ(s.count_hidden(), 1u);
  EXPECT_TRUE(s.at({4, 4}).is_hidden());
  for (Cell n : neighbors({4, 4}, d))
    if (n != Cell{4, 4}) {
      EXPECT_EQ(s.at(n), CellValue::clue(1));
    }
}

TEST(FloodReveal, StartOnMineShowsOnlyIt) {
  const GridDims d(5, 5);
  MineAssignment m(d, {{2, 2}});
  const GridState s = flood_reveal(m, GridState(d), {2, 2});
  EXPECT_TRUE(s.at({2, 2}).is_shown_mine());
  EXPECT_EQ(s.count_hidden(), d.size() - 1);
}

TEST(FloodReveal, LifoAndFifoReachTheSameState) {
  Rng rng(Seed{11});
  for (int trial = 0; trial < 200; ++trial) {
    const GridDims d(5 + static_cast<int>(rng.uniform_below(20)), 5 + static_cast<int>(rng.uniform_below(20)));
    MineAssignment m(d);
    for (std::size_t i = 0; i < d.size(); ++i)
      if (rng.bernoulli(0.08)) m.add_mine(d.cell(i));
    const Cell start = d.cell(rng.uniform_below(d.size()));
    const GridState a = flood_reveal(m, GridState(d), start, FloodOrder::lifo);
    const GridState b = flood_reveal(m, GridState(d), start, FloodOrder::fifo);
    EXPECT_EQ(a, b);
    EXPECT_TRUE(is_consistent(m, a));
  }
}

TEST(FloodReveal, StatsCountEachRevealOnce) {
  const GridDims d(30, 30);
  MineAssignment m(d, {{10, 10}, {20, 5}});
  GridState s(d);
  FloodStats stats;
  const std::size_t revealed = flood_reveal_in_place(m, s, {0, 0}, FloodOrder::lifo, &stats);
  EXPECT_EQ(revealed, d.size() - 2);
  EXPECT_EQ(stats.revealed, revealed);
  EXPECT_GE(stats.pops, revealed);
}

TEST(IsSolved, Examples) {
  const GridDims d(4, 4);
  MineAssignment empty(d);
  EXPECT_FALSE(is_solved(empty, GridState(d)));

  const CanonicalPatterns canon = canonical_p1_p2();
  GridState s = canon.s_min;
  for (Cell c : s.hidden_cells())
    if (!canon.board.is_mine(c)) s.set(c, CellValue::clue(clue_value(canon.board, c)));
  EXPECT_TRUE(is_solved(canon.board, s));
  EXPECT_FALSE(is_solved(canon.board, canon.s_min));
}

TEST(TextFormat, RoundTrips) {
  const MineAssignment m = mines_from_text("3 4\n*..*\n....\n.*..\n");
  EXPECT_EQ(m.mine_count(), 3u);
  EXPECT_TRUE(m.is_mine({2, 1}));
  EXPECT_EQ(mines_from_text(to_text(m)), m);

  const GridState s = state_from_text("2 3\n#01\nF!8\n");
  EXPECT_TRUE(s.at({0, 0}).is_hidden());
  EXPECT_TRUE(s.at({1, 0}).is_flag());
  EXPECT_TRUE(s.at({1, 1}).is_shown_mine());
  EXPECT_EQ(s.at({1, 2}), CellValue::clue(8));
  EXPECT_EQ(state_from_text(to_text(s)), s);
}

TEST(TextFormat, MalformedInputIsAParseError) {
  EXPECT_THROW(mines_from_text("2 2\n..\n"), ParseError);
  EXPECT_THROW(mines_from_text("2 2\n.x\n..\n"), ParseError);
  EXPECT_THROW(mines_from_text("2 2\n...\n..\n"), ParseError);
  EXPECT_THROW(mines_from_text("two 2\n..\n..\n"), ParseError);
  EXPECT_THROW(state_from_text("1 2\n#9\n"), ParseError);
}
