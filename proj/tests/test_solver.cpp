#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "mines_phase/patterns.hpp"
#include "mines_phase/random_gen.hpp"
#include "mines_phase/solver.hpp"

using namespace mines_phase;

namespace {

// Union-find labelling of the non-zero cells, independent of the solver's.
std::vector<std::vector<Cell>> reference_islands(const GridState& s) {
  const GridDims d = s.dims();
  std::vector<std::size_t> parent(d.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto open = [&](std::size_t i) { return s.at_index(i) != CellValue::clue(0); };
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!open(i)) continue;
    for (Cell n : neighbors(d.cell(i), d))
      if (open(d.index(n))) parent[find(d.index(n))] = find(i);
  }
  std::map<std::size_t, std::vector<Cell>> groups;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (open(i)) groups[find(i)].push_back(d.cell(i));
  std::vector<std::vector<Cell>> out;
  for (auto& [root, cells] : groups) out.push_back(cells);
  std::sort(out.begin(), out.end());
  return out;
}

MineAssignment random_board(Rng& rng, int max_side, double max_p) {
  const GridDims d(4 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(max_side))),
                   4 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(max_side))));
  MineAssignment m = sample_iid(d, max_p * rng.uniform01(), Seed{rng()});
  m.remove_mine({0, 0});
  return m;
}

}  // namespace

TEST(Play, EmptyBoardIsSolvedByTheFirstClick) {
  const MineAssignment m(GridDims(20, 30));
  const PlayOutcome out = play(m);
  EXPECT_EQ(out.verdict, Verdict::solved);
  EXPECT_EQ(out.reveals, 600u);
  EXPECT_TRUE(out.islands.empty());
  EXPECT_EQ(out.guess_count, 0u);
}

TEST(Play, MinedCornerIsAnImmediateLoss) {
  const MineAssignment m(GridDims(10, 10), {{0, 0}});
  const PlayOutcome out = play(m);
  EXPECT_EQ(out.verdict, Verdict::hit_mine);
  EXPECT_EQ(out.reveals, 1u);
}

TEST(Play, PlantedP1IsAmbiguous) {
  const MineAssignment m = embed(canonical_p1_p2().p1, GridDims(40, 40), {16, 16});
  const PlayOutcome out = play(m);
  EXPECT_EQ(out.verdict, Verdict::gave_up_ambiguous);
  ASSERT_EQ(out.islands.size(), 1u);
  EXPECT_EQ(out.islands[0].verdict, Verdict::gave_up_ambiguous);
  EXPECT_EQ(out.islands[0].mines_inside, 6);
}

TEST(Play, PlantedNonAmbiguousClustersAreSolved) {
  // Singles, dominoes and L-trominoes scattered well inside the board.
  const std::vector<std::vector<Cell>> shapes{{{0, 0}}, {{0, 0}, {0, 1}}, {{0, 0}, {1, 0}, {1, 1}}, {{0, 0}, {2, 2}}};
  Rng rng(Seed{5});
  for (int trial = 0; trial < 30; ++trial) {
    const GridDims d(120, 120);
    MineAssignment m(d);
    for (int r = 10; r + 6 < d.rows; r += 12)
      for (int c = 10; c + 6 < d.cols; c += 12) {
        if (!rng.bernoulli(0.5)) continue;
        for (Cell x : shapes[rng.uniform_below(shapes.size())]) m.add_mine({r + x.row, c + x.col});
      }
    GridState final_state;
    PlayOptions opts;
    opts.final_state = &final_state;
    const PlayOutcome out = play(m, opts);
    EXPECT_EQ(out.verdict, Verdict::solved);
    EXPECT_TRUE(is_solved(m, final_state));
    EXPECT_EQ(out.guess_count, 0u);
  }
}

TEST(Play, OversizedIslandGivesUp) {
  const GridDims d(150, 150);
  MineAssignment m(d);
  for (int c = 10; c < 140; c += 2) m.add_mine({70, c});
  const PlayOutcome out = play(m);
  EXPECT_EQ(out.verdict, Verdict::gave_up_oversized);
  ASSERT_EQ(out.islands.size(), 1u);
  EXPECT_GT(out.islands[0].box.cols, 100);

  PlayOptions wide;
  wide.box_limit = 200;
  EXPECT_NE(play(m, wide).verdict, Verdict::gave_up_oversized);
}

TEST(Play, VerdictPriorityHitOverOversizedOverAmbiguous) {
  // An ambiguous P1 island next to an oversized row of mines.
  const GridDims d(150, 150);
  MineAssignment m = embed(canonical_p1_p2().p1, d, {20, 20});
  for (int c = 10; c < 140; c += 2) m.add_mine({100, c});
  EXPECT_EQ(play(m).verdict, Verdict::gave_up_oversized);
  m.add_mine({0, 0});
  EXPECT_EQ(play(m).verdict, Verdict::hit_mine);
}

TEST(Play, TraceGolden) {
  const MineAssignment m = mines_from_text("3 4\n....\n....\n...*\n");
  std::ostringstream trace;
  PlayOptions opts;
  opts.trace = &trace;
  const PlayOutcome out = play(m, opts);
  EXPECT_EQ(out.verdict, Verdict::solved);
  EXPECT_EQ(trace.str(),
            "REVEAL 0 0 -> 0\n"
            "REVEAL 1 1 -> 0\n"
            "REVEAL 2 2 -> 1\n"
            "REVEAL 2 1 -> 0\n"
            "REVEAL 2 0 -> 0\n"
            "REVEAL 1 0 -> 0\n"
            "REVEAL 0 1 -> 0\n"
            "REVEAL 1 2 -> 1\n"
            "REVEAL 0 2 -> 0\n"
            "REVEAL 1 3 -> 1\n"
            "REVEAL 0 3 -> 0\n"
            "VERDICT Solved\n");
}

TEST(Play, TraceListsEveryRevealOnce) {
  Rng rng(Seed{8});
  for (int trial = 0; trial < 40; ++trial) {
    const MineAssignment m = random_board(rng, 30, 0.12);
    std::ostringstream trace;
    GridState final_state;
    PlayOptions opts;
    opts.trace = &trace;
    opts.final_state = &final_state;
    const PlayOutcome out = play(m, opts);
    std::istringstream lines(trace.str());
    std::string line;
    std::size_t reveals = 0;
    std::string last;
    while (std::getline(lines, line)) {
      reveals += line.rfind("REVEAL", 0) == 0;
      last = line;
    }
    EXPECT_EQ(reveals, out.reveals);
    EXPECT_EQ(reveals, m.dims().size() - final_state.count_hidden());
    EXPECT_EQ(last, "VERDICT " + std::string(to_string(out.verdict)));
  }
}

TEST(Play, NoMineIsHitAfterTheFirstClick) {
  Rng rng(Seed{13});
  std::map<Verdict, int> seen;
  for (int trial = 0; trial < 400; ++trial) {
    const MineAssignment m = random_board(rng, 40, 0.2);
    GridState final_state;
    PlayOptions opts;
    opts.final_state = &final_state;
    const PlayOutcome out = play(m, opts);
    ++seen[out.verdict];
    EXPECT_NE(out.verdict, Verdict::hit_mine);
    EXPECT_TRUE(is_consistent(m, final_state));
    if (out.verdict == Verdict::solved) {
      EXPECT_TRUE(is_solved(m, final_state));
    }
  }
  EXPECT_GT(seen[Verdict::solved], 0);
  EXPECT_GT(seen[Verdict::gave_up_ambiguous], 0);
}

TEST(Play, IslandOrderDoesNotMatter) {
  Rng rng(Seed{21});
  int multi = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const MineAssignment m = random_board(rng, 60, 0.06);
    GridState base_state;
    PlayOptions base_opts;
    base_opts.final_state = &base_state;
    const PlayOutcome base = play(m, base_opts);
    multi += base.islands.size() > 1;
    for (std::uint64_t k = 0; k < 4; ++k) {
      GridState state;
      PlayOptions opts;
      opts.final_state = &state;
      opts.island_order_seed = Seed{k};
      const PlayOutcome out = play(m, opts);
      EXPECT_EQ(out.verdict, base.verdict);
      EXPECT_EQ(state, base_state);
      EXPECT_EQ(out.reveals, base.reveals);
    }
  }
  EXPECT_GT(multi, 10);
}

TEST(Play, CellTouchesStayBelowNineN) {
  for (double p : {0.0, 0.005, 0.01, 0.05, 0.2}) {
    const MineAssignment m = sample_iid(GridDims(200, 200), p, Seed{42});
    EXPECT_LE(play(m).cell_touches, 9 * m.dims().size()) << p;
  }
}

TEST(Play, Deterministic) {
  const MineAssignment m = sample_iid(GridDims(128, 128), 0.02, Seed{4});
  std::ostringstream a, b;
  PlayOptions oa, ob;
  oa.trace = &a;
  ob.trace = &b;
  play(m, oa);
  play(m, ob);
  EXPECT_EQ(a.str(), b.str());
}

TEST(PlayWithGuessing, MatchesPlayWhenNothingIsAmbiguous) {
  Rng rng(Seed{30});
  int compared = 0;
  for (int trial = 0; trial < 200 && compared < 40; ++trial) {
    const MineAssignment m = random_board(rng, 40, 0.08);
    const PlayOutcome plain = play(m);
    if (plain.verdict != Verdict::solved) continue;
    Rng g(Seed{static_cast<std::uint64_t>(trial)});
    const PlayOutcome guessed = play_with_guessing(m, g);
    EXPECT_EQ(guessed.verdict, Verdict::solved);
    EXPECT_EQ(guessed.guess_count, 0u);
    EXPECT_EQ(guessed.reveals, plain.reveals);
    ++compared;
  }
  EXPECT_EQ(compared, 40);
}

TEST(PlayWithGuessing, CoinFlipOnPlantedP1) {
  const CanonicalPatterns canon = canonical_p1_p2();
  int wins = 0;
  const int trials = 2000;
  for (int i = 0; i < trials; ++i) {
    Rng rng(Seed{555}.derive(static_cast<std::uint64_t>(i)));
    const MineAssignment m = embed(rng.bernoulli(0.5) ? canon.p1 : canon.p2, GridDims(40, 40), {16, 16});
    const PlayOutcome out = play_with_guessing(m, rng);
    EXPECT_GE(out.guess_count, 1u);
    EXPECT_TRUE(out.verdict == Verdict::solved || out.verdict == Verdict::hit_mine);
    wins += out.verdict == Verdict::solved;
  }
  // Binomial(2000, 1/2): 4 standard deviations is about 0.045.
  EXPECT_NEAR(static_cast<double>(wins) / trials, 0.5, 0.045);
}

TEST(DecomposeIslands, Examples) {
  const GridDims d(100, 100);
  MineAssignment empty(d);
  EXPECT_TRUE(decompose_islands(initial_state(empty)).empty());

  MineAssignment one(d, {{50, 50}});
  auto islands = decompose_islands(initial_state(one), &one);
  ASSERT_EQ(islands.size(), 1u);
  EXPECT_EQ(islands[0].cells.size(), 9u);
  EXPECT_EQ(islands[0].box.rows, 3);
  EXPECT_EQ(islands[0].box.cols, 3);
  EXPECT_EQ(islands[0].mines_inside, 1);
  EXPECT_EQ(islands[0].frontier, (std::vector<Cell>{{50, 50}}));

  MineAssignment two(d, {{20, 20}, {20, 70}});
  EXPECT_EQ(decompose_islands(initial_state(two)).size(), 2u);
}

TEST(DecomposeIslands, MatchesUnionFind) {
  Rng rng(Seed{17});
  for (int trial = 0; trial < 100; ++trial) {
    const MineAssignment m = random_board(rng, 50, 0.1);
    const GridState s = initial_state(m);
    const auto islands = decompose_islands(s, &m);
    std::vector<std::vector<Cell>> got;
    for (const Island& island : islands) {
      got.push_back(island.cells);
      int mines = 0;
      int r0 = island.cells[0].row, r1 = r0, c0 = island.cells[0].col, c1 = c0;
      for (Cell c : island.cells) {
        mines += m.is_mine(c);
        r0 = std::min(r0, c.row);
        r1 = std::max(r1, c.row);
        c0 = std::min(c0, c.col);
        c1 = std::max(c1, c.col);
      }
      EXPECT_EQ(island.mines_inside, mines);
      EXPECT_EQ(island.box.top, r0);
      EXPECT_EQ(island.box.left, c0);
      EXPECT_EQ(island.box.rows, r1 - r0 + 1);
      EXPECT_EQ(island.box.cols, c1 - c0 + 1);
    }
    EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
    EXPECT_EQ(got, reference_islands(s));
  }
}

TEST(AdjacencyGraph, Examples) {
  const GridDims d(60, 60);
  MineAssignment one(d, {{30, 30}});
  auto islands = decompose_islands(initial_state(one), &one);
  AdjacencyGraph g = island_adjacency_graph(islands.at(0), one);
  EXPECT_EQ(g.vertices.size(), 1u);
  EXPECT_TRUE(g.is_connected());

  MineAssignment pair(d, {{30, 30}, {30, 33}});
  islands = decompose_islands(initial_state(pair), &pair);
  ASSERT_EQ(islands.size(), 1u);
  g = island_adjacency_graph(islands[0], pair);
  EXPECT_EQ(g.edges.size(), 1u);
  EXPECT_TRUE(g.is_connected());

  AdjacencyGraph split;
  split.vertices = {{0, 0}, {10, 10}};
  EXPECT_FALSE(split.is_connected());
}

TEST(VerdictText, Names) {
  std::ostringstream os;
  os << Verdict::solved << ' ' << Verdict::hit_mine << ' ' << Verdict::gave_up_oversized << ' '
     << Verdict::gave_up_ambiguous;
  EXPECT_EQ(os.str(), "Solved HitMine GaveUpOversized GaveUpAmbiguous");
}
