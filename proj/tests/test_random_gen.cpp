#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "mines_phase/experiments.hpp"
#include "mines_phase/oracles.hpp"
#include "mines_phase/random_gen.hpp"

using namespace mines_phase;

namespace {

// Pearson statistic of `counts` against a uniform distribution over `cells` outcomes.
double chi_square_uniform(const std::map<std::uint64_t, std::size_t>& counts, std::size_t cells, std::size_t total) {
  const double expected = static_cast<double>(total) / static_cast<double>(cells);
  double stat = 0.0;
  std::size_t seen = 0;
  for (const auto& [key, n] : counts) {
    stat += (static_cast<double>(n) - expected) * (static_cast<double>(n) - expected) / expected;
    ++seen;
  }
  stat += static_cast<double>(cells - seen) * expected;  // outcomes never drawn
  return stat;
}

std::uint64_t mask_of(const MineAssignment& m) {
  std::uint64_t mask = 0;
  for (Cell c : m.mines()) mask |= std::uint64_t{1} << m.dims().index(c);
  return mask;
}

// The process at step t should be a uniform t-subset. Covers both the
// rejection branch (t <= n/2) and the scan branch (t > n/2).
void check_uniform_subsets(std::size_t t, std::size_t subsets, std::uint64_t seed) {
  const GridDims d(4, 4);
  const std::size_t trials = 100'000;
  std::map<std::uint64_t, std::size_t> counts;
  Rng rng(Seed{seed});
  for (std::size_t i = 0; i < trials; ++i) {
    ProcessState s(d, 0);
    while (s.t() < t) s.step(rng);
    ++counts[mask_of(s.board())];
  }
  EXPECT_EQ(counts.size(), subsets);
  const double dof = static_cast<double>(subsets - 1);
  // Chi-square with k degrees of freedom: mean k, sd sqrt(2k). Allow 5 sd.
  EXPECT_LT(chi_square_uniform(counts, subsets, trials), dof + 5.0 * std::sqrt(2.0 * dof));
}

}  // namespace

TEST(SampleIid, Endpoints) {
  const GridDims d(17, 23);
  EXPECT_EQ(sample_iid(d, 0.0, Seed{1}).mine_count(), 0u);
  EXPECT_EQ(sample_iid(d, 1.0, Seed{1}).mine_count(), d.size());
  EXPECT_THROW(sample_iid(d, 1.5, Seed{1}), ContractViolation);
  EXPECT_THROW(sample_iid(d, -0.1, Seed{1}), ContractViolation);
}

TEST(SampleIid, DeterministicPerSeed) {
  const GridDims d(64, 64);
  EXPECT_EQ(sample_iid(d, 0.1, Seed{9}), sample_iid(d, 0.1, Seed{9}));
  EXPECT_NE(sample_iid(d, 0.1, Seed{9}), sample_iid(d, 0.1, Seed{10}));
}

TEST(SampleIid, MineCountIsBinomial) {
  const GridDims d(100, 100);
  const double p = 0.03;
  const int trials = 400;
  double sum = 0.0;
  for (int i = 0; i < trials; ++i) sum += static_cast<double>(sample_iid(d, p, Seed{3}.derive(static_cast<std::uint64_t>(i))).mine_count());
  const double n = static_cast<double>(d.size());
  const double se = std::sqrt(n * p * (1 - p) / trials);
  EXPECT_NEAR(sum / trials, n * p, 4 * se);
}

TEST(SampleAugmented, Examples) {
  const GridDims d(40, 40);
  EXPECT_EQ(sample_augmented(MineAssignment(d), 0.2, Seed{4}), sample_iid(d, 0.2, Seed{4}));
  const MineAssignment base = sample_iid(d, 0.1, Seed{5});
  EXPECT_EQ(sample_augmented(base, 0.0, Seed{6}), base);

  const int trials = 300;
  double sum = 0.0;
  for (int i = 0; i < trials; ++i) {
    const MineAssignment m = sample_augmented(base, 0.5, Seed{7}.derive(static_cast<std::uint64_t>(i)));
    for (Cell c : base.mines()) ASSERT_TRUE(m.is_mine(c));
    sum += static_cast<double>(m.mine_count());
  }
  const double k = static_cast<double>(base.mine_count());
  const double free_cells = static_cast<double>(d.size()) - k;
  EXPECT_NEAR(sum / trials, k + free_cells / 2, 3 * std::sqrt(free_cells / 4 / trials));
}

TEST(WindowMineMax, Examples) {
  EXPECT_EQ(window_mine_max(MineAssignment(GridDims(120, 120))), 0);
  const MineAssignment p1 = embed(canonical_p1_p2().p1, GridDims(120, 120), {50, 60});
  EXPECT_EQ(window_mine_max(p1), 6);
  EXPECT_EQ(window_mine_max(p1, 1), 1);
  EXPECT_THROW(window_mine_max(p1, 121), ContractViolation);
  EXPECT_THROW(window_mine_max(p1, 0), ContractViolation);
}

TEST(WindowMineMax, AgreesWithFullScan) {
  Rng rng(Seed{19});
  for (int trial = 0; trial < 40; ++trial) {
    const GridDims d(10 + static_cast<int>(rng.uniform_below(40)), 10 + static_cast<int>(rng.uniform_below(40)));
    const MineAssignment m = sample_iid(d, 0.3 * rng.uniform01(), Seed{rng()});
    const int w = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(std::min(d.rows, d.cols))));
    EXPECT_EQ(window_mine_max(m, w), oracle::window_max(m, w));
  }
}

TEST(BorderClearance, Examples) {
  EXPECT_EQ(border_clearance(MineAssignment(GridDims(10, 10), {{0, 5}})), 0);
  EXPECT_EQ(border_clearance(MineAssignment(GridDims(301, 301), {{150, 150}})), 150);
  EXPECT_FALSE(border_clearance(MineAssignment(GridDims(10, 10))).has_value());
  EXPECT_EQ(border_clearance(MineAssignment(GridDims(10, 20), {{4, 15}, {5, 9}})), 4);
}

TEST(Kappa, Values) {
  EXPECT_EQ(kappa(0), 0);
  EXPECT_EQ(kappa(1), 1);
  EXPECT_EQ(kappa(1 << 20), std::llround(std::pow(1048576.0, 71.0 / 84.0)));
  EXPECT_LT(kappa(1 << 20), (1 << 20) / 2);
  EXPECT_THROW(kappa(-1), ContractViolation);
}

TEST(Rng, SplitMixReferenceValues) {
  // First output of the reference SplitMix64 generator started from state 0.
  EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(Seed{5}.derive(3).master, splitmix64(5 ^ 3));
}

TEST(Rng, UniformBelowIsUnbiased) {
  Rng rng(Seed{123});
  std::map<std::uint64_t, std::size_t> counts;
  const std::size_t trials = 70'000;
  for (std::size_t i = 0; i < trials; ++i) ++counts[rng.uniform_below(7)];
  EXPECT_LT(chi_square_uniform(counts, 7, trials), 6 + 5 * std::sqrt(12.0));
}

TEST(ProcessState, FirstStepIsUniform) {
  const GridDims d(5, 5);
  std::map<std::uint64_t, std::size_t> counts;
  Rng rng(Seed{2});
  const std::size_t trials = 50'000;
  for (std::size_t i = 0; i < trials; ++i) {
    ProcessState s(d, 0);
    const Cell c = s.step(rng);
    ++counts[d.index(c)];
    EXPECT_EQ(s.occurrence_count(0) + s.occurrence_count(1), 0u);
  }
  EXPECT_LT(chi_square_uniform(counts, 25, trials), 24 + 5 * std::sqrt(48.0));
}

TEST(ProcessState, ThreeMinesFormAUniformSubset) { check_uniform_subsets(3, 560, 31); }

TEST(ProcessState, TwelveMinesFormAUniformSubset) { check_uniform_subsets(12, 1820, 32); }

TEST(ProcessState, ExchangeableOrder) {
  // Each ordered pair of distinct cells is equally likely as the first two events.
  const GridDims d(3, 3);
  std::map<std::uint64_t, std::size_t> counts;
  Rng rng(Seed{40});
  const std::size_t trials = 72'000;
  for (std::size_t i = 0; i < trials; ++i) {
    ProcessState s(d, 0);
    const Cell a = s.step(rng);
    const Cell b = s.step(rng);
    ++counts[d.index(a) * 9 + d.index(b)];
  }
  EXPECT_EQ(counts.size(), 72u);
  EXPECT_LT(chi_square_uniform(counts, 72, trials), 71 + 5 * std::sqrt(142.0));
}

TEST(ProcessState, IncrementalBookkeepingMatchesRescan) {
  const GridDims d(40, 40);
  const auto [vertical, horizontal] = domino_patterns();
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    ProcessState s(d, 12, {vertical, horizontal});
    Rng rng(Seed{seed});
    while (s.t() < d.size()) {
      s.step(rng);
      for (std::size_t k = 0; k < s.patterns().size(); ++k) {
        const auto anchors = oracle::occurrences(s.board(), s.patterns()[k]);
        ASSERT_EQ(s.occurrence_anchors(k), anchors) << "t=" << s.t() << " pattern " << k;
        ASSERT_EQ(s.occurrence_count(k), anchors.size());
      }
      ASSERT_EQ(s.window_max(), oracle::window_max(s.board(), 12)) << "t=" << s.t();
    }
    EXPECT_THROW(s.step(rng), ContractViolation);
  }
}

TEST(ProcessState, AddingInsideAFrameDestroysTheOccurrence) {
  const CanonicalPatterns canon = canonical_p1_p2();
  ProcessState s(GridDims(30, 30), 0);
  for (Cell m : canon.p1.mines()) s.add({10 + m.row, 10 + m.col});
  EXPECT_EQ(s.occurrence_count(0), 1u);
  EXPECT_EQ(s.tau(), 6u);
  EXPECT_TRUE(s.occurs_at(0, {10, 10}));
  s.add({10 + 3, 10 + 4});
  EXPECT_EQ(s.occurrence_count(0), 0u);
  EXPECT_FALSE(s.occurs_at(0, {10, 10}));
  EXPECT_EQ(s.tau(), 6u);  // the hitting time is not undone
  EXPECT_THROW(s.add({10 + 3, 10 + 4}), ContractViolation);
}

TEST(ProcessState, EventLogReplay) {
  const GridDims d(32, 32);
  ProcessState s(d, 16);
  Rng rng(Seed{77});
  for (int i = 0; i < 300; ++i) s.step(rng);
  std::stringstream log;
  s.write_events(log);
  const ProcessState r = ProcessState::replay(d, log, 16);
  EXPECT_EQ(r.board(), s.board());
  EXPECT_EQ(r.events(), s.events());
  EXPECT_EQ(r.window_max(), s.window_max());
  EXPECT_EQ(r.tau(), s.tau());

  std::istringstream bad_t("1 0 0\n3 0 1\n");
  EXPECT_THROW(ProcessState::replay(d, bad_t, 16), ParseError);
  std::istringstream bad_cell("1 40 0\n");
  EXPECT_THROW(ProcessState::replay(d, bad_cell, 16), ParseError);
  std::istringstream junk("1 0 0 x\n");
  EXPECT_THROW(ProcessState::replay(d, junk, 16), ParseError);
}

TEST(ProcessState, WindowLargerThanBoardIsRejected) {
  EXPECT_THROW(ProcessState(GridDims(20, 20), 21), ContractViolation);
  EXPECT_NO_THROW(ProcessState(GridDims(20, 20), 0));
}

TEST(PlantedSchedule, CompletesThePatternExactlyAtTau) {
  const CanonicalPatterns canon = canonical_p1_p2();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(Seed{seed});
    const std::size_t tau = 6 + rng.uniform_below(30);
    const PlantedSchedule sched = planted_schedule(GridDims(64, 64), seed % 2 ? canon.p1 : canon.p2, tau, 5, rng);
    ASSERT_EQ(sched.events.size(), tau + 5);
    ProcessState s(GridDims(64, 64), 0);
    for (std::size_t i = 0; i < sched.events.size(); ++i) {
      s.add(sched.events[i]);
      if (i + 1 < tau) {
        EXPECT_FALSE(s.tau().has_value());
      }
    }
    EXPECT_EQ(s.tau(), tau);
    EXPECT_EQ(s.occurrence_count(seed % 2 ? 0 : 1), 1u);
    EXPECT_TRUE(s.occurs_at(seed % 2 ? 0 : 1, sched.anchor));
  }
  Rng rng(Seed{1});
  EXPECT_THROW(planted_schedule(GridDims(64, 64), canon.p1, 5, 0, rng), ContractViolation);
  EXPECT_THROW(planted_schedule(GridDims(9, 9), canon.p1, 6, 0, rng), ContractViolation);
}
