#pragma once

// The ten acceptance criteria, each run at its stated size and tolerance with
// a fixed master seed. Shared by the acceptance test binary and `verify`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mines_phase/ambiguity.hpp"
#include "mines_phase/experiments.hpp"
#include "mines_phase/inference.hpp"
#include "mines_phase/oracles.hpp"
#include "mines_phase/patterns.hpp"
#include "mines_phase/random_gen.hpp"
#include "mines_phase/solver.hpp"

namespace mines_phase::acceptance {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;
inline constexpr int kCriterionCount = 10;

struct Options {
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// "PASS  3  title: detail (12.3s)"
inline std::string format_line(const CriterionResult& r) {
  char head[32];
  std::snprintf(head, sizeof head, "%s %2d ", r.pass ? "PASS" : "FAIL", r.id);
  char tail[32];
  std::snprintf(tail, sizeof tail, " (%.1fs)", r.seconds);
  return head + r.title + ": " + r.detail + tail;
}

namespace detail {

inline std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// The opening flood from (0,0) left most of the board hidden, either because
// the corner clue is nonzero or because its zero region is sealed off.
inline bool opening_is_trapped(const MineAssignment& m) {
  return 2 * initial_state(m).count_hidden() > m.dims().size();
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

inline CriterionResult enumeration(const Options& opts) {
  CriterionResult r{1, "ambiguous patterns with at most 6 mines are exactly P1 and P2", false, "", 0};
  EnumerateOptions eo;
  eo.threads = opts.threads;
  const auto t0 = std::chrono::steady_clock::now();
  const auto five = enumerate_ambiguous(5, eo);
  EnumerationStats stats;
  eo.stats = &stats;
  const auto six = enumerate_ambiguous(6, eo);
  const double elapsed = detail::seconds_since(t0);
  const CanonicalPatterns canon = canonical_p1_p2();
  std::vector<Pattern> expected{canon.p1, canon.p2};
  std::sort(expected.begin(), expected.end());
  r.pass = five.empty() && six == expected && elapsed <= 1800.0;
  std::ostringstream os;
  os << "max5 count=" << five.size() << ", max6 count=" << six.size() << (six == expected ? " (P1, P2)" : " (unexpected set)")
     << ", " << stats.candidates << " clusters, " << detail::fmt("%.0fs of 1800s budget", elapsed);
  r.detail = os.str();
  return r;
}

inline CriterionResult witness(const Options&) {
  CriterionResult r{2, "single extra mine makes P1 non-ambiguous", false, "", 0};
  const auto t0 = std::chrono::steady_clock::now();
  const WitnessReport w = non_monotone_witness();
  const double elapsed = detail::seconds_since(t0);
  r.pass = !w.witnesses.empty() && elapsed <= 60.0;
  std::ostringstream os;
  os << w.witnesses.size() << " witnesses among " << w.candidates_tested << " cells, first " << w.cell << ", "
     << detail::fmt("%.2fs", elapsed);
  r.detail = os.str();
  return r;
}

inline CriterionResult coin_flips(const Options& opts) {
  CriterionResult r{3, "planted coin-flip islands succeed with rate 2^-k", true, "", 0};
  const double tolerance[] = {0.02, 0.015, 0.012, 0.01};
  std::ostringstream os;
  for (int k = 1; k <= 4; ++k) {
    const Lemma4Result res = run_lemma4(k, 10'000, Seed{opts.seed}.derive(static_cast<std::uint64_t>(k)), opts.threads);
    const bool ok = std::abs(res.rate - res.expected) <= tolerance[k - 1];
    r.pass = r.pass && ok;
    os << (k > 1 ? ", " : "") << "k=" << k << ' ' << detail::fmt("%.4f", res.rate) << (ok ? "" : " (out of tolerance)");
  }
  r.detail = os.str();
  return r;
}

inline CriterionResult oracle_equivalence(const Options& opts) {
  CriterionResult r{4, "fast algorithms agree with brute-force oracles", false, "", 0};
  Rng rng(Seed{opts.seed}.derive(4));

  std::size_t inference_mismatch = 0;
  for (int i = 0; i < 1000; ++i) {
    const GridState s = oracle::random_state(rng, 16);
    const oracle::NaiveClassification naive = oracle::classify(s);
    const InferenceReport fast = classify_hidden(s);
    std::vector<HiddenClass> fast_cls;
    for (Cell c : naive.hidden) {
      auto in = [&](const std::vector<Cell>& v) { return std::binary_search(v.begin(), v.end(), c); };
      fast_cls.push_back(in(fast.always_mine) ? HiddenClass::always_mine
                                              : (in(fast.never_mine) ? HiddenClass::never_mine : HiddenClass::two_way));
    }
    const std::uint64_t free_factor = std::uint64_t{1} << fast.unconstrained.size();
    if (fast_cls != naive.cls || fast.completion_count * free_factor != naive.assignments) ++inference_mismatch;
  }

  std::size_t occurrence_mismatch = 0;
  const CanonicalPatterns canon = canonical_p1_p2();
  const auto [vertical, horizontal] = domino_patterns();
  for (int i = 0; i < 100; ++i) {
    const double p = 0.02 + 0.2 * rng.uniform01();
    MineAssignment m = sample_iid(GridDims(64, 64), p, Seed{rng()});
    // Plant a couple of P1/P2 frames so the six-mine patterns have hits too.
    for (int j = 0; j < 2; ++j) {
      const Cell a{static_cast<int>(rng.uniform_below(57)), static_cast<int>(rng.uniform_below(57))};
      const Pattern& pat = rng.bernoulli(0.5) ? canon.p1 : canon.p2;
      for (int dr = 0; dr < 8; ++dr)
        for (int dc = 0; dc < 8; ++dc) m.remove_mine({a.row + dr, a.col + dc});
      plant(m, pat, a);
    }
    for (const Pattern* pat : {&canon.p1, &canon.p2, &vertical, &horizontal})
      if (occurrences(m, *pat) != oracle::occurrences(m, *pat)) ++occurrence_mismatch;
  }

  std::size_t window_mismatch = 0;
  for (int i = 0; i < 10; ++i) {
    const MineAssignment m = sample_iid(GridDims(300, 300), 0.005 + 0.03 * rng.uniform01(), Seed{rng()});
    if (window_mine_max(m, 100) != oracle::window_max(m, 100)) ++window_mismatch;
  }

  r.pass = inference_mismatch == 0 && occurrence_mismatch == 0 && window_mismatch == 0;
  std::ostringstream os;
  os << "inference " << inference_mismatch << "/1000, occurrences " << occurrence_mismatch << "/400, window max "
     << window_mismatch << "/10 mismatches";
  r.detail = os.str();
  return r;
}

inline CriterionResult surrogate_counts(const Options& opts) {
  CriterionResult r{5, "domino counts match the exact expectation with Poisson dispersion", false, "", 0};
  const auto [vertical, horizontal] = domino_patterns();
  const PatternCountReport rep =
      run_pattern_counts(GridDims(256, 256), 0.05, {vertical, horizontal}, 2000, Seed{opts.seed}.derive(5), opts.threads);
  const CountStats& s = rep.stats[0];
  const double z = (s.mean - s.expected) / s.std_error;
  r.pass = std::abs(z) <= 3.0 && s.dispersion >= 0.9 && s.dispersion <= 1.1;
  std::ostringstream os;
  os << "mean " << detail::fmt("%.3f", s.mean) << " vs exact " << detail::fmt("%.3f", s.expected) << " ("
     << detail::fmt("%+.2f SE", z) << "), dispersion " << detail::fmt("%.3f", s.dispersion) << ", correlation with horizontal "
     << detail::fmt("%+.3f", rep.correlation);
  r.detail = os.str();
  return r;
}

inline CriterionResult below_criticality(const Options& opts) {
  CriterionResult r{6, "512x512 at p=0.01 is solved below criticality", false, "", 0};
  SweepConfig cfg;
  cfg.dims = GridDims(512, 512);
  cfg.p_values = {0.01};
  cfg.trials = 300;
  cfg.seed = Seed{opts.seed}.derive(6);
  cfg.threads = opts.threads;
  const SweepResult res = run_sweep(cfg);
  const SweepRow& row = res.rows[0];
  std::size_t hit_safe_corner = 0, oversized_trapped_start = 0;
  for (const TrialRecord& t : res.trials) {
    if (t.verdict == Verdict::hit_mine && !t.corner_mine) ++hit_safe_corner;
    if (t.verdict == Verdict::gave_up_oversized &&
        detail::opening_is_trapped(sample_iid(cfg.dims, t.p, Seed{t.seed})))
      ++oversized_trapped_start;
  }
  r.pass = row.solve_rate >= 0.97 && row.gave_up_oversized == 0 && hit_safe_corner == 0;
  std::ostringstream os;
  os << "solve rate " << detail::fmt("%.4f", row.solve_rate) << " (need >= 0.97), HitMine " << row.hit_mine << " ("
     << hit_safe_corner << " with a safe corner), GaveUpOversized " << row.gave_up_oversized << " (need 0; "
     << oversized_trapped_start << " opened less than half the board from the corner), GaveUpAmbiguous "
     << row.gave_up_ambiguous;
  r.detail = os.str();
  return r;
}

inline CriterionResult linear_time(const Options& opts) {
  CriterionResult r{7, "play runs in linear time", false, "", 0};
  const int sides[] = {256, 512, 1024};
  constexpr int boards = 5, repeats = 3;
  double median_seconds[3];
  bool touches_ok = true;
  double worst_touch_ratio = 0.0;
  for (int k = 0; k < 3; ++k) {
    const GridDims dims(sides[k], sides[k]);
    std::vector<double> per_board;
    for (int b = 0; b < boards; ++b) {
      const MineAssignment m = sample_iid(dims, 0.005, Seed{opts.seed}.derive(static_cast<std::uint64_t>(700 + 10 * k + b)));
      double best = 1e300;
      PlayOutcome out;
      for (int rep = 0; rep < repeats; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        out = play(m);
        best = std::min(best, detail::seconds_since(t0));
      }
      per_board.push_back(best);
      const double ratio = static_cast<double>(out.cell_touches) / static_cast<double>(dims.size());
      worst_touch_ratio = std::max(worst_touch_ratio, ratio);
      touches_ok = touches_ok && out.cell_touches <= 9 * dims.size();
    }
    std::sort(per_board.begin(), per_board.end());
    median_seconds[k] = per_board[boards / 2];
  }
  const double ratio1 = median_seconds[1] / median_seconds[0];
  const double ratio2 = median_seconds[2] / median_seconds[1];
  r.pass = ratio1 <= 2.5 && ratio2 <= 2.5 && touches_ok;
  std::ostringstream os;
  os << "time ratio per 4x cells " << detail::fmt("%.2f", ratio1) << ", " << detail::fmt("%.2f", ratio2)
     << " (need <= 2.5), ns/cell " << detail::fmt("%.1f", median_seconds[0] * 1e9 / 65536.0) << ", "
     << detail::fmt("%.1f", median_seconds[1] * 1e9 / 262144.0) << ", "
     << detail::fmt("%.1f", median_seconds[2] * 1e9 / 1048576.0) << ", max touches/n "
     << detail::fmt("%.2f", worst_touch_ratio) << " (need <= 9)";
  r.detail = os.str();
  return r;
}

inline CriterionResult process_correctness(const Options& opts) {
  CriterionResult r{8, "process bookkeeping and tau detection are exact", false, "", 0};
  const GridDims dims(64, 64);
  const auto [vertical, horizontal] = domino_patterns();
  ProcessState state(dims, 16, {vertical, horizontal});
  Rng rng(Seed{opts.seed}.derive(8));
  std::size_t occurrence_mismatch = 0, window_mismatch = 0, steps = 0;
  while (state.t() < dims.size() / 2) {
    state.step(rng);
    ++steps;
    for (std::size_t k = 0; k < state.patterns().size(); ++k)
      if (state.occurrence_anchors(k) != occurrences(state.board(), state.patterns()[k])) ++occurrence_mismatch;
    if (state.window_max() != window_mine_max(state.board(), 16)) ++window_mismatch;
  }

  const CanonicalPatterns canon = canonical_p1_p2();
  std::size_t tau_mismatch = 0, unsolved_samples = 0, samples = 0;
  for (int i = 0; i < 100; ++i) {
    Rng srng(Seed{opts.seed}.derive(800 + static_cast<std::uint64_t>(i)));
    const Pattern& pat = srng.bernoulli(0.5) ? canon.p1 : canon.p2;
    const std::size_t tau = 6 + srng.uniform_below(40);
    HittingTimeConfig cfg;
    cfg.dims = dims;
    cfg.planted = planted_schedule(dims, pat, tau, srng.uniform_below(10), srng);
    const ProcessExperimentRecord rec = run_hitting_time(cfg);
    if (!rec.detector_agrees || rec.tau != tau) ++tau_mismatch;
    for (const SampledVerdict& v : rec.verdicts) {
      ++samples;
      if (v.verdict != Verdict::solved) ++unsolved_samples;
    }
  }
  r.pass = occurrence_mismatch == 0 && window_mismatch == 0 && tau_mismatch == 0 && unsolved_samples == 0;
  std::ostringstream os;
  os << steps << " steps: occurrence mismatches " << occurrence_mismatch << ", window mismatches " << window_mismatch
     << "; planted tau mismatches " << tau_mismatch << "/100, unsolved boards before tau " << unsolved_samples << "/"
     << samples;
  r.detail = os.str();
  return r;
}

inline CriterionResult island_structure(const Options& opts) {
  CriterionResult r{9, "islands at 512x512, p=0.01 are connected and fit 100x100", false, "", 0};
  const GridDims dims(512, 512);
  std::vector<std::uint8_t> disconnected(100, 0), oversized(100, 0), trapped(100, 0);
  std::vector<std::size_t> island_count(100, 0);
  parallel_for(100, opts.threads, [&](std::size_t i) {
    const MineAssignment m = sample_iid(dims, 0.01, Seed{opts.seed}.derive(900 + i));
    trapped[i] = detail::opening_is_trapped(m);
    const std::vector<Island> islands = decompose_islands(initial_state(m), &m);
    island_count[i] = islands.size();
    for (const Island& island : islands) {
      if (!island_adjacency_graph(island, m).is_connected()) disconnected[i] = 1;
      if (island.box.rows > 100 || island.box.cols > 100) oversized[i] = 1;
    }
  });
  std::size_t bad = 0, bad_open_start = 0, disconnected_boards = 0, oversized_boards = 0, total_islands = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    total_islands += island_count[i];
    disconnected_boards += disconnected[i];
    oversized_boards += oversized[i];
    if (disconnected[i] || oversized[i]) {
      ++bad;
      bad_open_start += trapped[i] ? 0 : 1;
    }
  }
  r.pass = bad == 0;
  std::ostringstream os;
  os << bad << "/100 boards violate (" << disconnected_boards << " with a disconnected island, " << oversized_boards
     << " with an island over 100x100; " << bad - bad_open_start
     << " of them opened less than half the board from the corner); " << total_islands << " islands in total";
  r.detail = os.str();
  return r;
}

inline CriterionResult reproducibility(const Options& opts) {
  CriterionResult r{10, "degenerate sweep endpoints are exact and output is thread-independent", false, "", 0};
  SweepConfig cfg;
  cfg.dims = GridDims(64, 64);
  cfg.p_values = {0.0, 1.0};
  cfg.trials = 50;
  cfg.seed = Seed{opts.seed}.derive(10);
  const SweepResult ends = run_sweep(cfg);
  const bool endpoints = ends.rows[0].solve_rate == 1.0 && ends.rows[1].solve_rate == 0.0;

  auto render = [&](unsigned threads) {
    SweepConfig c = cfg;
    c.p_values = {0.0, 0.01, 0.03, 0.06, 1.0};
    c.trials = 40;
    c.threads = threads;
    const SweepResult res = run_sweep(c);
    std::ostringstream os;
    write_sweep_csv(os, res);
    write_trials_jsonl(os, res);
    write_plot_data(os, res);
    const auto [vertical, horizontal] = domino_patterns();
    const PatternCountReport counts = run_pattern_counts(GridDims(96, 96), 0.05, {vertical, horizontal}, 40, c.seed, threads);
    for (const auto& row : counts.counts) os << row[0] << ' ' << row[1] << '\n';
    const Lemma4Result l4 = run_lemma4(2, 200, c.seed, threads);
    os << l4.successes << ' ' << l4.total_guesses << '\n';
    return os.str();
  };
  const std::string single = render(1);
  const bool same_again = render(1) == single;
  const bool same_threads = render(4) == single && render(3) == single;
  r.pass = endpoints && same_again && same_threads;
  std::ostringstream os;
  os << "p=0 rate " << ends.rows[0].solve_rate << ", p=1 rate " << ends.rows[1].solve_rate << ", rerun "
     << (same_again ? "identical" : "DIFFERENT") << ", threads 1/3/4 " << (same_threads ? "identical" : "DIFFERENT") << " ("
     << single.size() << " bytes)";
  r.detail = os.str();
  return r;
}

inline CriterionResult run(int id, const Options& opts) {
  static const std::function<CriterionResult(const Options&)> table[kCriterionCount] = {
      enumeration,      witness,      coin_flips,         oracle_equivalence, surrogate_counts,
      below_criticality, linear_time, process_correctness, island_structure,  reproducibility};
  if (id < 1 || id > kCriterionCount) throw ContractViolation("criterion id must be 1.." + std::to_string(kCriterionCount));
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r = table[id - 1](opts);
  r.seconds = detail::seconds_since(t0);
  return r;
}

}  // namespace mines_phase::acceptance
