#pragma once

// Monte Carlo experiments: probability sweeps, pattern-count statistics and
// criticality, process hitting times and persistence, and the planted
// coin-flip islands. Every trial derives its own seed from the master seed
// and its index, and results land in per-trial slots, so output does not
// depend on the thread count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mines_phase/grid.hpp"
#include "mines_phase/parallel.hpp"
#include "mines_phase/patterns.hpp"
#include "mines_phase/random_gen.hpp"
#include "mines_phase/rng.hpp"
#include "mines_phase/solver.hpp"

namespace mines_phase {

inline constexpr const char* kSchemaLine = "; mines-phase v1";

/// Ten significant digits. Every writer goes through here, so a value prints
/// the same way in CSV, plot data and reports.
inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

/// Half-width of the normal-approximation 95% interval for a proportion.
inline double proportion_ci(double rate, std::size_t trials) {
  if (trials == 0) return 0.0;
  return 1.96 * std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials));
}

/// Window side used by experiments: 100, or the board's short side if smaller.
inline int default_window(GridDims dims) { return std::min({100, dims.rows, dims.cols}); }

enum class SolverMode : std::uint8_t { inference, guessing };

struct SweepConfig {
  GridDims dims{64, 64};
  std::vector<double> p_values;
  std::size_t trials = 100;
  Seed seed;
  SolverMode mode = SolverMode::inference;
  unsigned threads = 1;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  double p = 0.0;
  Verdict verdict = Verdict::solved;
  std::size_t p1 = 0;
  std::size_t p2 = 0;
  int window_max = 0;
  std::optional<int> border_clearance;
  std::size_t guess_count = 0;
  bool corner_mine = false;
  double elapsed_ms = 0.0;
};

struct SweepRow {
  double p = 0.0;
  std::size_t trials = 0;
  double solve_rate = 0.0;
  double mean_p1 = 0.0;
  double mean_p2 = 0.0;
  double mean_window_max = 0.0;
  double ci = 0.0;
  std::size_t hit_mine = 0;
  std::size_t gave_up_oversized = 0;
  std::size_t gave_up_ambiguous = 0;
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepRow> rows;
  /// Grouped by p in config order, then by trial index.
  std::vector<TrialRecord> trials;
};

/// One board of a sweep: sample, play, and collect the board statistics.
inline TrialRecord run_trial(GridDims dims, double p, Seed seed, SolverMode mode) {
  const auto start = std::chrono::steady_clock::now();
  const MineAssignment m = sample_iid(dims, p, seed);
  TrialRecord rec;
  rec.seed = seed.master;
  rec.p = p;
  PlayOutcome outcome;
  if (mode == SolverMode::guessing) {
    Rng rng(seed.derive(1));
    outcome = play_with_guessing(m, rng);
  } else {
    outcome = play(m);
  }
  rec.verdict = outcome.verdict;
  rec.guess_count = outcome.guess_count;
  const CanonicalPatterns canon = canonical_p1_p2();
  rec.p1 = occurrences(m, canon.p1).size();
  rec.p2 = occurrences(m, canon.p2).size();
  rec.window_max = window_mine_max(m, default_window(dims));
  rec.border_clearance = border_clearance(m);
  rec.corner_mine = m.is_mine({0, 0});
  rec.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

inline SweepResult run_sweep(const SweepConfig& cfg) {
  if (cfg.trials < 1) throw ContractViolation("a sweep needs at least one trial");
  if (!std::is_sorted(cfg.p_values.begin(), cfg.p_values.end()))
    throw ContractViolation("sweep probabilities must be sorted ascending");
  for (double p : cfg.p_values) require_probability(p);

  SweepResult result{cfg, {}, std::vector<TrialRecord>(cfg.p_values.size() * cfg.trials)};
  parallel_for(result.trials.size(), cfg.threads, [&](std::size_t i) {
    const double p = cfg.p_values[i / cfg.trials];
    result.trials[i] = run_trial(cfg.dims, p, cfg.seed.derive(i), cfg.mode);
  });

  for (std::size_t k = 0; k < cfg.p_values.size(); ++k) {
    SweepRow row;
    row.p = cfg.p_values[k];
    row.trials = cfg.trials;
    std::size_t solved = 0, p1 = 0, p2 = 0;
    long long window = 0;
    for (std::size_t i = 0; i < cfg.trials; ++i) {
      const TrialRecord& t = result.trials[k * cfg.trials + i];
      solved += t.verdict == Verdict::solved;
      row.hit_mine += t.verdict == Verdict::hit_mine;
      row.gave_up_oversized += t.verdict == Verdict::gave_up_oversized;
      row.gave_up_ambiguous += t.verdict == Verdict::gave_up_ambiguous;
      p1 += t.p1;
      p2 += t.p2;
      window += t.window_max;
    }
    const auto n = static_cast<double>(cfg.trials);
    row.solve_rate = static_cast<double>(solved) / n;
    row.mean_p1 = static_cast<double>(p1) / n;
    row.mean_p2 = static_cast<double>(p2) / n;
    row.mean_window_max = static_cast<double>(window) / n;
    row.ci = proportion_ci(row.solve_rate, cfg.trials);
    result.rows.push_back(row);
  }
  return result;
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  os << kSchemaLine << '\n' << "p,solve_rate,mean_p1,mean_p2,mean_window_max,ci\n";
  for (const SweepRow& row : r.rows)
    os << format_number(row.p) << ',' << format_number(row.solve_rate) << ',' << format_number(row.mean_p1) << ','
       << format_number(row.mean_p2) << ',' << format_number(row.mean_window_max) << ',' << format_number(row.ci)
       << '\n';
}

inline nlohmann::ordered_json to_json(const TrialRecord& t, bool include_elapsed) {
  nlohmann::ordered_json j;
  j["seed"] = t.seed;
  j["p"] = t.p;
  j["verdict"] = std::string(to_string(t.verdict));
  j["p1"] = t.p1;
  j["p2"] = t.p2;
  j["window_max"] = t.window_max;
  j["border_clearance"] = t.border_clearance ? nlohmann::ordered_json(*t.border_clearance) : nlohmann::ordered_json();
  j["guess_count"] = t.guess_count;
  j["corner_mine"] = t.corner_mine;
  if (include_elapsed) j["elapsed_ms"] = t.elapsed_ms;
  return j;
}

/// Per-trial JSON lines after the schema line. Timing is left out unless
/// asked for, since it is the only field that changes between runs.
inline void write_trials_jsonl(std::ostream& os, const SweepResult& r, bool include_elapsed = false) {
  os << kSchemaLine << '\n';
  for (const TrialRecord& t : r.trials) os << to_json(t, include_elapsed).dump() << '\n';
}

inline void write_sweep_json(std::ostream& os, const SweepResult& r) {
  os << kSchemaLine << '\n';
  for (const SweepRow& row : r.rows) {
    nlohmann::ordered_json j;
    j["p"] = row.p;
    j["solve_rate"] = row.solve_rate;
    j["mean_p1"] = row.mean_p1;
    j["mean_p2"] = row.mean_p2;
    j["mean_window_max"] = row.mean_window_max;
    j["ci"] = row.ci;
    j["trials"] = row.trials;
    j["hit_mine"] = row.hit_mine;
    j["gave_up_oversized"] = row.gave_up_oversized;
    j["gave_up_ambiguous"] = row.gave_up_ambiguous;
    os << j.dump() << '\n';
  }
}

/// Plot data: x = p, y = solve rate, ci = interval half-width.
inline void write_plot_data(std::ostream& os, const SweepResult& r) {
  os << kSchemaLine << '\n' << "x,y,ci\n";
  for (const SweepRow& row : r.rows)
    os << format_number(row.p) << ',' << format_number(row.solve_rate) << ',' << format_number(row.ci) << '\n';
}

// ---------------------------------------------------------------------------
// Pattern counts and criticality

/// Vertical and horizontal two-mine dominoes: frequent patterns that stand
/// in for P1 and P2 when checking Poisson behavior at desk scale.
inline std::pair<Pattern, Pattern> domino_patterns() {
  return {Pattern(GridDims(6, 5), {{2, 2}, {3, 2}}), Pattern(GridDims(5, 6), {{2, 2}, {2, 3}})};
}

struct CountStats {
  double mean = 0.0;
  double variance = 0.0;
  /// Exact expectation for this board size.
  double expected = 0.0;
  /// variance / mean; 1 for a Poisson law.
  double dispersion = 0.0;
  /// Standard error of the mean.
  double std_error = 0.0;
};

struct PatternCountReport {
  GridDims dims{1, 1};
  double p = 0.0;
  std::size_t trials = 0;
  std::vector<Pattern> patterns;
  std::vector<CountStats> stats;
  /// counts[trial][pattern]
  std::vector<std::vector<std::size_t>> counts;
  /// Sample correlation of the first two patterns' counts (0 when undefined).
  double correlation = 0.0;
};

inline CountStats summarize_counts(const std::vector<double>& xs, double expected) {
  CountStats s;
  s.expected = expected;
  const auto n = static_cast<double>(xs.size());
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= n;
  if (xs.size() > 1) {
    for (double x : xs) s.variance += (x - s.mean) * (x - s.mean);
    s.variance /= n - 1.0;
  }
  s.dispersion = s.mean > 0.0 ? s.variance / s.mean : 0.0;
  s.std_error = std::sqrt(s.variance / n);
  return s;
}

inline double sample_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

inline PatternCountReport run_pattern_counts(GridDims dims, double p, std::vector<Pattern> patterns,
                                             std::size_t trials, Seed seed, unsigned threads = 1) {
  require_probability(p);
  PatternCountReport r;
  r.dims = dims;
  r.p = p;
  r.trials = trials;
  r.patterns = std::move(patterns);
  r.counts.assign(trials, std::vector<std::size_t>(r.patterns.size(), 0));
  parallel_for(trials, threads, [&](std::size_t i) {
    const MineAssignment m = sample_iid(dims, p, seed.derive(i));
    for (std::size_t k = 0; k < r.patterns.size(); ++k) r.counts[i][k] = occurrences(m, r.patterns[k]).size();
  });
  std::vector<std::vector<double>> columns(r.patterns.size(), std::vector<double>(trials));
  for (std::size_t i = 0; i < trials; ++i)
    for (std::size_t k = 0; k < r.patterns.size(); ++k) columns[k][i] = static_cast<double>(r.counts[i][k]);
  for (std::size_t k = 0; k < r.patterns.size(); ++k)
    r.stats.push_back(summarize_counts(columns[k], expected_occurrences(dims, p, r.patterns[k])));
  if (r.patterns.size() >= 2) r.correlation = sample_correlation(columns[0], columns[1]);
  return r;
}

struct CriticalityReport {
  double c = 0.0;
  double p = 0.0;
  /// The limiting Poisson parameter c^6.
  double limit_mean = 0.0;
  /// Exact expectation of P1 at this size divided by c^6.
  double finite_size_ratio = 0.0;
  /// True when the exact expectation is off from c^6 by more than 10%.
  bool finite_size_gap = false;
  PatternCountReport counts;
  double solve_rate = 0.0;
  double solve_ci = 0.0;
};

/// Counts P1 and P2 at p = c * n^(-1/6) and plays every board.
inline CriticalityReport run_criticality(GridDims dims, double c, std::size_t trials, Seed seed, unsigned threads = 1) {
  if (c < 0.0) throw ContractViolation("criticality constant must be non-negative");
  CriticalityReport r;
  r.c = c;
  r.p = std::min(1.0, c * std::pow(static_cast<double>(dims.size()), -1.0 / 6.0));
  r.limit_mean = std::pow(c, 6.0);
  const CanonicalPatterns canon = canonical_p1_p2();
  r.counts = run_pattern_counts(dims, r.p, {canon.p1, canon.p2}, trials, seed, threads);
  const double exact = r.counts.stats[0].expected;
  r.finite_size_ratio = r.limit_mean > 0.0 ? exact / r.limit_mean : 1.0;
  r.finite_size_gap = std::abs(r.finite_size_ratio - 1.0) > 0.1;

  std::vector<std::uint8_t> solved(trials, 0);
  parallel_for(trials, threads, [&](std::size_t i) {
    solved[i] = play(sample_iid(dims, r.p, seed.derive(i))).verdict == Verdict::solved;
  });
  r.solve_rate = trials ? static_cast<double>(std::count(solved.begin(), solved.end(), 1)) / static_cast<double>(trials) : 0.0;
  r.solve_ci = proportion_ci(r.solve_rate, trials);
  return r;
}

// ---------------------------------------------------------------------------
// Process experiments

struct SampledVerdict {
  std::size_t t = 0;
  Verdict verdict = Verdict::solved;
};

struct ProcessExperimentRecord {
  GridDims dims{1, 1};
  std::size_t steps = 0;
  std::optional<std::size_t> tau;
  /// Window maximum just before tau, or at the last step when tau was not reached.
  int window_max_pre_tau = 0;
  std::int64_t kappa = 0;
  /// Window maximum at t = kappa, when the run got that far.
  std::optional<int> window_max_at_kappa;
  std::vector<SampledVerdict> verdicts;
  /// Planted mode: the schedule's tau and whether the detector fired exactly there.
  std::optional<std::size_t> planted_tau;
  bool detector_agrees = true;
  /// Every added cell, in order.
  std::vector<Cell> events;
};

struct HittingTimeConfig {
  GridDims dims{64, 64};
  Seed seed;
  /// Natural mode stops here; defaults to n/2.
  std::optional<std::size_t> step_budget;
  /// Extra sample times; powers of two (and tau - 1 when planted) are always used.
  std::vector<std::size_t> t_samples;
  /// Window side; 0 means default_window(dims).
  int window = 0;
  /// Replay this schedule instead of drawing the process.
  std::optional<PlantedSchedule> planted;
};

inline bool is_power_of_two(std::size_t t) { return t != 0 && (t & (t - 1)) == 0; }

inline ProcessExperimentRecord run_hitting_time(const HittingTimeConfig& cfg) {
  const int window = cfg.window > 0 ? cfg.window : default_window(cfg.dims);
  ProcessState state(cfg.dims, window);
  ProcessExperimentRecord rec;
  rec.dims = cfg.dims;
  rec.kappa = kappa(static_cast<std::int64_t>(cfg.dims.size()));

  std::vector<std::size_t> extra = cfg.t_samples;
  if (cfg.planted && cfg.planted->tau > 0) extra.push_back(cfg.planted->tau - 1);
  auto sampled = [&](std::size_t t) { return t == 0 || is_power_of_two(t) || std::find(extra.begin(), extra.end(), t) != extra.end(); };
  auto observe = [&] {
    if (state.tau()) return;
    if (sampled(state.t())) rec.verdicts.push_back({state.t(), play(state.board()).verdict});
    if (static_cast<std::int64_t>(state.t()) == rec.kappa) rec.window_max_at_kappa = state.window_max();
    rec.window_max_pre_tau = state.window_max();
  };

  observe();
  if (cfg.planted) {
    rec.planted_tau = cfg.planted->tau;
    for (Cell c : cfg.planted->events) {
      state.add(c);
      observe();
    }
    rec.detector_agrees = state.tau() == cfg.planted->tau;
  } else {
    const std::size_t budget = cfg.step_budget.value_or(cfg.dims.size() / 2);
    Rng rng(cfg.seed);
    while (state.t() < budget && !state.tau()) {
      state.step(rng);
      observe();
    }
  }
  rec.steps = state.t();
  rec.tau = state.tau();
  rec.events = state.events();
  return rec;
}

/// P(no mine lands on any of `empties` fixed empty cells while the process
/// goes from t0 to end_t mines on n cells).
inline double frame_survival_probability(std::size_t n, std::size_t t0, std::size_t empties, std::size_t end_t) {
  double prob = 1.0;
  for (std::size_t t = t0; t < end_t; ++t) {
    const double free_cells = static_cast<double>(n - t);
    if (free_cells <= static_cast<double>(empties)) return 0.0;
    prob *= 1.0 - static_cast<double>(empties) / free_cells;
  }
  return prob;
}

struct MonotonicityConfig {
  GridDims dims{64, 64};
  Seed seed;
  /// Pattern planted at time t0 = its mine count (P1 when empty).
  std::optional<Pattern> pattern;
  /// Defaults to the board center.
  std::optional<Cell> anchor;
  /// Defaults to n/2.
  std::optional<std::size_t> end_t;
};

struct MonotonicityRecord {
  std::size_t t0 = 0;
  std::size_t end_t = 0;
  /// (t, P1 + P2 count) at t0 and geometrically spaced times up to end_t.
  std::vector<std::pair<std::size_t, std::size_t>> samples;
  /// Some P1/P2 occurrence is present at every sample.
  bool persistence = true;
  /// First t at which the planted occurrence was destroyed.
  std::optional<std::size_t> first_destruction;
};

inline MonotonicityRecord run_monotonicity(const MonotonicityConfig& cfg) {
  const Pattern pattern = cfg.pattern.value_or(canonical_p1_p2().p1);
  const GridDims frame = pattern.frame();
  if (frame.rows > cfg.dims.rows || frame.cols > cfg.dims.cols) throw ContractViolation("board smaller than the pattern frame");
  const Cell anchor = cfg.anchor.value_or(Cell{(cfg.dims.rows - frame.rows) / 2, (cfg.dims.cols - frame.cols) / 2});

  ProcessState state(cfg.dims, 0, {pattern});
  const std::size_t planted_index = 2;
  for (Cell m : pattern.mines()) state.add({anchor.row + m.row, anchor.col + m.col});

  MonotonicityRecord rec;
  rec.t0 = state.t();
  rec.end_t = std::max(rec.t0, cfg.end_t.value_or(cfg.dims.size() / 2));
  if (rec.end_t > cfg.dims.size()) throw ContractViolation("end time beyond a full board");
  auto present = [&] { return state.occurrence_count(0) + state.occurrence_count(1); };
  auto sample = [&] {
    rec.samples.emplace_back(state.t(), present());
    if (present() == 0) rec.persistence = false;
  };
  sample();
  Rng rng(cfg.seed);
  std::size_t next_sample = 1;
  while (state.t() < rec.end_t) {
    state.step(rng);
    if (!rec.first_destruction && !state.occurs_at(planted_index, anchor)) rec.first_destruction = state.t();
    if (state.t() - rec.t0 == next_sample || state.t() == rec.end_t) {
      sample();
      while (next_sample <= state.t() - rec.t0) next_sample *= 2;
    }
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Planted coin-flip islands

struct Lemma4Result {
  int k = 0;
  GridDims dims{1, 1};
  std::size_t trials = 0;
  std::size_t successes = 0;
  double rate = 0.0;
  double ci = 0.0;
  /// 2^-k.
  double expected = 1.0;
  std::size_t total_guesses = 0;
};

/// 48 rows by 200(k-1)+48 columns (48 x 48 for k = 0).
inline GridDims lemma4_dims(int k) {
  if (k < 0) throw ContractViolation("k must be non-negative");
  return GridDims(48, 200 * std::max(k - 1, 0) + 48);
}

/// Anchors (20, 20 + 200 i) of the planted frames.
inline std::vector<Cell> lemma4_anchors(int k) {
  std::vector<Cell> out;
  for (int i = 0; i < k; ++i) out.push_back({20, 20 + 200 * i});
  return out;
}

/// Plants k independent fair choices of P1 or P2 and plays with guessing.
inline Lemma4Result run_lemma4(int k, std::size_t trials, Seed seed, unsigned threads = 1,
                               std::optional<GridDims> dims = std::nullopt) {
  const GridDims board = dims.value_or(lemma4_dims(k));
  const std::vector<Cell> anchors = lemma4_anchors(k);
  const CanonicalPatterns canon = canonical_p1_p2();
  for (Cell a : anchors)
    if (a.row + canon.p1.frame().rows > board.rows || a.col + canon.p1.frame().cols > board.cols)
      throw ContractViolation("board too small for " + std::to_string(k) + " planted frames");

  std::vector<std::uint8_t> success(trials, 0);
  std::vector<std::size_t> guesses(trials, 0);
  parallel_for(trials, threads, [&](std::size_t i) {
    Rng rng(seed.derive(i));
    MineAssignment m(board);
    for (Cell a : anchors) plant(m, rng.bernoulli(0.5) ? canon.p1 : canon.p2, a);
    const PlayOutcome outcome = play_with_guessing(m, rng);
    success[i] = outcome.verdict == Verdict::solved;
    guesses[i] = outcome.guess_count;
  });

  Lemma4Result r;
  r.k = k;
  r.dims = board;
  r.trials = trials;
  r.successes = static_cast<std::size_t>(std::count(success.begin(), success.end(), 1));
  r.rate = trials ? static_cast<double>(r.successes) / static_cast<double>(trials) : 0.0;
  r.ci = proportion_ci(r.rate, trials);
  r.expected = std::ldexp(1.0, -k);
  for (std::size_t g : guesses) r.total_guesses += g;
  return r;
}

}  // namespace mines_phase
