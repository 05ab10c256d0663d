// mines_phase: command-line front end for boards, solving, pattern
// enumeration and the Monte Carlo experiments.
//
// Exit codes: 0 success, 1 verdict-level failure, 2 usage error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mines_phase/acceptance.hpp"
#include "mines_phase/ambiguity.hpp"
#include "mines_phase/experiments.hpp"
#include "mines_phase/grid.hpp"
#include "mines_phase/io.hpp"
#include "mines_phase/patterns.hpp"
#include "mines_phase/random_gen.hpp"
#include "mines_phase/solver.hpp"

namespace mp = mines_phase;
using json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Global {
  std::uint64_t seed = 1;
  int rows = 64;
  int cols = 64;
  unsigned threads = 1;
  std::string out;
  std::string format = "csv";

  mp::GridDims dims() const { return mp::GridDims(rows, cols); }
  bool json_output() const { return format == "json"; }
};

void emit(const Global& g, const std::function<void(std::ostream&)>& body) {
  if (g.out.empty()) {
    body(std::cout);
    std::cout.flush();
  } else {
    mp::write_file_atomic(g.out, body);
  }
}

template <typename T, typename Reader>
T read_file(const std::string& path, Reader reader) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return reader(in);
  } catch (const mp::ParseError& e) {
    throw mp::ParseError(path + ": " + e.what());
  }
}

mp::MineAssignment load_board(const std::string& path) {
  return read_file<mp::MineAssignment>(path, [](std::istream& in) { return mp::read_mines(in); });
}

/// Key=value lines, or one JSON object with --format json.
void emit_record(const Global& g, const json& record) {
  emit(g, [&](std::ostream& os) {
    if (g.json_output()) {
      os << record.dump() << '\n';
      return;
    }
    for (const auto& [key, value] : record.items())
      os << key << '=' << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
  });
}

std::string cells_text(const std::vector<mp::Cell>& cells) {
  std::ostringstream os;
  for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? ";" : "") << cells[i].row << ' ' << cells[i].col;
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random Minesweeper solvability experiments"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--rows", g.rows, "Board rows")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--cols", g.cols, "Board columns")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "Worker threads")
      ->envname("MINES_PHASE_THREADS")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output path (written atomically); stdout when omitted");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  int exit_code = 0;
  auto sub = [&](const char* name, const char* help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->fallthrough();
    return s;
  };

  // gen
  double gen_p = 0.1;
  std::string gen_base;
  CLI::App* gen = sub("gen", "Sample a random mine assignment");
  gen->add_option("--p", gen_p, "Mine probability")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  gen->add_option("--augment", gen_base, "Keep the mines of this board and add i.i.d. mines")->check(CLI::ExistingFile);
  gen->callback([&] {
    const mp::MineAssignment m = gen_base.empty() ? mp::sample_iid(g.dims(), gen_p, mp::Seed{g.seed})
                                                  : mp::sample_augmented(load_board(gen_base), gen_p, mp::Seed{g.seed});
    emit(g, [&](std::ostream& os) { mp::write_grid(os, m); });
  });

  // solve
  std::string solve_in;
  bool solve_guess = false, solve_trace = false;
  CLI::App* solve = sub("solve", "Play a board with the inference solver");
  solve->add_option("--in", solve_in, "Mine grid file (sampled from --rows/--cols/--p/--seed when omitted)")
      ->check(CLI::ExistingFile);
  double solve_p = 0.01;
  solve->add_option("--p", solve_p, "Mine probability when sampling")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  solve->add_flag("--guess", solve_guess, "Guess uniformly among two-way cells when stuck");
  solve->add_flag("--trace", solve_trace, "Print REVEAL/GUESS lines before the summary");
  solve->callback([&] {
    const mp::MineAssignment m = solve_in.empty() ? mp::sample_iid(g.dims(), solve_p, mp::Seed{g.seed}) : load_board(solve_in);
    std::ostringstream trace;
    mp::PlayOptions po;
    if (solve_trace) po.trace = &trace;
    mp::PlayOutcome outcome;
    if (solve_guess) {
      mp::Rng rng(mp::Seed{g.seed}.derive(1));
      outcome = mp::play_with_guessing(m, rng, po);
    } else {
      outcome = mp::play(m, po);
    }
    json rec;
    rec["verdict"] = std::string(mp::to_string(outcome.verdict));
    rec["reveals"] = outcome.reveals;
    rec["islands"] = outcome.islands.size();
    rec["guesses"] = outcome.guess_count;
    rec["cell_touches"] = outcome.cell_touches;
    rec["mines"] = m.mine_count();
    emit(g, [&](std::ostream& os) {
      os << trace.str();
      if (g.json_output()) {
        os << rec.dump() << '\n';
      } else {
        for (const auto& [key, value] : rec.items())
          os << key << '=' << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
      }
    });
    if (outcome.verdict != mp::Verdict::solved) exit_code = 1;
  });

  // enum-ambiguous
  int max_mines = 6;
  bool enum_stats = false;
  CLI::App* enumerate = sub("enum-ambiguous", "List every ambiguous pattern up to a mine count");
  enumerate->add_option("--max-mines", max_mines, "Largest pattern size (1..7)")->capture_default_str()->check(CLI::Range(1, 7));
  enumerate->add_flag("--stats", enum_stats, "Print search statistics to stderr");
  enumerate->callback([&] {
    mp::EnumerationStats stats;
    mp::EnumerateOptions eo;
    eo.threads = g.threads;
    eo.stats = &stats;
    const auto patterns = mp::enumerate_ambiguous(max_mines, eo);
    if (!g.out.empty()) mp::write_pattern_directory(g.out, patterns, max_mines);
    std::cout << "count=" << patterns.size() << '\n';
    if (enum_stats)
      std::cerr << "candidates=" << stats.candidates << " full_checks=" << stats.full_checks << " pruned=" << stats.pruned
                << '\n';
  });

  // scan
  std::string scan_in, scan_pattern;
  int scan_window = 0;
  CLI::App* scan = sub("scan", "Count pattern occurrences and window statistics of a board");
  scan->add_option("--in", scan_in, "Mine grid file")->required()->check(CLI::ExistingFile);
  scan->add_option("--pattern", scan_pattern, "Pattern file (P1 and P2 when omitted)")->check(CLI::ExistingFile);
  scan->add_option("--window", scan_window, "Window side (default min(100, rows, cols))");
  scan->callback([&] {
    const mp::MineAssignment m = load_board(scan_in);
    std::vector<std::pair<std::string, mp::Pattern>> patterns;
    if (scan_pattern.empty()) {
      const mp::CanonicalPatterns canon = mp::canonical_p1_p2();
      patterns = {{"P1", canon.p1}, {"P2", canon.p2}};
    } else {
      patterns.emplace_back(std::filesystem::path(scan_pattern).stem().string(),
                            read_file<mp::Pattern>(scan_pattern, [](std::istream& in) { return mp::read_pattern(in); }));
    }
    json rec;
    for (const auto& [name, p] : patterns) {
      const auto anchors = mp::occurrences(m, p);
      rec[name + "_count"] = anchors.size();
      rec[name + "_anchors"] = cells_text(anchors);
    }
    const int w = scan_window > 0 ? scan_window : mp::default_window(m.dims());
    rec["window"] = w;
    rec["window_max"] = mp::window_mine_max(m, w);
    const auto clearance = mp::border_clearance(m);
    rec["border_clearance"] = clearance ? json(*clearance) : json("none");
    emit_record(g, rec);
  });

  // sweep
  std::vector<double> sweep_p;
  std::size_t sweep_trials = 100;
  std::string sweep_mode = "inference", trials_out, plot_out;
  bool with_timing = false;
  CLI::App* sweep = sub("sweep", "Solve rate and pattern statistics over a list of p values");
  sweep->add_option("--p", sweep_p, "Mine probabilities, ascending")->delimiter(',')->required();
  sweep->add_option("--trials", sweep_trials, "Boards per p")->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_option("--mode", sweep_mode, "Solver")->check(CLI::IsMember({"inference", "guessing"}))->capture_default_str();
  sweep->add_option("--trials-out", trials_out, "Per-trial JSON lines");
  sweep->add_option("--plot-out", plot_out, "Plot data (x,y,ci)");
  sweep->add_flag("--with-timing", with_timing, "Include per-trial elapsed time in --trials-out");
  sweep->callback([&] {
    mp::SweepConfig cfg;
    cfg.dims = g.dims();
    cfg.p_values = sweep_p;
    cfg.trials = sweep_trials;
    cfg.seed = mp::Seed{g.seed};
    cfg.mode = sweep_mode == "guessing" ? mp::SolverMode::guessing : mp::SolverMode::inference;
    cfg.threads = g.threads;
    const mp::SweepResult res = mp::run_sweep(cfg);
    emit(g, [&](std::ostream& os) { g.json_output() ? mp::write_sweep_json(os, res) : mp::write_sweep_csv(os, res); });
    if (!trials_out.empty())
      mp::write_file_atomic(trials_out, [&](std::ostream& os) { mp::write_trials_jsonl(os, res, with_timing); });
    if (!plot_out.empty()) mp::write_file_atomic(plot_out, [&](std::ostream& os) { mp::write_plot_data(os, res); });
  });

  // criticality
  double crit_c = 1.0;
  std::size_t crit_trials = 100;
  CLI::App* crit = sub("criticality", "P1/P2 counts at p = c n^(-1/6) against the exact expectation");
  crit->add_option("--c", crit_c, "Scale constant")->capture_default_str()->check(CLI::NonNegativeNumber);
  crit->add_option("--trials", crit_trials, "Boards")->capture_default_str()->check(CLI::PositiveNumber);
  crit->callback([&] {
    const mp::CriticalityReport r = mp::run_criticality(g.dims(), crit_c, crit_trials, mp::Seed{g.seed}, g.threads);
    json rec;
    rec["c"] = r.c;
    rec["p"] = r.p;
    rec["trials"] = crit_trials;
    rec["limit_mean_c6"] = r.limit_mean;
    const char* names[] = {"p1", "p2"};
    for (int k = 0; k < 2; ++k) {
      const mp::CountStats& s = r.counts.stats[static_cast<std::size_t>(k)];
      rec[std::string(names[k]) + "_mean"] = s.mean;
      rec[std::string(names[k]) + "_variance"] = s.variance;
      rec[std::string(names[k]) + "_exact"] = s.expected;
      rec[std::string(names[k]) + "_dispersion"] = s.dispersion;
    }
    rec["correlation"] = r.counts.correlation;
    rec["exact_over_c6"] = r.finite_size_ratio;
    rec["finite_size_gap"] = r.finite_size_gap;
    rec["solve_rate"] = r.solve_rate;
    rec["solve_ci"] = r.solve_ci;
    emit_record(g, rec);
  });

  // process
  std::optional<std::size_t> budget, planted_tau, end_t;
  std::string events_out;
  bool monotonicity = false;
  int process_window = 0;
  CLI::App* process = sub("process", "Run the mine-addition process");
  process->add_option("--budget", budget, "Step budget (default n/2)");
  process->add_option("--planted-tau", planted_tau, "Replay a random planted schedule completing P1 at this step");
  process->add_option("--window", process_window, "Window side (default min(100, rows, cols))");
  process->add_option("--events-out", events_out, "Write the event log (t row col)");
  process->add_flag("--monotonicity", monotonicity, "Plant P1 at the center and follow it to --end-t");
  process->add_option("--end-t", end_t, "Monotonicity horizon (default n/2)");
  process->callback([&] {
    json rec;
    if (monotonicity) {
      mp::MonotonicityConfig cfg;
      cfg.dims = g.dims();
      cfg.seed = mp::Seed{g.seed};
      cfg.end_t = end_t;
      const mp::MonotonicityRecord r = mp::run_monotonicity(cfg);
      rec["t0"] = r.t0;
      rec["end_t"] = r.end_t;
      rec["persistence"] = r.persistence;
      rec["first_destruction"] = r.first_destruction ? json(*r.first_destruction) : json("none");
      rec["exact_frame_survival"] = mp::frame_survival_probability(
          g.dims().size(), r.t0, mp::canonical_p1_p2().p1.frame().size() - 6, r.end_t);
      std::ostringstream samples;
      for (std::size_t i = 0; i < r.samples.size(); ++i)
        samples << (i ? ";" : "") << r.samples[i].first << ' ' << r.samples[i].second;
      rec["samples"] = samples.str();
      emit_record(g, rec);
      return;
    }
    mp::HittingTimeConfig cfg;
    cfg.dims = g.dims();
    cfg.seed = mp::Seed{g.seed};
    cfg.step_budget = budget;
    cfg.window = process_window;
    if (planted_tau) {
      mp::Rng rng(cfg.seed);
      cfg.planted = mp::planted_schedule(cfg.dims, mp::canonical_p1_p2().p1, *planted_tau, 0, rng);
    }
    const mp::ProcessExperimentRecord r = mp::run_hitting_time(cfg);
    rec["steps"] = r.steps;
    rec["tau"] = r.tau ? json(*r.tau) : json("none");
    rec["window_max_pre_tau"] = r.window_max_pre_tau;
    rec["kappa"] = r.kappa;
    rec["window_max_at_kappa"] = r.window_max_at_kappa ? json(*r.window_max_at_kappa) : json("none");
    std::ostringstream verdicts;
    bool all_solved = true;
    for (std::size_t i = 0; i < r.verdicts.size(); ++i) {
      verdicts << (i ? ";" : "") << r.verdicts[i].t << ' ' << mp::to_string(r.verdicts[i].verdict);
      all_solved = all_solved && r.verdicts[i].verdict == mp::Verdict::solved;
    }
    rec["verdicts"] = verdicts.str();
    if (r.planted_tau) {
      rec["planted_tau"] = *r.planted_tau;
      rec["detector_agrees"] = r.detector_agrees;
      if (!r.detector_agrees || !all_solved) exit_code = 1;
    }
    if (!events_out.empty()) {
      mp::ProcessState replay(cfg.dims, 0);
      for (mp::Cell c : r.events) replay.add(c);
      mp::write_file_atomic(events_out, [&](std::ostream& os) { replay.write_events(os); });
    }
    emit_record(g, rec);
  });

  // lemma4
  int lemma_k = 1;
  std::size_t lemma_trials = 10'000;
  CLI::App* lemma4 = sub("lemma4", "Success rate with k planted coin-flip islands");
  lemma4->add_option("--k", lemma_k, "Number of planted islands")->capture_default_str()->check(CLI::NonNegativeNumber);
  lemma4->add_option("--trials", lemma_trials, "Trials")->capture_default_str()->check(CLI::PositiveNumber);
  lemma4->callback([&] {
    const mp::Lemma4Result r = mp::run_lemma4(lemma_k, lemma_trials, mp::Seed{g.seed}, g.threads);
    json rec;
    rec["k"] = r.k;
    rec["rows"] = r.dims.rows;
    rec["cols"] = r.dims.cols;
    rec["trials"] = r.trials;
    rec["successes"] = r.successes;
    rec["rate"] = r.rate;
    rec["ci"] = r.ci;
    rec["expected"] = r.expected;
    emit_record(g, rec);
  });

  // verify
  std::vector<int> only;
  CLI::App* verify = sub("verify", "Run the acceptance criteria (one PASS/FAIL line each)");
  verify->add_option("--only", only, "Criterion ids")->delimiter(',')->check(CLI::Range(1, mp::acceptance::kCriterionCount));
  verify->callback([&] {
    if (only.empty())
      for (int i = 1; i <= mp::acceptance::kCriterionCount; ++i) only.push_back(i);
    mp::acceptance::Options opts;
    if (app.get_option("--seed")->count() > 0) opts.seed = g.seed;
    opts.threads = g.threads;
    for (int id : only) {
      const auto r = mp::acceptance::run(id, opts);
      std::cout << mp::acceptance::format_line(r) << std::endl;
      if (!r.pass) exit_code = 1;
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const mp::ContractViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return exit_code;
}
