#pragma once

// Exact consistency inference over the hidden cells of a grid state.
//
// Variables are the hidden cells touching at least one clue; every clue with
// hidden neighbors contributes the constraint "the hidden neighbors hold
// exactly s_clue(c) mines". The constraint graph is split into connected
// components and each component is enumerated by backtracking with bound
// propagation, so the per-cell classification is exact.

#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mines_phase/grid.hpp"
#include "mines_phase/patterns.hpp"

namespace mines_phase {

/// No mine completion satisfies the state's clues.
class InconsistentState : public std::runtime_error {
public:
  InconsistentState() : std::runtime_error("inconsistent state: no completion satisfies the clues") {}
};

/// A constraint component needed more search nodes than allowed.
class SearchBudgetExceeded : public std::runtime_error {
public:
  SearchBudgetExceeded() : std::runtime_error("completion search exceeded its node budget") {}
};

struct CompletionConstraint {
  Cell clue_cell;
  int required = 0;
  std::vector<Cell> unknowns;
};

enum class HiddenClass : std::uint8_t { always_mine, never_mine, two_way };

/// A full assignment of the constrained hidden cells, listed by its mines.
struct Completion {
  std::vector<Cell> mines;
};

struct InferenceReport {
  std::vector<Cell> always_mine;
  std::vector<Cell> never_mine;
  /// Includes unconstrained hidden cells.
  std::vector<Cell> two_way;
  /// Hidden cells touching no clue (also listed in two_way).
  std::vector<Cell> unconstrained;
  /// Completions of the constrained cells; saturates at UINT64_MAX.
  std::uint64_t completion_count = 0;

  /// With InferenceOptions::record_witnesses: for each constrained two_way
  /// cell, one completion with a mine there and one without (same order as
  /// `two_way`, unconstrained cells skipped).
  std::vector<Completion> mine_witness;
  std::vector<Completion> empty_witness;
};

struct InferenceOptions {
  std::uint64_t node_budget = 10'000'000;
  bool record_witnesses = false;
};

/// Constraints of `s`. Throws InconsistentState on clues that cannot be met
/// locally (negative requirement, too few hidden neighbors, or a satisfied
/// clue with a leftover requirement).
inline std::vector<CompletionConstraint> completion_constraints(const GridState& s) {
  const GridDims dims = s.dims();
  std::vector<CompletionConstraint> out;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const CellValue v = s.at_index(i);
    if (v.is_shown_mine()) throw ContractViolation("inference on a state with a shown mine");
    if (!v.is_clue()) continue;
    const Cell c = dims.cell(i);
    CompletionConstraint k{c, s_clue(s, c), {}};
    for (Cell n : neighbors(c, dims))
      if (s.at(n).is_hidden()) k.unknowns.push_back(n);
    if (k.required < 0 || k.required > static_cast<int>(k.unknowns.size())) throw InconsistentState();
    if (!k.unknowns.empty()) out.push_back(std::move(k));
  }
  return out;
}

namespace detail {

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > std::numeric_limits<std::uint64_t>::max() / b) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

// Enumerates every solution of one constraint component.
class ComponentSearch {
public:
  ComponentSearch(int var_count, std::vector<std::vector<int>> constraint_vars, std::vector<int> required,
                  std::uint64_t node_budget, bool keep_witnesses)
      : value_(static_cast<std::size_t>(var_count), -1),
        incident_(static_cast<std::size_t>(var_count)),
        vars_(std::move(constraint_vars)),
        required_(std::move(required)),
        mines_(vars_.size(), 0),
        unassigned_(vars_.size(), 0),
        seen_mine_(static_cast<std::size_t>(var_count), 0),
        seen_empty_(static_cast<std::size_t>(var_count), 0),
        node_budget_(node_budget),
        keep_witnesses_(keep_witnesses) {
    for (std::size_t k = 0; k < vars_.size(); ++k) {
      unassigned_[k] = static_cast<int>(vars_[k].size());
      for (int v : vars_[k]) incident_[static_cast<std::size_t>(v)].push_back(static_cast<int>(k));
    }
    // Fail-first: most constrained variables first.
    order_.resize(static_cast<std::size_t>(var_count));
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      return incident_[static_cast<std::size_t>(a)].size() > incident_[static_cast<std::size_t>(b)].size();
    });
    if (keep_witnesses_) {
      mine_witness_.resize(static_cast<std::size_t>(var_count));
      empty_witness_.resize(static_cast<std::size_t>(var_count));
    }
  }

  void run() {
    std::vector<int> queue;
    if (!propagate_all(queue)) return;
    search(0);
  }

  std::uint64_t solutions() const { return solutions_; }
  bool seen_mine(int v) const { return seen_mine_[static_cast<std::size_t>(v)] != 0; }
  bool seen_empty(int v) const { return seen_empty_[static_cast<std::size_t>(v)] != 0; }
  const std::vector<std::int8_t>& mine_witness(int v) const { return mine_witness_[static_cast<std::size_t>(v)]; }
  const std::vector<std::int8_t>& empty_witness(int v) const { return empty_witness_[static_cast<std::size_t>(v)]; }

private:
  bool assign(int v, int val) {
    value_[static_cast<std::size_t>(v)] = static_cast<std::int8_t>(val);
    trail_.push_back(v);
    bool ok = true;
    for (int k : incident_[static_cast<std::size_t>(v)]) {
      const auto ku = static_cast<std::size_t>(k);
      --unassigned_[ku];
      mines_[ku] += val;
      if (mines_[ku] > required_[ku] || mines_[ku] + unassigned_[ku] < required_[ku]) ok = false;
    }
    return ok;
  }

  void undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
      const int v = trail_.back();
      trail_.pop_back();
      const int val = value_[static_cast<std::size_t>(v)];
      for (int k : incident_[static_cast<std::size_t>(v)]) {
        ++unassigned_[static_cast<std::size_t>(k)];
        mines_[static_cast<std::size_t>(k)] -= val;
      }
      value_[static_cast<std::size_t>(v)] = -1;
    }
  }

  // Forces the remaining variables of tight constraints until a fixpoint.
  bool propagate(std::vector<int>& queue) {
    while (!queue.empty()) {
      const auto k = static_cast<std::size_t>(queue.back());
      queue.pop_back();
      if (unassigned_[k] == 0) continue;
      int forced = -1;
      if (mines_[k] == required_[k])
        forced = 0;
      else if (mines_[k] + unassigned_[k] == required_[k])
        forced = 1;
      if (forced < 0) continue;
      for (int v : vars_[k]) {
        if (value_[static_cast<std::size_t>(v)] >= 0) continue;
        if (!assign(v, forced)) return false;
        for (int k2 : incident_[static_cast<std::size_t>(v)]) queue.push_back(k2);
      }
    }
    return true;
  }

  bool propagate_all(std::vector<int>& queue) {
    for (std::size_t k = 0; k < vars_.size(); ++k) queue.push_back(static_cast<int>(k));
    return propagate(queue);
  }

  void search(std::size_t pos) {
    while (pos < order_.size() && value_[static_cast<std::size_t>(order_[pos])] >= 0) ++pos;
    if (pos == order_.size()) {
      record_solution();
      return;
    }
    const int v = order_[pos];
    for (int val = 0; val <= 1; ++val) {
      if (++nodes_ > node_budget_) throw SearchBudgetExceeded();
      const std::size_t mark = trail_.size();
      std::vector<int> queue;
      if (assign(v, val)) {
        queue.assign(incident_[static_cast<std::size_t>(v)].begin(), incident_[static_cast<std::size_t>(v)].end());
        if (propagate(queue)) search(pos + 1);
      }
      undo_to(mark);
    }
  }

  void record_solution() {
    if (solutions_ < std::numeric_limits<std::uint64_t>::max()) ++solutions_;
    for (std::size_t v = 0; v < value_.size(); ++v) {
      if (value_[v]) {
        if (!seen_mine_[v] && keep_witnesses_) mine_witness_[v] = value_;
        seen_mine_[v] = 1;
      } else {
        if (!seen_empty_[v] && keep_witnesses_) empty_witness_[v] = value_;
        seen_empty_[v] = 1;
      }
    }
  }

  std::vector<std::int8_t> value_;
  std::vector<std::vector<int>> incident_;
  std::vector<std::vector<int>> vars_;
  std::vector<int> required_;
  std::vector<int> mines_;
  std::vector<int> unassigned_;
  std::vector<int> order_;
  std::vector<int> trail_;
  std::vector<std::uint8_t> seen_mine_;
  std::vector<std::uint8_t> seen_empty_;
  std::vector<std::vector<std::int8_t>> mine_witness_;
  std::vector<std::vector<std::int8_t>> empty_witness_;
  std::uint64_t solutions_ = 0;
  std::uint64_t nodes_ = 0;
  std::uint64_t node_budget_;
  bool keep_witnesses_;
};

}  // namespace detail

/// Classifies every hidden cell of `s` as always_mine, never_mine or two_way
/// over all mine completions consistent with the clues and flags.
inline InferenceReport classify_hidden(const GridState& s, const InferenceOptions& opts = {}) {
  const GridDims dims = s.dims();
  const std::vector<CompletionConstraint> constraints = completion_constraints(s);

  std::vector<int> var_of(dims.size(), -1);
  std::vector<Cell> var_cell;
  for (const auto& k : constraints)
    for (Cell c : k.unknowns) {
      auto& slot = var_of[dims.index(c)];
      if (slot < 0) {
        slot = static_cast<int>(var_cell.size());
        var_cell.push_back(c);
      }
    }

  // Union-find over variables.
  std::vector<int> parent(var_cell.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (const auto& k : constraints) {
    const int a = find(var_of[dims.index(k.unknowns.front())]);
    for (Cell c : k.unknowns) parent[static_cast<std::size_t>(find(var_of[dims.index(c)]))] = a;
  }

  // Group variables and constraints per component.
  std::vector<int> comp_of_root(var_cell.size(), -1);
  std::vector<std::vector<int>> comp_vars;
  std::vector<int> local_index(var_cell.size(), -1);
  for (std::size_t v = 0; v < var_cell.size(); ++v) {
    const auto root = static_cast<std::size_t>(find(static_cast<int>(v)));
    if (comp_of_root[root] < 0) {
      comp_of_root[root] = static_cast<int>(comp_vars.size());
      comp_vars.emplace_back();
    }
    auto& vars = comp_vars[static_cast<std::size_t>(comp_of_root[root])];
    local_index[v] = static_cast<int>(vars.size());
    vars.push_back(static_cast<int>(v));
  }
  std::vector<std::vector<std::vector<int>>> comp_constraint_vars(comp_vars.size());
  std::vector<std::vector<int>> comp_required(comp_vars.size());
  for (const auto& k : constraints) {
    const int v0 = var_of[dims.index(k.unknowns.front())];
    const auto comp = static_cast<std::size_t>(comp_of_root[static_cast<std::size_t>(find(v0))]);
    std::vector<int> locals;
    for (Cell c : k.unknowns) locals.push_back(local_index[static_cast<std::size_t>(var_of[dims.index(c)])]);
    comp_constraint_vars[comp].push_back(std::move(locals));
    comp_required[comp].push_back(k.required);
  }

  // Smallest components first.
  std::vector<std::size_t> comp_order(comp_vars.size());
  std::iota(comp_order.begin(), comp_order.end(), std::size_t{0});
  std::stable_sort(comp_order.begin(), comp_order.end(),
                   [&](std::size_t a, std::size_t b) { return comp_vars[a].size() < comp_vars[b].size(); });

  std::vector<HiddenClass> cls(var_cell.size(), HiddenClass::two_way);
  std::vector<detail::ComponentSearch> searches;
  searches.reserve(comp_vars.size());
  std::vector<std::size_t> search_of_comp(comp_vars.size());
  std::uint64_t total = 1;
  for (std::size_t comp : comp_order) {
    searches.emplace_back(static_cast<int>(comp_vars[comp].size()), std::move(comp_constraint_vars[comp]),
                          std::move(comp_required[comp]), opts.node_budget, opts.record_witnesses);
    search_of_comp[comp] = searches.size() - 1;
    auto& search = searches.back();
    search.run();
    if (search.solutions() == 0) throw InconsistentState();
    total = detail::saturating_mul(total, search.solutions());
    for (std::size_t i = 0; i < comp_vars[comp].size(); ++i) {
      const auto v = static_cast<std::size_t>(comp_vars[comp][i]);
      const bool m = search.seen_mine(static_cast<int>(i)), e = search.seen_empty(static_cast<int>(i));
      cls[v] = m && e ? HiddenClass::two_way : (m ? HiddenClass::always_mine : HiddenClass::never_mine);
    }
  }

  InferenceReport report;
  report.completion_count = total;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (!s.at_index(i).is_hidden()) continue;
    const Cell c = dims.cell(i);
    const int v = var_of[i];
    if (v < 0) {
      report.unconstrained.push_back(c);
      report.two_way.push_back(c);
      continue;
    }
    switch (cls[static_cast<std::size_t>(v)]) {
      case HiddenClass::always_mine: report.always_mine.push_back(c); break;
      case HiddenClass::never_mine: report.never_mine.push_back(c); break;
      case HiddenClass::two_way: report.two_way.push_back(c); break;
    }
  }

  if (opts.record_witnesses) {
    auto comp_of_var = [&](int v) { return static_cast<std::size_t>(comp_of_root[static_cast<std::size_t>(find(v))]); };
    // Completion taking `local` in `comp` and any recorded solution elsewhere.
    auto first_solution = [&](std::size_t comp) {
      const auto& search = searches[search_of_comp[comp]];
      for (std::size_t i = 0; i < comp_vars[comp].size(); ++i) {
        if (search.seen_mine(static_cast<int>(i))) return search.mine_witness(static_cast<int>(i));
        if (search.seen_empty(static_cast<int>(i))) return search.empty_witness(static_cast<int>(i));
      }
      return std::vector<std::int8_t>{};
    };
    auto build = [&](std::size_t comp, const std::vector<std::int8_t>& local) {
      Completion out;
      for (std::size_t other = 0; other < comp_vars.size(); ++other) {
        const auto values = other == comp ? local : first_solution(other);
        for (std::size_t i = 0; i < comp_vars[other].size(); ++i)
          if (values[i]) out.mines.push_back(var_cell[static_cast<std::size_t>(comp_vars[other][i])]);
      }
      std::sort(out.mines.begin(), out.mines.end());
      return out;
    };
    for (Cell c : report.two_way) {
      const int v = var_of[dims.index(c)];
      if (v < 0) continue;
      const std::size_t comp = comp_of_var(v);
      const auto& search = searches[search_of_comp[comp]];
      const int local = local_index[static_cast<std::size_t>(v)];
      report.mine_witness.push_back(build(comp, search.mine_witness(local)));
      report.empty_witness.push_back(build(comp, search.empty_witness(local)));
    }
  }
  return report;
}

}  // namespace mines_phase
