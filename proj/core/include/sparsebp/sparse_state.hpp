#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sparsebp/model.hpp"

namespace sbp {

// Mutable inference state over partially instantiated domains: per-variable
// value sets S_i (monotone, grow-only) and per-directed-edge message tables
// restricted to S_i. Messages are normalized log-probabilities. Values
// outside S_i carry implicit zero mass.
//
// Factor-to-variable messages are the stored quantity; variable-to-factor
// messages are materialized per edge and refreshed lazily when any sibling
// factor-to-variable message changes. Single writer; value-copyable.
class SparseState {
 public:
  // Full domains, uniform messages (dense baselines).
  static SparseState full(const FactorGraph& graph);
  // One value per variable; messages are point masses on the singleton.
  static SparseState singletons(const FactorGraph& graph,
                                const std::vector<int>& initial_values);
  // Arbitrary initial domains (values need not be sorted); uniform messages.
  static SparseState with_domains(const FactorGraph& graph,
                                  std::vector<std::vector<int>> domains);

  const FactorGraph& graph() const { return *graph_; }

  // --- domains ---
  const std::vector<int>& domain(VariableId i) const { return domains_[i]; }
  int sparse_size(VariableId i) const {
    return static_cast<int>(domains_[i].size());
  }
  bool instantiated(VariableId i, int v) const { return value_pos_[i][v] >= 0; }
  int position_of(VariableId i, int v) const { return value_pos_[i][v]; }
  std::int64_t total_instantiated() const { return total_instantiated_; }
  double fill_fraction() const {
    return static_cast<double>(total_instantiated_) /
           static_cast<double>(graph_->total_domain_size());
  }

  // Inserts v into S_i and extends every message table touching i with the
  // uniform share 1/|S_i| (then renormalizes). The caller is responsible for
  // forcing recomputation of the adjacent factors' messages.
  void add_value(VariableId i, int v);

  // --- directed edges: one per (factor, slot) pair ---
  int num_edges() const { return static_cast<int>(edge_var_.size()); }
  int edge_id(FactorId f, int slot) const { return edge_base_[f] + slot; }
  VariableId edge_var(int edge) const { return edge_var_[edge]; }
  FactorId edge_factor(int edge) const { return edge_factor_[edge]; }
  const std::vector<int>& edges_of_var(VariableId i) const {
    return var_edges_[i];
  }

  std::span<const double> factor_to_var_log(int edge) const {
    return f2v_[edge];
  }
  // Refreshes from sibling factor-to-variable messages if stale.
  std::span<const double> var_to_factor_log(int edge) const;
  // Overwrites m_{f->i}; expects a normalized log table over S_i. Marks the
  // variable's other outgoing messages stale.
  void set_factor_to_var(int edge, std::vector<double> new_log);

  // --- beliefs (probability space, support = current sparse domains) ---
  std::vector<double> var_belief_log(VariableId i) const;
  std::vector<double> var_belief(VariableId i) const;
  // Row-major over sparse positions, last slot fastest; size prod |S_j|.
  std::vector<double> factor_belief(FactorId f) const;

  // sum_f E_{mu_f}[phi_f] + sum_f H(mu_f) - sum_i (d_i - 1) H(mu_i).
  double bethe_objective() const;

  // Per-variable marginals over full domains, exact zeros outside S_i.
  std::vector<std::vector<double>> dense_marginals() const;

  std::int64_t sparse_table_size(FactorId f) const;

 private:
  SparseState(const FactorGraph& graph, std::vector<std::vector<int>> domains,
              bool point_mass);

  void refresh_v2f(int edge) const;

  const FactorGraph* graph_;
  std::vector<std::vector<int>> domains_;    // sorted values of S_i
  std::vector<std::vector<int>> value_pos_;  // |D_i| long, -1 = absent
  std::int64_t total_instantiated_ = 0;

  std::vector<int> edge_base_;
  std::vector<VariableId> edge_var_;
  std::vector<FactorId> edge_factor_;
  std::vector<std::vector<int>> var_edges_;

  std::vector<std::vector<double>> f2v_;
  mutable std::vector<std::vector<double>> v2f_;
  mutable std::vector<char> v2f_stale_;
};

// Enumerates the sparse cross-product S_f in row-major slot order (last slot
// fastest). fn(flat, pos): flat indexes the factor's full log-potential
// table; pos[a] is the position within S of neighbor a.
template <class Fn>
void for_each_sparse_assignment(const SparseState& state, FactorId f, Fn&& fn) {
  const FactorGraph& g = state.graph();
  const Factor& fac = g.factor(f);
  const int arity = fac.arity();
  const auto& strides = g.strides(f);

  std::vector<const std::vector<int>*> vals(arity);
  std::int64_t flat = 0;
  for (int a = 0; a < arity; ++a) {
    vals[a] = &state.domain(fac.neighbors[a]);
    flat += strides[a] * (*vals[a])[0];
  }
  std::vector<int> pos(arity, 0);
  while (true) {
    fn(flat, std::span<const int>(pos));
    int a = arity - 1;
    for (; a >= 0; --a) {
      const auto& sv = *vals[a];
      if (pos[a] + 1 < static_cast<int>(sv.size())) {
        flat += strides[a] * (sv[pos[a] + 1] - sv[pos[a]]);
        ++pos[a];
        break;
      }
      flat -= strides[a] * (sv[pos[a]] - sv[0]);
      pos[a] = 0;
    }
    if (a < 0) return;
  }
}

}  // namespace sbp
