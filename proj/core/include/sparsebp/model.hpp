#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbp {

using VariableId = std::int32_t;
using FactorId = std::int32_t;

// A factor scores joint assignments of its neighbor variables. Potentials are
// kept in log-space; the table is row-major in neighbor order (the last
// neighbor varies fastest), matching the UAI flattening convention.
struct Factor {
  std::vector<VariableId> neighbors;
  std::vector<double> log_potentials;

  int arity() const { return static_cast<int>(neighbors.size()); }
};

// Immutable bipartite model: variables with dense integer domains and factors
// with log-potential tables. Safe to share across threads once built.
class FactorGraph {
 public:
  FactorGraph(std::vector<int> domain_sizes, std::vector<Factor> factors);

  int num_variables() const { return static_cast<int>(domain_sizes_.size()); }
  int num_factors() const { return static_cast<int>(factors_.size()); }
  int domain_size(VariableId i) const { return domain_sizes_[i]; }
  const std::vector<int>& domain_sizes() const { return domain_sizes_; }
  const Factor& factor(FactorId f) const { return factors_[f]; }
  const std::vector<Factor>& factors() const { return factors_; }

  // Factors adjacent to variable i, in factor-id order.
  const std::vector<FactorId>& factors_of(VariableId i) const {
    return var_to_factors_[i];
  }
  int degree(VariableId i) const {
    return static_cast<int>(var_to_factors_[i].size());
  }

  // Row-major strides of a factor's table over full domains.
  const std::vector<std::int64_t>& strides(FactorId f) const {
    return strides_[f];
  }
  // Position of variable i in factor f's neighbor list; -1 if absent.
  int slot_of(FactorId f, VariableId i) const;

  std::int64_t total_domain_size() const;  // sum over variables of |D_i|

 private:
  std::vector<int> domain_sizes_;
  std::vector<Factor> factors_;
  std::vector<std::vector<FactorId>> var_to_factors_;
  std::vector<std::vector<std::int64_t>> strides_;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reads a UAI MARKOV model. Tables in the file are probabilities; they are
// stored as their natural logs. Entry order is preserved bit-exactly.
// Throws ParseError with a line number on malformed input, unknown scope
// variables, table length mismatch, or nonpositive entries.
FactorGraph parse_uai(const std::string& text);
FactorGraph load_uai_file(const std::string& path);

// Inverse of parse_uai up to table-entry round-trip (~1e-16 relative).
std::string serialize_uai(const FactorGraph& graph);
void save_uai_file(const FactorGraph& graph, const std::string& path);

// Grid MRF with one unary factor per cell and one pairwise factor per
// horizontal/vertical adjacency. Unary log-potentials are iid standard
// normal, pairwise iid normal with stddev coupling_scale. Pure function of
// the seed: the generator and the normal sampler are both fully pinned, so
// equal arguments give bit-identical tables.
FactorGraph generate_grid(int rows, int cols, int domain_size,
                          double coupling_scale, std::uint64_t seed);

// log sum over all joint assignments of f with pin_var fixed at pin_value,
// of exp(log_potentials). Max-shifted; exact single-term at arity 1.
double factor_row_logsumexp(const FactorGraph& graph, FactorId f,
                            VariableId pin_var, int pin_value);

// FNV-1a over the graph structure and raw table bits; keys reference caches.
std::uint64_t model_hash(const FactorGraph& graph);

}  // namespace sbp
