#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace sbp {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow; tolerates -inf on either side.
inline double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

// Max-shifted log(sum(exp(x))) over a table. Empty input yields -inf.
inline double log_sum_exp(std::span<const double> xs) {
  double hi = kNegInf;
  for (double x : xs)
    if (x > hi) hi = x;
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

// Shifts a log-table in place so that its probability mass sums to 1.
inline void normalize_log(std::span<double> xs) {
  const double z = log_sum_exp(xs);
  for (double& x : xs) x -= z;
}

// exp() of a normalized log-table.
inline std::vector<double> to_probabilities(std::span<const double> log_table) {
  std::vector<double> p(log_table.size());
  for (size_t i = 0; i < p.size(); ++i) p[i] = std::exp(log_table[i]);
  return p;
}

// Shannon entropy of a normalized log-table, with 0*log(0) := 0.
inline double entropy_from_log(std::span<const double> log_table) {
  double h = 0.0;
  for (double l : log_table) {
    const double p = std::exp(l);
    if (p > 0.0) h -= p * l;
  }
  return h;
}

}  // namespace sbp
