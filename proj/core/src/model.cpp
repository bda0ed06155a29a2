#include "sparsebp/model.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "sparsebp/logspace.hpp"

namespace sbp {

FactorGraph::FactorGraph(std::vector<int> domain_sizes,
                         std::vector<Factor> factors)
    : domain_sizes_(std::move(domain_sizes)), factors_(std::move(factors)) {
  const int n = num_variables();
  var_to_factors_.resize(n);
  strides_.resize(factors_.size());

  for (FactorId f = 0; f < num_factors(); ++f) {
    const Factor& fac = factors_[f];
    if (fac.neighbors.empty())
      throw std::invalid_argument("factor " + std::to_string(f) +
                                  " has an empty neighbor list");
    std::vector<VariableId> seen = fac.neighbors;
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
      throw std::invalid_argument("factor " + std::to_string(f) +
                                  " repeats a variable");
    std::int64_t table = 1;
    for (VariableId i : fac.neighbors) {
      if (i < 0 || i >= n)
        throw std::invalid_argument("factor " + std::to_string(f) +
                                    " references unknown variable " +
                                    std::to_string(i));
      table *= domain_sizes_[i];
    }
    if (table != static_cast<std::int64_t>(fac.log_potentials.size()))
      throw std::invalid_argument(
          "factor " + std::to_string(f) + " table length " +
          std::to_string(fac.log_potentials.size()) + " != " +
          std::to_string(table));
    for (double lp : fac.log_potentials)
      if (!std::isfinite(lp))
        throw std::invalid_argument("factor " + std::to_string(f) +
                                    " has a non-finite log-potential");

    // Row-major strides: last neighbor varies fastest.
    auto& st = strides_[f];
    st.assign(fac.neighbors.size(), 1);
    for (int a = fac.arity() - 2; a >= 0; --a)
      st[a] = st[a + 1] * domain_sizes_[fac.neighbors[a + 1]];

    for (VariableId i : fac.neighbors) var_to_factors_[i].push_back(f);
  }

  for (VariableId i = 0; i < n; ++i) {
    if (domain_sizes_[i] < 1)
      throw std::invalid_argument("variable " + std::to_string(i) +
                                  " has empty domain");
    if (var_to_factors_[i].empty())
      throw std::invalid_argument("variable " + std::to_string(i) +
                                  " has no adjacent factor");
  }
}

int FactorGraph::slot_of(FactorId f, VariableId i) const {
  const auto& nb = factors_[f].neighbors;
  for (int a = 0; a < static_cast<int>(nb.size()); ++a)
    if (nb[a] == i) return a;
  return -1;
}

std::int64_t FactorGraph::total_domain_size() const {
  std::int64_t total = 0;
  for (int d : domain_sizes_) total += d;
  return total;
}

namespace {

// Whitespace tokenizer that remembers the line of each token, so parse
// errors can point at the offending input.
class TokenReader {
 public:
  explicit TokenReader(const std::string& text) : text_(text) {}

  bool next(std::string& tok) {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
    if (pos_ >= text_.size()) return false;
    const size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    tok = text_.substr(start, pos_ - start);
    return true;
  }

  int line() const { return line_; }

 private:
  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
};

[[noreturn]] void fail(int line, const std::string& what) {
  throw ParseError("line " + std::to_string(line) + ": " + what);
}

std::int64_t read_int(TokenReader& r, const char* what) {
  std::string tok;
  if (!r.next(tok)) fail(r.line(), std::string("unexpected end of input, expected ") + what);
  try {
    size_t used = 0;
    std::int64_t v = std::stoll(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    fail(r.line(), "expected integer " + std::string(what) + ", got '" + tok + "'");
  }
}

double read_real(TokenReader& r, const char* what) {
  std::string tok;
  if (!r.next(tok)) fail(r.line(), std::string("unexpected end of input, expected ") + what);
  try {
    size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    fail(r.line(), "expected number " + std::string(what) + ", got '" + tok + "'");
  }
}

}  // namespace

FactorGraph parse_uai(const std::string& text) {
  TokenReader r(text);
  std::string tok;
  if (!r.next(tok)) fail(r.line(), "empty input");
  if (tok != "MARKOV") fail(r.line(), "expected MARKOV header, got '" + tok + "'");

  const std::int64_t n = read_int(r, "variable count");
  if (n < 1) fail(r.line(), "variable count must be positive");
  std::vector<int> domains(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t d = read_int(r, "variable cardinality");
    if (d < 1) fail(r.line(), "cardinality must be positive");
    domains[i] = static_cast<int>(d);
  }

  const std::int64_t m = read_int(r, "factor count");
  if (m < 1) fail(r.line(), "factor count must be positive");
  std::vector<Factor> factors(m);
  for (std::int64_t f = 0; f < m; ++f) {
    const std::int64_t arity = read_int(r, "factor arity");
    if (arity < 1) fail(r.line(), "factor arity must be positive");
    factors[f].neighbors.resize(arity);
    for (std::int64_t a = 0; a < arity; ++a) {
      const std::int64_t v = read_int(r, "scope variable");
      if (v < 0 || v >= n)
        fail(r.line(), "scope references unknown variable " + std::to_string(v));
      factors[f].neighbors[a] = static_cast<VariableId>(v);
    }
  }

  for (std::int64_t f = 0; f < m; ++f) {
    std::int64_t expect = 1;
    for (VariableId i : factors[f].neighbors) expect *= domains[i];
    const std::int64_t count = read_int(r, "table length");
    if (count != expect)
      fail(r.line(), "table length mismatch for factor " + std::to_string(f) +
                         ": declared " + std::to_string(count) + ", scope implies " +
                         std::to_string(expect));
    factors[f].log_potentials.resize(count);
    for (std::int64_t k = 0; k < count; ++k) {
      const double p = read_real(r, "table entry");
      if (!(p > 0.0) || !std::isfinite(p))
        fail(r.line(), "nonpositive potential");
      factors[f].log_potentials[k] = std::log(p);
    }
  }

  return FactorGraph(std::move(domains), std::move(factors));
}

FactorGraph load_uai_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_uai(ss.str());
}

std::string serialize_uai(const FactorGraph& graph) {
  std::ostringstream out;
  out << "MARKOV\n" << graph.num_variables() << "\n";
  for (int i = 0; i < graph.num_variables(); ++i) {
    if (i) out << ' ';
    out << graph.domain_size(i);
  }
  out << "\n" << graph.num_factors() << "\n";
  for (const Factor& f : graph.factors()) {
    out << f.arity();
    for (VariableId i : f.neighbors) out << ' ' << i;
    out << "\n";
  }
  char buf[40];
  for (const Factor& f : graph.factors()) {
    out << "\n" << f.log_potentials.size() << "\n";
    for (size_t k = 0; k < f.log_potentials.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", std::exp(f.log_potentials[k]));
      out << buf << ((k + 1) % 8 == 0 ? '\n' : ' ');
    }
    out << "\n";
  }
  return out.str();
}

void save_uai_file(const FactorGraph& graph, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << serialize_uai(graph);
}

namespace {

// Standard normals via the polar method over mt19937_64 output. The 64-bit
// stream is pinned by the standard and the uniform mapping below is explicit,
// so the sampled tables do not depend on library internals.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    have_spare_ = true;
    return u * scale;
  }

 private:
  double uniform01() { return (rng_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace

FactorGraph generate_grid(int rows, int cols, int domain_size,
                          double coupling_scale, std::uint64_t seed) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("grid must be at least 1x1");
  if (domain_size < 2)
    throw std::invalid_argument("grid domain size must be at least 2");
  if (!(coupling_scale > 0.0))
    throw std::invalid_argument("coupling scale must be positive");

  const int n = rows * cols;
  const int L = domain_size;
  std::vector<int> domains(n, L);
  std::vector<Factor> factors;
  factors.reserve(n + 2 * n);

  NormalSampler normal(seed);
  auto cell = [cols](int r, int c) { return r * cols + c; };

  // Unary factors first (cell-major), then horizontal edges, then vertical.
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      Factor f;
      f.neighbors = {cell(r, c)};
      f.log_potentials.resize(L);
      for (double& lp : f.log_potentials) lp = normal();
      factors.push_back(std::move(f));
    }
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c + 1 < cols; ++c) {
      Factor f;
      f.neighbors = {cell(r, c), cell(r, c + 1)};
      f.log_potentials.resize(static_cast<size_t>(L) * L);
      for (double& lp : f.log_potentials) lp = coupling_scale * normal();
      factors.push_back(std::move(f));
    }
  for (int r = 0; r + 1 < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      Factor f;
      f.neighbors = {cell(r, c), cell(r + 1, c)};
      f.log_potentials.resize(static_cast<size_t>(L) * L);
      for (double& lp : f.log_potentials) lp = coupling_scale * normal();
      factors.push_back(std::move(f));
    }

  return FactorGraph(std::move(domains), std::move(factors));
}

double factor_row_logsumexp(const FactorGraph& graph, FactorId f,
                            VariableId pin_var, int pin_value) {
  const Factor& fac = graph.factor(f);
  const int slot = graph.slot_of(f, pin_var);
  if (slot < 0)
    throw std::invalid_argument("variable " + std::to_string(pin_var) +
                                " is not a neighbor of factor " + std::to_string(f));
  if (pin_value < 0 || pin_value >= graph.domain_size(pin_var))
    throw std::invalid_argument("pin value out of domain");

  const auto& st = graph.strides(f);
  const std::int64_t base = st[slot] * pin_value;
  const int arity = fac.arity();

  // Odometer over the unpinned neighbors.
  std::vector<int> digit(arity, 0);
  double hi = kNegInf;
  std::int64_t idx = base;
  const std::int64_t rows =
      static_cast<std::int64_t>(fac.log_potentials.size()) / graph.domain_size(pin_var);
  // Pass 1: max.
  for (std::int64_t row = 0; row < rows; ++row) {
    if (fac.log_potentials[idx] > hi) hi = fac.log_potentials[idx];
    for (int a = arity - 1; a >= 0; --a) {
      if (a == slot) continue;
      idx += st[a];
      if (++digit[a] < graph.domain_size(fac.neighbors[a])) break;
      idx -= st[a] * digit[a];
      digit[a] = 0;
    }
  }
  // Pass 2: sum.
  std::fill(digit.begin(), digit.end(), 0);
  idx = base;
  double acc = 0.0;
  for (std::int64_t row = 0; row < rows; ++row) {
    acc += std::exp(fac.log_potentials[idx] - hi);
    for (int a = arity - 1; a >= 0; --a) {
      if (a == slot) continue;
      idx += st[a];
      if (++digit[a] < graph.domain_size(fac.neighbors[a])) break;
      idx -= st[a] * digit[a];
      digit[a] = 0;
    }
  }
  return hi + std::log(acc);
}

std::uint64_t model_hash(const FactorGraph& graph) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  auto mix_i64 = [&](std::int64_t v) { mix(&v, sizeof v); };

  mix_i64(graph.num_variables());
  for (int i = 0; i < graph.num_variables(); ++i) mix_i64(graph.domain_size(i));
  mix_i64(graph.num_factors());
  for (const Factor& f : graph.factors()) {
    mix_i64(f.arity());
    for (VariableId i : f.neighbors) mix_i64(i);
    mix(f.log_potentials.data(), f.log_potentials.size() * sizeof(double));
  }
  return h;
}

}  // namespace sbp
