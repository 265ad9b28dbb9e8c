#ifndef HAMLAB_CONDITIONS_HPP
#define HAMLAB_CONDITIONS_HPP

#include <optional>
#include <string>
#include <vector>

#include "hamlab/digraph.hpp"
#include "hamlab/rational.hpp"

namespace hamlab {

enum class Condition { ghouila_houri, posa, nash_williams_chvatal, semi_exact, posa_min, kot };

inline const char* to_string(Condition c) {
  switch (c) {
    case Condition::ghouila_houri: return "gh";
    case Condition::posa: return "posa";
    case Condition::nash_williams_chvatal: return "nwc";
    case Condition::semi_exact: return "semi-exact";
    case Condition::posa_min: return "posa-min";
    case Condition::kot: return "kot";
  }
  return "unknown";
}

inline std::optional<Condition> condition_from_string(const std::string& s) {
  for (auto c : {Condition::ghouila_houri, Condition::posa, Condition::nash_williams_chvatal,
                 Condition::semi_exact, Condition::posa_min, Condition::kot})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

/// The values that made index i fail.  `partner_index` is the j of the
/// alternative clause (d_j >= n - i), absent when the clause has none.
struct ConditionWitness {
  long long i = 0;
  int d_out = 0;
  int d_in = 0;
  Rational threshold;                    // what d_i had to reach
  std::optional<long long> partner_index;
  std::optional<int> partner_out;        // d^+_j
  std::optional<int> partner_in;         // d^-_j
  Rational partner_threshold;            // what d_j had to reach
  std::string clause;                    // "i", "ii", "both", "min-degree", "ceil-half", ...
};

struct ConditionReport {
  Condition condition = Condition::ghouila_houri;
  bool holds = true;
  bool strongly_connected = true;  // only consulted by the nwc checker
  std::optional<long long> first_violation;
  std::optional<ConditionWitness> witness;
  int n = 0;
  std::optional<Rational> beta;
};

namespace detail {

inline void check_beta(const Rational& beta) {
  if (beta <= 0 || beta > 1) fail(ErrorKind::parameter, "beta must lie in (0, 1]");
}

/// d^{side}_j >= need with j rounded up; out-of-range j is vacuously true.
inline bool partner_ok(const DegreeSequences& s, Direction side, const Rational& j_exact,
                       const Rational& need, long long* j_used) {
  const long long j = ceil_of(j_exact);
  *j_used = j;
  if (!s.in_range(j)) return true;
  return Rational(s.at(side, j)) >= need;
}

/// Evaluates the two-clause "d_i >= first or d_j >= n-i" form for a single i.
inline std::optional<ConditionWitness> chvatal_type_index(const DegreeSequences& s, long long i,
                                                          const Rational& first,
                                                          const Rational& j_exact) {
  const long long n = s.n();
  const Rational need(n - i);
  long long j = 0;
  const bool out_first = Rational(s.out_at(i)) >= first;
  const bool in_first = Rational(s.in_at(i)) >= first;
  const bool clause_i = out_first || partner_ok(s, Direction::in, j_exact, need, &j);
  const bool clause_ii = in_first || partner_ok(s, Direction::out, j_exact, need, &j);
  if (clause_i && clause_ii) return std::nullopt;
  ConditionWitness w;
  w.i = i;
  w.d_out = s.out_at(i);
  w.d_in = s.in_at(i);
  w.threshold = first;
  j = ceil_of(j_exact);
  w.partner_index = j;
  if (s.in_range(j)) {
    w.partner_out = s.out_at(j);
    w.partner_in = s.in_at(j);
  }
  w.partner_threshold = need;
  w.clause = clause_i ? "ii" : (clause_ii ? "i" : "both");
  return w;
}

inline ConditionReport finish(ConditionReport r, std::optional<ConditionWitness> w) {
  if (w) {
    r.holds = false;
    r.first_violation = w->i;
    r.witness = std::move(w);
  }
  return r;
}

/// Runs the semi-exact-type loop over 1 <= i < limit (exact rational bound).
inline std::optional<ConditionWitness> chvatal_type_scan(const DegreeSequences& s,
                                                         const Rational& beta, bool cap,
                                                         const Rational& limit) {
  const long long n = s.n();
  const Rational bn = beta * Rational(n);
  const Rational half(n, 2);
  for (long long i = 1; Rational(i) < limit && i <= n; ++i) {
    Rational first = Rational(i) + bn;
    if (cap && half < first) first = half;
    if (auto w = chvatal_type_index(s, i, first, Rational(n - i) - bn)) return w;
  }
  return std::nullopt;
}

}  // namespace detail

/// Ghouila-Houri: min(delta+, delta-) >= n/2, compared as 2*delta0 >= n.
inline ConditionReport check_ghouila_houri(const Digraph& g) {
  ConditionReport r;
  r.condition = Condition::ghouila_houri;
  r.n = g.order();
  if (r.n < 2) fail(ErrorKind::parameter, "ghouila-houri check needs n >= 2");
  const auto s = degree_sequences(g);
  if (2 * std::min(s.out_at(1), s.in_at(1)) >= r.n) return r;
  ConditionWitness w;
  w.i = 1;
  w.d_out = s.out_at(1);
  w.d_in = s.in_at(1);
  w.threshold = Rational(r.n, 2);
  w.clause = "min-degree";
  return detail::finish(r, w);
}

/// Nash-Williams' Posa-type conjecture: d_i^{+-} >= i+1 for i < (n-1)/2 and
/// d^{+-}_{ceil(n/2)} >= ceil(n/2), the latter reported at i = ceil(n/2).
inline ConditionReport check_posa_digraph(const Digraph& g) {
  ConditionReport r;
  r.condition = Condition::posa;
  r.n = g.order();
  if (r.n < 3) fail(ErrorKind::parameter, "posa check needs n >= 3");
  const auto s = degree_sequences(g);
  const long long n = r.n;
  for (long long i = 1; 2 * i < n - 1; ++i) {
    if (s.out_at(i) >= i + 1 && s.in_at(i) >= i + 1) continue;
    ConditionWitness w;
    w.i = i;
    w.d_out = s.out_at(i);
    w.d_in = s.in_at(i);
    w.threshold = Rational(i + 1);
    w.clause = s.out_at(i) < i + 1 ? (s.in_at(i) < i + 1 ? "both" : "out") : "in";
    return detail::finish(r, w);
  }
  const long long h = (n + 1) / 2;
  if (s.out_at(h) >= h && s.in_at(h) >= h) return r;
  ConditionWitness w;
  w.i = h;
  w.d_out = s.out_at(h);
  w.d_in = s.in_at(h);
  w.threshold = Rational(h);
  w.clause = "ceil-half";
  return detail::finish(r, w);
}

/// Nash-Williams' Chvatal-type conjecture, including strong connectivity.
inline ConditionReport check_nash_williams_chvatal(const Digraph& g) {
  ConditionReport r;
  r.condition = Condition::nash_williams_chvatal;
  r.n = g.order();
  if (r.n < 3) fail(ErrorKind::parameter, "nwc check needs n >= 3");
  r.strongly_connected = is_strongly_connected(g);
  const auto s = degree_sequences(g);
  const long long n = r.n;
  for (long long i = 1; 2 * i < n; ++i) {
    // d_{n-i} >= n-i, index always in range here
    if (auto w = detail::chvatal_type_index(s, i, Rational(i + 1), Rational(n - i)))
      return detail::finish(r, w);
  }
  if (r.strongly_connected) return r;
  // reported as index 0 so that holds == !first_violation stays true
  ConditionWitness w;
  w.i = 0;
  w.clause = "strong-connectivity";
  return detail::finish(r, w);
}

/// Semi-exact form: d_i^+ >= min(i + beta n, n/2) or d^-_{n-i-beta n} >= n-i, and symmetric.
/// Indices j = ceil(n - i - beta n); j outside [1, n] makes the alternative vacuous.
inline ConditionReport check_semi_exact(const Digraph& g, const Rational& beta) {
  detail::check_beta(beta);
  ConditionReport r;
  r.condition = Condition::semi_exact;
  r.n = g.order();
  r.beta = beta;
  const auto s = degree_sequences(g);
  return detail::finish(r, detail::chvatal_type_scan(s, beta, true, Rational(r.n, 2)));
}

/// Capped Posa form: d_i^{+-} >= min(i + beta n, n/2) for i < n/2.
inline ConditionReport check_posa_min(const Digraph& g, const Rational& beta) {
  detail::check_beta(beta);
  ConditionReport r;
  r.condition = Condition::posa_min;
  r.n = g.order();
  r.beta = beta;
  const auto s = degree_sequences(g);
  const long long n = r.n;
  const Rational half(n, 2);
  for (long long i = 1; 2 * i < n; ++i) {
    Rational need = Rational(i) + beta * Rational(n);
    if (half < need) need = half;
    if (Rational(s.out_at(i)) >= need && Rational(s.in_at(i)) >= need) continue;
    ConditionWitness w;
    w.i = i;
    w.d_out = s.out_at(i);
    w.d_in = s.in_at(i);
    w.threshold = need;
    w.clause = Rational(s.out_at(i)) < need ? "out" : "in";
    return detail::finish(r, w);
  }
  return r;
}

/// kot: the semi-exact condition without the n/2 cap.
inline ConditionReport check_kot(const Digraph& g, const Rational& beta) {
  detail::check_beta(beta);
  ConditionReport r;
  r.condition = Condition::kot;
  r.n = g.order();
  r.beta = beta;
  const auto s = degree_sequences(g);
  return detail::finish(r, detail::chvatal_type_scan(s, beta, false, Rational(r.n, 2)));
}

inline ConditionReport check_condition(const Digraph& g, Condition c, const Rational& beta) {
  switch (c) {
    case Condition::ghouila_houri: return check_ghouila_houri(g);
    case Condition::posa: return check_posa_digraph(g);
    case Condition::nash_williams_chvatal: return check_nash_williams_chvatal(g);
    case Condition::semi_exact: return check_semi_exact(g, beta);
    case Condition::posa_min: return check_posa_min(g, beta);
    case Condition::kot: return check_kot(g, beta);
  }
  return check_semi_exact(g, beta);
}

struct SemidegreeDerivation {
  bool ok = true;
  std::optional<int> witness_vertex;
};

/// The consequence delta^{+-}(g) >= beta n of the semi-exact condition.
/// Throws precondition if g does not satisfy check_semi_exact(g, beta).
inline SemidegreeDerivation derive_min_semidegree_report(const Digraph& g, const Rational& beta) {
  if (!check_semi_exact(g, beta).holds)
    fail(ErrorKind::precondition, "graph does not satisfy the semi-exact condition");
  const Rational bn = beta * Rational(g.order());
  for (int v = 0; v < g.order(); ++v)
    if (Rational(g.out_degree(v)) < bn || Rational(g.in_degree(v)) < bn) return {false, v};
  return {};
}

inline bool derive_min_semidegree(const Digraph& g, const Rational& beta) {
  return derive_min_semidegree_report(g, beta).ok;
}

/// True iff the semi-exact clauses over i < n/2 agree with the clauses over i < n - beta n.
inline bool full_range_equivalence(const Digraph& g, const Rational& beta) {
  detail::check_beta(beta);
  const auto s = degree_sequences(g);
  const long long n = s.n();
  const bool half = !detail::chvatal_type_scan(s, beta, true, Rational(n, 2)).has_value();
  const bool full =
      !detail::chvatal_type_scan(s, beta, true, Rational(n) - beta * Rational(n)).has_value();
  return half == full;
}

/// I = {0..k-1} independent, K = {k..n-1} complete, X = {k..2k-1} joined both ways to I.
inline Digraph gen_extremal_chvatal(int n, int k) {
  if (k < 1 || 2 * k >= n) fail(ErrorKind::parameter, "need 1 <= k < n/2");
  std::vector<Edge> e;
  for (int u = k; u < n; ++u)
    for (int v = k; v < n; ++v)
      if (u != v) e.emplace_back(u, v);
  for (int i = 0; i < k; ++i)
    for (int x = k; x < 2 * k; ++x) {
      e.emplace_back(i, x);
      e.emplace_back(x, i);
    }
  return Digraph(n, e);
}

/// Vertices 1..n map to 0..n-1.  All forward edges, plus complete blocks on the
/// first an+1 and the last an+1 vertices.
inline Digraph gen_concluding_example(int n, const Rational& a) {
  if (a <= 0 || a >= Rational(1, 2)) fail(ErrorKind::parameter, "need 0 < a < 1/2");
  const Rational an = a * Rational(n);
  if (an.denominator() != 1) fail(ErrorKind::parameter, "a*n must be an integer");
  const int t = static_cast<int>(an.numerator());
  std::vector<Edge> e;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      const bool forward = i < j;
      const bool low_back = j < i && i <= t + 1;
      const bool high_back = j < i && j >= n - t;
      if (forward || low_back || high_back) e.emplace_back(i - 1, j - 1);
    }
  return Digraph(n, e);
}

}  // namespace hamlab

#endif  // HAMLAB_CONDITIONS_HPP
