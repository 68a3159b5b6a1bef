#pragma once

// Truncated generalized power series with exact rational exponents. Used by
// the separation-order oracle; not part of the public interface.

#include <cmath>
#include <map>

#include "lne/point.hpp"
#include "lne/rational.hpp"

namespace lne::detail {

using Series = std::map<Rational, double>;

inline void add_term(Series& s, const Rational& e, double c, const Rational& bound) {
  if (e > bound) return;
  s[e] += c;
}

inline Series multiply(const Series& a, const Series& b, const Rational& bound) {
  Series out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) add_term(out, ea + eb, ca * cb, bound);
  return out;
}

/// (1 + w)^power where every exponent of w is positive.
inline Series pow_one_plus(const Series& w, double power, const Rational& bound) {
  Series out{{Rational(0), 1.0}};
  if (w.empty()) return out;
  Rational step = w.begin()->first;
  Series wk{{Rational(0), 1.0}};
  double binom = 1.0;
  for (int k = 1; Rational(k) * step <= bound; ++k) {
    wk = multiply(wk, w, bound);
    binom *= (power - (k - 1)) / k;
    if (wk.empty()) break;
    for (const auto& [e, c] : wk) add_term(out, e, binom * c, bound);
  }
  return out;
}

/// Exponent-wise substitution s = k t^{1/a} (1 + w(t)) into sum c_m s^{b_m}.
inline Series substitute(const Series& in_s, double k, const Rational& inv_a, const Series& w,
                         const Rational& bound) {
  Series out;
  for (const auto& [b, c] : in_s) {
    Rational shift = b * inv_a;
    if (shift > bound) continue;
    Series f = pow_one_plus(w, b.to_double(), bound - shift);
    double scale = c * std::pow(k, b.to_double());
    for (const auto& [e, cf] : f) add_term(out, e + shift, scale * cf, bound);
  }
  return out;
}

inline bool nearly_equal(const Series& a, const Series& b, double tol) {
  auto keys = a;
  for (const auto& [e, c] : b) keys[e];
  for (const auto& [e, c] : keys) {
    double va = a.count(e) ? a.at(e) : 0.0;
    double vb = b.count(e) ? b.at(e) : 0.0;
    if (std::fabs(va - vb) > tol) return false;
  }
  return true;
}

}  // namespace lne::detail
