#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lne {

using Point = std::vector<double>;

inline Point zeros(std::size_t n) { return Point(n, 0.0); }

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline Point operator-(const Point& a, const Point& b) {
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Point operator+(const Point& a, const Point& b) {
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Point operator*(double s, const Point& a) {
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

/// Angle at `apex` between the rays towards `a` and `b`, in [0, pi].
inline double angle_at(const Point& apex, const Point& a, const Point& b) {
  Point u = a - apex;
  Point v = b - apex;
  double nu = norm(u), nv = norm(v);
  if (nu == 0.0 || nv == 0.0) return 0.0;
  double c = dot(u, v) / (nu * nv);
  return std::acos(std::fmax(-1.0, std::fmin(1.0, c)));
}

/// Either the Euclidean norm or the weighted max norm max_i v_i |x_i|.
struct NormSpec {
  enum class Kind { Euclid, MaxV };
  Kind kind = Kind::Euclid;
  std::vector<double> weights;

  static NormSpec euclid() { return {}; }
  static NormSpec maxv(std::vector<double> w) { return {Kind::MaxV, std::move(w)}; }

  double operator()(std::span<const double> x) const {
    if (kind == Kind::Euclid) return norm(x);
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double w = i < weights.size() ? weights[i] : 1.0;
      m = std::fmax(m, w * std::fabs(x[i]));
    }
    return m;
  }

  std::string name() const { return kind == Kind::Euclid ? "euclid" : "maxv"; }
};

}  // namespace lne
