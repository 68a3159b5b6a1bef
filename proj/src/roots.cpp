#include "lne/roots.hpp"

#include <cmath>
#include <utility>

#include "lne/errors.hpp"

namespace lne {

double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           double rel_tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) throw DomainError("root not bracketed");
  bool use_secant = true;
  for (int it = 0; it < 400; ++it) {
    double width = hi - lo;
    double scale = std::fmax(std::fabs(lo), std::fabs(hi));
    if (std::fabs(width) <= rel_tol * scale) break;
    double mid = lo + 0.5 * width;
    double x = mid;
    if (use_secant) {
      double s = hi - fhi * (hi - lo) / (fhi - flo);
      // keep the secant step strictly inside the bracket
      if (s > std::fmin(lo, hi) && s < std::fmax(lo, hi)) x = s;
    }
    use_secant = !use_secant;
    if (x == lo || x == hi) x = mid;
    if (x == lo || x == hi) break;
    double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx < 0.0) == (flo < 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
  }
  return std::fabs(flo) < std::fabs(fhi) ? lo : hi;
}

double minimize_golden(const std::function<double(double)>& f, double lo, double hi,
                       int iterations) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations && c < d; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  double best = fc < fd ? c : d;
  double fb = std::fmin(fc, fd);
  // endpoints can win for boundary minima
  if (f(lo) < fb) return lo;
  if (f(hi) < fb) return hi;
  return best;
}

}  // namespace lne
