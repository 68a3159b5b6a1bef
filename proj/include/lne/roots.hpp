#pragma once

#include <functional>

namespace lne {

/// Root of f on [lo, hi] given f(lo) and f(hi) of opposite sign. Bisection
/// interleaved with secant steps; stops when the bracket is below
/// rel_tol * max(|lo|, |hi|) or stops shrinking in floating point.
double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           double rel_tol = 1e-15);

/// Minimizer of f on [lo, hi] by golden-section search (f assumed unimodal).
double minimize_golden(const std::function<double(double)>& f, double lo, double hi,
                       int iterations = 200);

}  // namespace lne
