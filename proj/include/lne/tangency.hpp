#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lne/germs.hpp"
#include "lne/rational.hpp"

namespace lne {

/// Log-log fit of f(t) ~ a t^slope over a decreasing scale grid.
struct OrderEstimate {
  double slope = 0.0;
  double intercept = 0.0;  // log a
  double residual = 0.0;   // RMS of the fit in log space
  std::vector<double> scales;
  bool confident = false;
  std::optional<Rational> exact;  // attached when the series oracle decides
};

/// Throws InputError for non-positive values or non-decreasing scales and
/// InsufficientDataError below five scales.
OrderEstimate estimate_order(std::span<const double> scales, std::span<const double> values);

enum class Verdict { LNE, NOT_LNE, UNDECIDED };
std::string to_string(Verdict v);

struct TangencyConfig {
  std::vector<double> scales;  // strictly decreasing
  int density = 32;
  double radius_factor = 4.0;
  double order_tolerance = 0.1;
};

/// t_k = 2^-k for k = k_lo..k_hi.
std::vector<double> dyadic_scales(int k_lo = 6, int k_hi = 16);
/// `levels` geometric scales from t_max down to t_min.
std::vector<double> geometric_scales(double t_min, double t_max, int levels);
TangencyConfig default_tangency_config();

OrderEstimate outer_tangency_order(const PuiseuxBranch& b1, const PuiseuxBranch& b2,
                                   std::span<const double> scales);

/// Order of the graph-geodesic distance inside the whole set between the
/// distance-parametrized points of two of its branches.
OrderEstimate inner_tangency_order(const GermSet& set, std::size_t b1, std::size_t b2,
                                   std::span<const double> scales, int density, double radius_factor = 4.0);

struct TangencyReport {
  std::string first;
  std::string second;
  OrderEstimate tord;
  OrderEstimate tord_inn;
  Verdict verdict = Verdict::UNDECIDED;
  double lojasiewicz = 1.0;  // tord / tord_inn
};

/// LNE iff both estimates are confident with residual <= tolerance / 5 and
/// |tord - tord_inn| <= tolerance.
Verdict decide(const OrderEstimate& tord, const OrderEstimate& tord_inn, double tolerance);

TangencyReport pair_verdict(const GermSet& set, std::size_t b1, std::size_t b2, const TangencyConfig& config);

struct GermExponent {
  double value = 1.0;
  std::string first;
  std::string second;
  bool lower_bound = false;  // some pair was undecided
  Verdict verdict = Verdict::LNE;
  std::vector<TangencyReport> pairs;
};

/// Supremum of the pairwise exponent over the branch pairs of the set.
GermExponent lojasiewicz_germ(const GermSet& set, const TangencyConfig& config);

/// A curve germ known only through its points at prescribed norms
/// (||points[k]|| = scales[k]), e.g. a recovered medial branch.
struct SampledArc {
  std::string label;
  std::vector<double> scales;
  std::vector<Point> points;
};

/// Outer order from pointwise distances; inner order from geodesics in the
/// union of the two arcs (polylines through the origin).
TangencyReport sampled_pair_verdict(const SampledArc& a, const SampledArc& b, const TangencyConfig& config);
GermExponent lojasiewicz_sampled(const std::vector<SampledArc>& arcs, const TangencyConfig& config);

}  // namespace lne
