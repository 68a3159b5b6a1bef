#include "lne/tangency.hpp"

#include <algorithm>
#include <cmath>

#include "lne/errors.hpp"
#include "lne/metrics.hpp"

namespace lne {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::LNE: return "LNE";
    case Verdict::NOT_LNE: return "NOT_LNE";
    default: return "UNDECIDED";
  }
}

OrderEstimate estimate_order(std::span<const double> scales, std::span<const double> values) {
  if (scales.size() != values.size()) throw InputError("scales and values differ in length");
  if (scales.size() < 5) throw InsufficientDataError("order estimation needs at least 5 scales");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw InputError("order undefined: f(t) must be positive and finite");
    if (!(scales[i] > 0.0)) throw InputError("scales must be positive");
    if (i > 0 && !(scales[i] < scales[i - 1])) throw InputError("scales must be strictly decreasing");
  }
  const std::size_t n = scales.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(scales[i]);
    my += std::log(values[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = std::log(scales[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(values[i]) - my);
  }
  OrderEstimate e;
  e.slope = sxy / sxx;
  e.intercept = my - e.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = std::log(values[i]) - (e.intercept + e.slope * std::log(scales[i]));
    ss += r * r;
  }
  e.residual = std::sqrt(ss / n);
  e.scales.assign(scales.begin(), scales.end());
  e.confident = std::isfinite(e.slope) && e.residual <= 0.02;
  return e;
}

std::vector<double> dyadic_scales(int k_lo, int k_hi) {
  std::vector<double> s;
  for (int k = k_lo; k <= k_hi; ++k) s.push_back(std::ldexp(1.0, -k));
  return s;
}

std::vector<double> geometric_scales(double t_min, double t_max, int levels) {
  if (!(t_min > 0.0 && t_min < t_max)) throw InputError("need 0 < t_min < t_max");
  if (levels < 5) throw InsufficientDataError("at least 5 scale levels are required");
  std::vector<double> s;
  const double ratio = std::log(t_min / t_max) / (levels - 1);
  const double step2 = ratio / std::log(2.0);
  const bool dyadic = std::fabs(step2 - std::round(step2)) < 1e-9;
  for (int i = 0; i < levels; ++i) {
    if (dyadic)
      s.push_back(std::ldexp(t_max, static_cast<int>(std::round(step2)) * i));
    else
      s.push_back(i == levels - 1 ? t_min : t_max * std::exp(ratio * i));
  }
  return s;
}

TangencyConfig default_tangency_config() {
  TangencyConfig c;
  c.scales = dyadic_scales();
  return c;
}

OrderEstimate outer_tangency_order(const PuiseuxBranch& b1, const PuiseuxBranch& b2,
                                   std::span<const double> scales) {
  std::optional<SeparationOrder> oracle;
  try {
    oracle = symbolic_separation_order(b1, b2);
  } catch (const UndecidableError&) {
  }
  auto p1 = reparametrize_by_distance(b1, scales);
  auto p2 = reparametrize_by_distance(b2, scales);
  std::vector<double> d(scales.size());
  for (std::size_t k = 0; k < scales.size(); ++k) {
    d[k] = distance(p1[k], p2[k]);
    if (d[k] <= 1e-12 * scales[k] || d[k] == 0.0) {
      if (!oracle || oracle->infinite || d[k] == 0.0)
        throw IndistinguishableError("branches '" + b1.label() + "' and '" + b2.label() +
                                     "' coincide at scale " + std::to_string(scales[k]));
    }
  }
  OrderEstimate e = estimate_order(scales, d);
  if (oracle && !oracle->infinite) e.exact = oracle->order;
  return e;
}

OrderEstimate inner_tangency_order(const GermSet& set, std::size_t b1, std::size_t b2,
                                   std::span<const double> scales, int density, double radius_factor) {
  if (b1 >= set.branches.size() || b2 >= set.branches.size()) throw InputError("branch index out of range");
  std::vector<double> d(scales.size());
  for (std::size_t k = 0; k < scales.size(); ++k) {
    const double t = scales[k];
    PointCloud cloud = sample_cloud(set, t, density);
    NeighborhoodGraph g(cloud, radius_factor * t / density);
    double one[] = {t};
    Point x = reparametrize_by_distance(set.branches[b1], one)[0];
    Point y = reparametrize_by_distance(set.branches[b2], one)[0];
    d[k] = g.inner_distance(g.nearest_node(x), g.nearest_node(y));
    if (!std::isfinite(d[k]))
      throw DisconnectedError("branches '" + set.branches[b1].label() + "' and '" + set.branches[b2].label() +
                                  "' are disconnected at scale " + std::to_string(t),
                              t);
  }
  return estimate_order(scales, d);
}

Verdict decide(const OrderEstimate& tord, const OrderEstimate& tord_inn, double tolerance) {
  // a fit noisier than the tolerance can resolve decides nothing
  const double max_residual = tolerance / 5;
  if (!tord.confident || !tord_inn.confident || tord.residual > max_residual || tord_inn.residual > max_residual)
    return Verdict::UNDECIDED;
  return std::fabs(tord.slope - tord_inn.slope) <= tolerance ? Verdict::LNE : Verdict::NOT_LNE;
}

namespace {

TangencyReport make_report(std::string a, std::string b, OrderEstimate outer, OrderEstimate inner, double tol) {
  TangencyReport r;
  r.first = std::move(a);
  r.second = std::move(b);
  r.verdict = decide(outer, inner, tol);
  r.lojasiewicz = outer.slope / inner.slope;
  r.tord = std::move(outer);
  r.tord_inn = std::move(inner);
  return r;
}

GermExponent fold_pairs(std::vector<TangencyReport> pairs) {
  GermExponent g;
  bool all_lne = true;
  for (const auto& r : pairs) {
    if (r.verdict == Verdict::UNDECIDED) {
      g.lower_bound = true;
      all_lne = false;
      continue;
    }
    if (r.verdict == Verdict::NOT_LNE) {
      g.verdict = Verdict::NOT_LNE;
      all_lne = false;
    }
    if (g.first.empty() || r.lojasiewicz > g.value) {
      g.value = std::max(1.0, r.lojasiewicz);
      g.first = r.first;
      g.second = r.second;
    }
  }
  if (g.verdict != Verdict::NOT_LNE) g.verdict = all_lne ? Verdict::LNE : Verdict::UNDECIDED;
  g.pairs = std::move(pairs);
  return g;
}

}  // namespace

TangencyReport pair_verdict(const GermSet& set, std::size_t b1, std::size_t b2, const TangencyConfig& config) {
  OrderEstimate outer = outer_tangency_order(set.branches.at(b1), set.branches.at(b2), config.scales);
  OrderEstimate inner = inner_tangency_order(set, b1, b2, config.scales, config.density, config.radius_factor);
  return make_report(set.branches[b1].label(), set.branches[b2].label(), std::move(outer), std::move(inner),
                     config.order_tolerance);
}

GermExponent lojasiewicz_germ(const GermSet& set, const TangencyConfig& config) {
  if (set.branches.empty()) throw InputError("germ '" + set.label + "' has no branches");
  std::vector<TangencyReport> pairs;
  for (std::size_t i = 0; i < set.branches.size(); ++i)
    for (std::size_t j = i + 1; j < set.branches.size(); ++j) pairs.push_back(pair_verdict(set, i, j, config));
  return fold_pairs(std::move(pairs));
}

namespace {

// Polyline from the origin through the arc points of norm <= t, densified so
// no segment exceeds `spacing`.
void append_arc(PointCloud& cloud, const SampledArc& arc, double t, double spacing, int piece) {
  std::vector<Point> verts{zeros(arc.points.front().size())};
  std::vector<std::size_t> order(arc.points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return arc.scales[a] < arc.scales[b]; });
  for (auto i : order)
    if (arc.scales[i] <= t * (1 + 1e-12)) verts.push_back(arc.points[i]);
  cloud.points.push_back(verts.front());
  cloud.piece.push_back(piece);
  for (std::size_t i = 1; i < verts.size(); ++i) {
    double len = distance(verts[i - 1], verts[i]);
    int n = std::max(1, static_cast<int>(std::ceil(len / spacing)));
    for (int k = 1; k <= n; ++k) {
      double s = static_cast<double>(k) / n;
      cloud.points.push_back((1 - s) * verts[i - 1] + s * verts[i]);
      cloud.piece.push_back(piece);
    }
  }
}

}  // namespace

TangencyReport sampled_pair_verdict(const SampledArc& a, const SampledArc& b, const TangencyConfig& config) {
  std::vector<double> scales, outer, inner;
  for (std::size_t i = 0; i < a.scales.size(); ++i)
    for (std::size_t j = 0; j < b.scales.size(); ++j) {
      if (std::fabs(a.scales[i] - b.scales[j]) > 1e-12 * a.scales[i]) continue;
      const double t = a.scales[i];
      double d = distance(a.points[i], b.points[j]);
      if (d == 0.0)
        throw IndistinguishableError("arcs '" + a.label + "' and '" + b.label + "' meet at scale " + std::to_string(t));
      PointCloud cloud;
      cloud.scale = t;
      cloud.piece_names = {a.label, b.label};
      const double spacing = t / config.density;
      append_arc(cloud, a, t, spacing, 0);
      append_arc(cloud, b, t, spacing, 1);
      NeighborhoodGraph g(cloud, config.radius_factor * spacing);
      double di = g.inner_distance(g.nearest_node(a.points[i]), g.nearest_node(b.points[j]));
      if (!std::isfinite(di))
        throw DisconnectedError("arcs '" + a.label + "' and '" + b.label + "' disconnected", t);
      scales.push_back(t);
      outer.push_back(d);
      inner.push_back(di);
    }
  // scales in decreasing order
  std::vector<std::size_t> idx(scales.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto x, auto y) { return scales[x] > scales[y]; });
  std::vector<double> s2, o2, i2;
  for (auto i : idx) {
    s2.push_back(scales[i]);
    o2.push_back(outer[i]);
    i2.push_back(inner[i]);
  }
  return make_report(a.label, b.label, estimate_order(s2, o2), estimate_order(s2, i2), config.order_tolerance);
}

GermExponent lojasiewicz_sampled(const std::vector<SampledArc>& arcs, const TangencyConfig& config) {
  std::vector<TangencyReport> pairs;
  for (std::size_t i = 0; i < arcs.size(); ++i)
    for (std::size_t j = i + 1; j < arcs.size(); ++j) pairs.push_back(sampled_pair_verdict(arcs[i], arcs[j], config));
  return fold_pairs(std::move(pairs));
}

}  // namespace lne
