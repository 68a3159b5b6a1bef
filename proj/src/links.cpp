#include "lne/links.hpp"

#include <algorithm>
#include <cmath>

#include "lne/errors.hpp"

namespace lne {

LinkSample link_section(const GermSet& set, double t, const NormSpec& norm, int density, double band) {
  if (!(t > 0.0)) throw InputError("link scale must be positive");
  if (density < 8) throw InputError("density must be at least 8");
  LinkSample link;
  link.t = t;
  link.norm = norm;
  link.band = band;
  for (const auto& s : sample_sphere(set, t, norm, 8 * density)) {
    if (std::fabs(norm(s.p) - t) > band * t) continue;
    link.points.push_back(s.p);
    link.piece.push_back(s.piece);
  }
  if (link.empty()) return link;

  // largest gap between consecutive samples of a piece
  double gap = 0.0;
  for (std::size_t i = 1; i < link.points.size(); ++i)
    if (link.piece[i] == link.piece[i - 1]) gap = std::max(gap, distance(link.points[i], link.points[i - 1]));
  link.graph_radius = gap > 0.0 ? 4.0 * gap : 1e-6 * t;

  PointCloud cloud;
  cloud.points = link.points;
  cloud.piece = link.piece;
  cloud.scale = t;
  link.graph.emplace(cloud, link.graph_radius);
  link.component_count = link.graph->component_count();
  for (std::size_t i = 0; i < link.points.size(); ++i)
    link.component.push_back(link.graph->component_of(link.graph->node_of(i)));
  return link;
}

double link_constant(const LinkSample& link) {
  double c = 1.0;
  if (!link.graph) return c;
  const auto& g = *link.graph;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    auto d = g.distances_from(static_cast<int>(i));
    for (std::size_t j = i + 1; j < g.node_count(); ++j) {
      if (!std::isfinite(d[j])) continue;
      double e = distance(g.node_point(static_cast<int>(i)), g.node_point(static_cast<int>(j)));
      if (e > 0.0) c = std::max(c, d[j] / e);
    }
  }
  return c;
}

double link_separation(const LinkSample& link) {
  double best = kInfinity;
  if (!link.graph || link.component_count < 2) return best;
  const auto& g = *link.graph;
  for (std::size_t i = 0; i < g.node_count(); ++i)
    for (std::size_t j = i + 1; j < g.node_count(); ++j)
      if (g.component_of(static_cast<int>(i)) != g.component_of(static_cast<int>(j)))
        best = std::min(best, distance(g.node_point(static_cast<int>(i)), g.node_point(static_cast<int>(j))));
  return best;
}

std::string to_string(Trend trend) {
  switch (trend) {
    case Trend::BOUNDED: return "BOUNDED";
    case Trend::DIVERGING: return "DIVERGING";
    default: return "UNDECIDED";
  }
}

LLNEReport llne_test(const GermSet& set, std::span<const double> scales, const NormSpec& norm, int density) {
  if (scales.size() < 5) throw InsufficientDataError("link test needs at least 5 scales");
  LLNEReport rep;
  rep.norm = norm;
  std::vector<double> ts, cs;
  for (double t : scales) {
    LinkSample link = link_section(set, t, norm, density);
    LinkScale s;
    s.t = t;
    s.empty = link.empty();
    if (!s.empty) {
      s.component_count = link.component_count;
      s.c_t = link_constant(link);
      s.min_separation = link_separation(link);
      ts.push_back(t);
      cs.push_back(s.c_t);
      rep.k_est = std::min(rep.k_est, s.min_separation / t);
    }
    rep.per_scale.push_back(s);
  }
  if (ts.empty()) throw InputError("every link section is empty");
  if (ts.size() >= 5) {
    rep.slope = estimate_order(ts, cs).slope;
    if (std::fabs(rep.slope) <= 0.1)
      rep.trend = Trend::BOUNDED;
    else if (rep.slope <= -0.2)
      rep.trend = Trend::DIVERGING;
  }
  return rep;
}

LinkCriterion link_criterion_verdict(const GermSet& set, std::span<const double> scales, int density,
                                     const NormSpec& norm, double k_min) {
  LinkCriterion out;
  out.k_min = k_min;
  out.report = llne_test(set, scales, norm, density);
  const auto& ps = out.report.per_scale;

  std::vector<double> ts, sep;
  std::size_t count = 0;
  for (const auto& s : ps) {
    if (s.empty) continue;
    if (count != 0 && s.component_count != count) {
      out.reason = "component count unstable across scales";
      return out;
    }
    count = s.component_count;
    if (std::isfinite(s.min_separation) && s.min_separation > 0.0) {
      ts.push_back(s.t);
      sep.push_back(s.min_separation / s.t);
    }
  }
  if (ts.size() >= 5) out.separation_order = estimate_order(ts, sep);

  if (out.report.trend == Trend::DIVERGING) {
    out.verdict = Verdict::NOT_LNE;
    out.reason = "link constant diverges";
  } else if (out.report.k_est < k_min && out.separation_order && out.separation_order->slope >= 0.2) {
    out.verdict = Verdict::NOT_LNE;
    out.reason = "components approach faster than t";
  } else if (out.report.trend == Trend::BOUNDED && out.report.k_est >= k_min) {
    out.verdict = Verdict::LNE;
    out.reason = "links bounded and components separated";
  } else {
    out.reason = "no decisive trend";
  }
  return out;
}

namespace {

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const LLNEReport& report) {
  nlohmann::json scales = nlohmann::json::array();
  for (const auto& s : report.per_scale) {
    if (s.empty) {
      scales.push_back({{"t", s.t}, {"empty", true}});
      continue;
    }
    scales.push_back({{"t", s.t},
                      {"component_count", s.component_count},
                      {"C_t", s.c_t},
                      {"min_separation", finite_or_null(s.min_separation)}});
  }
  nlohmann::json norm = {{"kind", report.norm.name()}};
  if (report.norm.kind == NormSpec::Kind::MaxV) norm["weights"] = report.norm.weights;
  return {{"norm", norm},
          {"scales", scales},
          {"trend", to_string(report.trend)},
          {"slope", report.slope},
          {"K_est", finite_or_null(report.k_est)}};
}

nlohmann::json to_json(const LinkCriterion& c) {
  nlohmann::json v = {{"verdict", to_string(c.verdict)}, {"reason", c.reason}, {"K_min", c.k_min}};
  if (c.separation_order)
    v["separation_order"] = {{"slope", c.separation_order->slope}, {"residual", c.separation_order->residual}};
  return {{"verdict", v}, {"report", to_json(c.report)}};
}

}  // namespace lne
