#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lne/germs.hpp"
#include "lne/metrics.hpp"
#include "lne/point.hpp"
#include "lne/tangency.hpp"

namespace lne {

/// Section of a germ by the norm sphere {||x|| = t}.
struct LinkSample {
  double t = 0.0;
  NormSpec norm;
  double band = 0.02;
  std::vector<Point> points;
  std::vector<int> piece;      // per point
  std::vector<int> component;  // per point
  std::size_t component_count = 0;
  double graph_radius = 0.0;
  std::optional<NeighborhoodGraph> graph;  // absent for an empty link

  bool empty() const { return points.empty(); }
};

/// Branch points are solved exactly on the sphere; each surface piece is
/// sampled by solving along r for 8 * density values of u. Components are
/// those of the piece-aware graph with radius 4x the largest sample gap.
LinkSample link_section(const GermSet& set, double t, const NormSpec& norm, int density = 32, double band = 0.02);

/// Largest ratio of graph distance to Euclidean distance over point pairs in
/// one component; 1 when no component has two points.
double link_constant(const LinkSample& link);
/// Smallest Euclidean distance between points of distinct components;
/// infinity for a connected link.
double link_separation(const LinkSample& link);

enum class Trend { BOUNDED, DIVERGING, UNDECIDED };
std::string to_string(Trend trend);

struct LinkScale {
  double t = 0.0;
  bool empty = false;
  std::size_t component_count = 0;
  double c_t = 1.0;
  double min_separation = kInfinity;
};

struct LLNEReport {
  NormSpec norm;
  std::vector<LinkScale> per_scale;
  Trend trend = Trend::UNDECIDED;
  double slope = 0.0;  // of log C(t) against log t
  double k_est = kInfinity;
};

/// Throws InsufficientDataError below five scales and InputError when every
/// section is empty.
LLNEReport llne_test(const GermSet& set, std::span<const double> scales, const NormSpec& norm, int density = 32);

struct LinkCriterion {
  Verdict verdict = Verdict::UNDECIDED;
  std::string reason;
  LLNEReport report;
  double k_min = 0.05;
  std::optional<OrderEstimate> separation_order;  // of min_separation / t
};

LinkCriterion link_criterion_verdict(const GermSet& set, std::span<const double> scales, int density = 32,
                                     const NormSpec& norm = NormSpec::euclid(), double k_min = 0.05);

nlohmann::json to_json(const LLNEReport& report);
nlohmann::json to_json(const LinkCriterion& criterion);

}  // namespace lne
