#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lne/germs.hpp"
#include "lne/point.hpp"
#include "lne/tangency.hpp"

namespace lne {

struct MedialParams {
  int density = 32;         // samples per search radius
  double tau = 1e-3;        // relative equidistance tolerance
  double theta_min = 0.2;   // radians
};

/// Nearest points of the set to a query point, grouped into clusters.
struct NearestPointCluster {
  Point query;
  double distance = 0.0;
  std::vector<Point> representatives;  // one per cluster, closest first
  std::vector<int> pieces;             // piece of each representative
  int cluster_count = 0;
  double max_pair_angle = 0.0;
  double spacing = 0.0;  // final sampling spacing
};

/// Throws OnSetError when x lies on the set and ResolutionError when surface
/// sampling at `density` cannot resolve distances to within tau.
NearestPointCluster nearest_point_set(const Point& x, const GermSet& set, const MedialParams& params = {});

/// Axis-aligned box; an axis with lo == hi contributes a single layer.
struct Box {
  Point lo;
  Point hi;
};

enum class MedialSource { GRID, BISECTOR };

struct MedialPoint {
  Point p;
  NearestPointCluster cluster;
  double resolution = 0.0;
  double scale = 0.0;  // trace scale; 0 for grid points
};

struct MedialAxisSample {
  std::vector<MedialPoint> points;
  MedialSource source = MedialSource::GRID;
  double resolution = 0.0;
  std::vector<std::string> piece_names;
};

/// Grid nodes at spacing h whose nearest-point set has at least two
/// clusters. Nodes closer than h to the set are skipped. Where the nearest
/// branch changes along a grid edge, the equidistant point on the edge is
/// solved for and kept when it is a medial point.
MedialAxisSample extract_medial_axis_grid(const GermSet& set, const Box& window, double h,
                                          const MedialParams& params = {});

struct TraceFailure {
  double scale;
  std::string message;
};

struct BisectorTrace {
  MedialAxisSample sample;
  std::vector<TraceFailure> failures;
};

/// Points p with ||p|| = t and d(p, b1) = d(p, b2), one per scale, solved on
/// the shorter circle arc between the branch points at norm t.
BisectorTrace trace_bisector_2d(const PuiseuxBranch& b1, const PuiseuxBranch& b2, std::span<const double> scales,
                                const MedialParams& params = {});

/// Bisectors between angularly adjacent branches of a plane set, evaluated
/// against the whole set; only genuine medial points are kept.
BisectorTrace trace_medial_2d(const GermSet& set, std::span<const double> scales, const MedialParams& params = {});

struct MedialBranch {
  SampledArc arc;
  std::vector<int> pieces;  // pieces the branch is equidistant from
  HalfLine tangent;
  std::optional<double> merge_scale;  // scale at which it merged into another branch
};

/// Groups axis points near each sphere ||p|| = t into connected clusters and
/// tracks them towards 0. Tracks with fewer than five scales are dropped.
std::vector<MedialBranch> medial_branch_germs(const MedialAxisSample& axis, std::span<const double> scales);

/// CSV with columns x, y[, z], distance, cluster_count, max_pair_angle.
std::string medial_csv(const MedialAxisSample& axis, std::size_t ambient_dim);
/// Overlay of set samples and axis points; plane sets only.
std::string medial_svg(const MedialAxisSample& axis, const GermSet& set, const Box& window);

}  // namespace lne
