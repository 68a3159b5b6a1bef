#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "lne/germs.hpp"
#include "lne/point.hpp"

namespace lne {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

double induced_distance(const Point& x, const Point& y);

/// Radius graph over a point cloud. Points from different pieces that
/// coincide within the snapping tolerance (1e-10 * scale) are merged into one
/// node; otherwise edges only join points of a common piece. Each piece is
/// treated as normally embedded, so cross-piece shortcuts between tangent
/// branches never appear.
class NeighborhoodGraph {
 public:
  struct Edge {
    int to;
    double weight;
  };

  NeighborhoodGraph(const PointCloud& cloud, double radius);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  std::size_t component_count() const { return component_count_; }
  double radius() const { return radius_; }
  double scale() const { return scale_; }

  const Point& node_point(int node) const { return nodes_[node]; }
  const std::vector<int>& node_pieces(int node) const { return pieces_[node]; }
  const std::vector<Edge>& neighbors(int node) const { return adjacency_[node]; }
  int component_of(int node) const { return component_[node]; }
  /// Graph node holding the given cloud point.
  int node_of(std::size_t cloud_index) const { return node_of_[cloud_index]; }
  /// Node nearest to p (Euclidean).
  int nearest_node(const Point& p) const;

  /// Shortest-path length; kInfinity when the nodes are disconnected.
  double inner_distance(int i, int j) const;
  std::vector<double> distances_from(int source) const;

 private:
  std::vector<Point> nodes_;
  std::vector<std::vector<int>> pieces_;
  std::vector<std::vector<Edge>> adjacency_;
  std::vector<int> node_of_;
  std::vector<int> component_;
  std::size_t edge_count_ = 0;
  std::size_t component_count_ = 0;
  double radius_;
  double scale_;
};

NeighborhoodGraph build_graph(const PointCloud& cloud, double radius);

/// A normally embedded piece with a membership test.
struct Pancake {
  std::string label;
  std::function<bool(const Point&, double tol)> contains;
  std::vector<Point> sample;
};

/// Pancake through the points of a polyline (a segment when two points).
Pancake polyline_pancake(std::string label, std::vector<Point> vertices);

struct PancakeJunction {
  Point point;
  int first;
  int second;
};

struct PancakeComplex {
  std::vector<Pancake> pancakes;
  std::vector<PancakeJunction> junctions;
  double scale = 1.0;

  double snap_tol() const { return 1e-6 * scale; }
  /// Throws InputError when a junction misses one of its pancakes.
  void validate() const;
};

struct PancakeSequence {
  std::vector<Point> points;
  std::vector<int> pancake;  // pancake used by each consecutive pair
  double length = kInfinity;
  bool connected = false;
};

/// Minimal summed hop length over admissible pancake sequences from x to y.
PancakeSequence pancake_distance(const PancakeComplex& complex, const Point& x, const Point& y);

}  // namespace lne
