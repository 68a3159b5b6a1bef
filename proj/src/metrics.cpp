#include "lne/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "lne/errors.hpp"

namespace lne {

double induced_distance(const Point& x, const Point& y) {
  if (x.size() != y.size()) throw InputError("points of different dimension");
  return distance(x, y);
}

namespace {

bool share_piece(const std::vector<int>& a, const std::vector<int>& b) {
  for (int p : a)
    if (std::find(b.begin(), b.end(), p) != b.end()) return true;
  return false;
}

// Calls f(i, j) for every pair i < j (in `order`) with |x_i - x_j| <= r on the
// first coordinate; callers filter by true distance.
template <class F>
void sweep_pairs(const std::vector<Point>& pts, double r, F&& f) {
  std::vector<int> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return pts[a][0] < pts[b][0]; });
  for (std::size_t a = 0; a < order.size(); ++a)
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      if (pts[order[b]][0] - pts[order[a]][0] > r) break;
      f(order[a], order[b]);
    }
}

}  // namespace

NeighborhoodGraph::NeighborhoodGraph(const PointCloud& cloud, double radius)
    : radius_(radius), scale_(cloud.scale) {
  if (cloud.points.empty()) throw InputError("cannot build a graph on an empty cloud");
  if (!(radius > 0.0)) throw InputError("graph radius must be positive");
  const double snap = 1e-10 * cloud.scale;
  // merge coincident points
  std::vector<int> parent(cloud.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); };
  sweep_pairs(cloud.points, snap, [&](int i, int j) {
    if (distance(cloud.points[i], cloud.points[j]) <= snap) parent[find(i)] = find(j);
  });
  node_of_.assign(cloud.size(), -1);
  std::vector<int> root_node(cloud.size(), -1);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    int r = find(static_cast<int>(i));
    if (root_node[r] < 0) {
      root_node[r] = static_cast<int>(nodes_.size());
      nodes_.push_back(cloud.points[r]);
      pieces_.emplace_back();
    }
    int n = root_node[r];
    node_of_[i] = n;
    int piece = cloud.piece.empty() ? 0 : cloud.piece[i];
    auto& ps = pieces_[n];
    if (std::find(ps.begin(), ps.end(), piece) == ps.end()) ps.push_back(piece);
  }
  adjacency_.assign(nodes_.size(), {});
  sweep_pairs(nodes_, radius, [&](int i, int j) {
    double d = distance(nodes_[i], nodes_[j]);
    if (d > radius || d == 0.0 || !share_piece(pieces_[i], pieces_[j])) return;
    adjacency_[i].push_back({j, d});
    adjacency_[j].push_back({i, d});
    ++edge_count_;
  });
  for (auto& adj : adjacency_)
    std::sort(adj.begin(), adj.end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
  component_.assign(nodes_.size(), -1);
  for (std::size_t s = 0; s < nodes_.size(); ++s) {
    if (component_[s] >= 0) continue;
    int c = static_cast<int>(component_count_++);
    std::vector<int> stack{static_cast<int>(s)};
    component_[s] = c;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (const auto& e : adjacency_[u])
        if (component_[e.to] < 0) {
          component_[e.to] = c;
          stack.push_back(e.to);
        }
    }
  }
}

int NeighborhoodGraph::nearest_node(const Point& p) const {
  int best = 0;
  double bd = kInfinity;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    double d = distance(nodes_[i], p);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::vector<double> NeighborhoodGraph::distances_from(int source) const {
  std::vector<double> dist(nodes_.size(), kInfinity);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.push({0.0, source});
  while (!queue.empty()) {
    auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (const auto& e : adjacency_[u]) {
      double nd = d + e.weight;
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        queue.push({nd, e.to});
      }
    }
  }
  return dist;
}

double NeighborhoodGraph::inner_distance(int i, int j) const {
  if (i == j) return 0.0;
  if (component_[i] != component_[j]) return kInfinity;
  // canonical source keeps the value symmetric in floating point; a path is
  // never shorter than the chord, so rounding below it is clamped away
  if (j < i) std::swap(i, j);
  return std::max(distances_from(i)[j], distance(nodes_[i], nodes_[j]));
}

NeighborhoodGraph build_graph(const PointCloud& cloud, double radius) { return NeighborhoodGraph(cloud, radius); }

namespace {

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  Point ab = b - a;
  double len2 = dot(ab, ab);
  double s = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return distance(p, a + s * ab);
}

}  // namespace

Pancake polyline_pancake(std::string label, std::vector<Point> vertices) {
  if (vertices.empty()) throw InputError("pancake '" + label + "' has no vertices");
  Pancake p;
  p.label = std::move(label);
  p.sample = vertices;
  p.contains = [v = std::move(vertices)](const Point& x, double tol) {
    if (v.size() == 1) return distance(x, v[0]) <= tol;
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
      if (point_segment_distance(x, v[i], v[i + 1]) <= tol) return true;
    return false;
  };
  return p;
}

void PancakeComplex::validate() const {
  const double tol = snap_tol();
  for (const auto& j : junctions) {
    if (j.first < 0 || j.second < 0 || j.first >= static_cast<int>(pancakes.size()) ||
        j.second >= static_cast<int>(pancakes.size()))
      throw InputError("junction refers to an unknown pancake");
    if (!pancakes[j.first].contains(j.point, tol) || !pancakes[j.second].contains(j.point, tol))
      throw InputError("junction sample not in both pancakes " + pancakes[j.first].label + ", " +
                       pancakes[j.second].label);
  }
}

namespace {

struct PancakeSearch {
  const std::vector<Point>& nodes;
  const std::vector<std::vector<bool>>& member;  // member[node][pancake]
  std::size_t pancake_count;
  std::vector<int> path{0};
  std::vector<int> hops;
  std::vector<bool> on_path;
  std::vector<bool> used;
  double best = kInfinity;
  std::vector<int> best_path, best_hops;

  PancakeSearch(const std::vector<Point>& n, const std::vector<std::vector<bool>>& m, std::size_t np)
      : nodes(n), member(m), pancake_count(np), on_path(n.size(), false), used(np, false) {
    on_path[0] = true;
  }

  void extend(double length) {
    if (length >= best) return;
    const int u = path.back();
    if (u == 1) {
      best = length;
      best_path = path;
      best_hops = hops;
      return;
    }
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      if (on_path[v]) continue;
      double step = distance(nodes[u], nodes[v]);
      if (length + step >= best) continue;
      // the new point may not lie in a pancake already hosting a pair
      bool blocked = false;
      for (std::size_t k = 0; k < pancake_count && !blocked; ++k) blocked = used[k] && member[v][k];
      if (blocked) continue;
      for (std::size_t i = 0; i < pancake_count; ++i) {
        if (used[i] || !member[u][i] || !member[v][i]) continue;
        bool clash = false;
        for (std::size_t s = 0; s + 1 < path.size() && !clash; ++s) clash = member[path[s]][i];
        if (clash) continue;
        used[i] = true;
        on_path[v] = true;
        path.push_back(static_cast<int>(v));
        hops.push_back(static_cast<int>(i));
        extend(length + step);
        hops.pop_back();
        path.pop_back();
        on_path[v] = false;
        used[i] = false;
      }
    }
  }
};

}  // namespace

PancakeSequence pancake_distance(const PancakeComplex& complex, const Point& x, const Point& y) {
  const double tol = complex.snap_tol();
  const std::size_t np = complex.pancakes.size();
  std::vector<Point> nodes{x, y};
  for (const auto& j : complex.junctions) {
    bool dup = false;
    for (const auto& n : nodes) dup = dup || distance(n, j.point) <= tol;
    if (!dup) nodes.push_back(j.point);
  }
  std::vector<std::vector<bool>> member(nodes.size(), std::vector<bool>(np, false));
  for (std::size_t n = 0; n < nodes.size(); ++n)
    for (std::size_t i = 0; i < np; ++i) member[n][i] = complex.pancakes[i].contains(nodes[n], tol);
  for (int n : {0, 1})
    if (std::none_of(member[n].begin(), member[n].end(), [](bool b) { return b; }))
      throw InputError(std::string(n == 0 ? "first" : "second") + " point lies in no pancake");

  PancakeSequence out;
  if (distance(x, y) <= tol) {
    out.points = {x};
    out.length = 0.0;
    out.connected = true;
    return out;
  }
  PancakeSearch search(nodes, member, np);
  search.extend(0.0);
  if (search.best_path.empty()) return out;
  for (int n : search.best_path) out.points.push_back(nodes[n]);
  out.pancake = search.best_hops;
  out.length = search.best;
  out.connected = true;
  return out;
}

}  // namespace lne
