#include "lne/medial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "lne/errors.hpp"
#include "lne/roots.hpp"

namespace lne {

namespace {

constexpr double kFootSine = 0.05;

struct Candidate {
  Point p;
  int piece;
  double dist;
  double r = 0.0, u = 0.0;  // surface parameters
};

/// Sine of the angle between x - p(r, u) and the normal space of the piece
/// at (r, u); 0 when the tangent plane is degenerate.
double foot_sine(const SurfacePiece& s, double r, double u, const Point& x) {
  const double dr = 1e-6 * std::max(r, 1e-300), du = 1e-6 * (s.u_hi() - s.u_lo());
  double r0 = std::max(0.0, r - dr), r1 = std::min(s.r_max(), r + dr);
  double u0 = u - du, u1 = u + du;
  if (!s.periodic()) {
    u0 = std::max(s.u_lo(), u0);
    u1 = std::min(s.u_hi(), u1);
  }
  Point p = s.point(r, u);
  Point w = x - p;
  double wn = norm(w);
  if (wn == 0.0 || r1 <= r0) return 0.0;
  Point tr = s.point(r1, u) - s.point(r0, u);
  Point tu = s.point(r, u1) - s.point(r, u0);
  std::vector<Point> basis;
  for (Point v : {tr, tu}) {
    for (const auto& b : basis) v = v - dot(v, b) * b;
    double n = norm(v);
    if (n > 1e-12 * (norm(tr) + norm(tu))) basis.push_back((1.0 / n) * v);
  }
  if (basis.size() < 2) return 0.0;
  double proj = 0.0;
  for (const auto& b : basis) proj += dot(w, b) * dot(w, b);
  return std::sqrt(proj) / wn;
}

std::vector<Candidate> candidates(const GermSet& set, const Point& x, double radius, double spacing, bool polish) {
  auto samples = sample_near(set, x, radius, spacing);
  std::vector<Candidate> out;
  const int nb = static_cast<int>(set.branches.size());
  // branch samples arrive in increasing parameter per branch
  std::size_t i = 0;
  while (i < samples.size()) {
    const int piece = samples[i].piece;
    std::size_t j = i;
    while (j < samples.size() && samples[j].piece == piece) ++j;
    if (piece >= nb) {
      for (std::size_t k = i; k < j; ++k) {
        double d = distance(samples[k].p, x);
        out.push_back({std::move(samples[k].p), piece, d, samples[k].param, samples[k].u});
      }
      i = j;
      continue;
    }
    const auto& b = set.branches[piece];
    std::vector<double> d(j - i);
    for (std::size_t k = i; k < j; ++k) d[k - i] = distance(samples[k].p, x);
    for (std::size_t k = i; k < j; ++k) {
      std::size_t m = k - i;
      bool left = m == 0 || d[m] <= d[m - 1];
      bool right = m + 1 == d.size() || d[m] <= d[m + 1];
      if (!left || !right) continue;
      double lo = m == 0 ? std::max(0.0, 2 * samples[k].param - samples[std::min(k + 1, j - 1)].param)
                         : samples[k - 1].param;
      double hi = m + 1 == d.size() ? std::min(b.t_max(), 2 * samples[k].param - samples[m == 0 ? k : k - 1].param)
                                    : samples[k + 1].param;
      lo = std::max(0.0, std::min(lo, samples[k].param));
      hi = std::min(b.t_max(), std::max(hi, samples[k].param));
      Point best = samples[k].p;
      double best_d = d[m];
      if (polish && hi > lo) {
        double s = minimize_golden([&](double s) { return distance(b.eval(s), x); }, lo, hi, 120);
        Point q = b.eval(s);
        double dq = distance(q, x);
        if (dq < best_d) {
          best = std::move(q);
          best_d = dq;
        }
        if (lo == 0.0 && norm(x) < best_d) {
          best = zeros(x.size());
          best_d = norm(x);
        }
      }
      out.push_back({std::move(best), piece, best_d});
    }
    i = j;
  }
  return out;
}

}  // namespace

NearestPointCluster nearest_point_set(const Point& x, const GermSet& set, const MedialParams& params) {
  if (params.density < 8) throw InputError("density must be at least 8");
  if (!set.surfaces.empty() && 1.0 / (2.0 * params.density * params.density) > params.tau)
    throw ResolutionError("surface sampling at density " + std::to_string(params.density) +
                          " is coarser than the equidistance tolerance");
  const double nx = norm(x);
  if (nx == 0.0) throw OnSetError("query point is the origin");
  double radius = nx * (1 + 1e-9);
  std::vector<Candidate> cand;
  double spacing = 0.0, dmin = 0.0;
  auto scan = [&](int density, bool polish) {
    double sp = radius / density;
    auto next_cand = candidates(set, x, radius, sp, polish);
    if (next_cand.empty()) {
      if (cand.empty()) throw ResolutionError("no set samples near the query point");
      return true;
    }
    spacing = sp;
    cand = std::move(next_cand);
    dmin = std::numeric_limits<double>::infinity();
    for (const auto& c : cand) dmin = std::min(dmin, c.dist);
    if (!(dmin > 1e-10 * nx)) throw OnSetError("query point lies on the set");
    double next = std::min(radius, dmin + 2 * spacing);
    bool settled = next > 0.75 * radius;
    radius = next;
    return settled;
  };
  // a coarse pass only bounds the distance; the fine pass resolves it
  for (int it = 0; it < 64 && !scan(8, false); ++it) {
  }
  radius = std::min(radius, dmin + 2 * radius / params.density);
  for (int it = 0; it < 64 && !scan(params.density, true); ++it) {
  }
  // surface samples count only near a foot point of x
  const int nb = static_cast<int>(set.branches.size());
  std::vector<const Candidate*> band;
  for (const auto& c : cand) {
    if (c.dist > (1 + params.tau) * dmin) continue;
    if (c.piece >= nb && foot_sine(*set.surfaces[c.piece - nb], c.r, c.u, x) > kFootSine) continue;
    band.push_back(&c);
  }
  std::stable_sort(band.begin(), band.end(), [](auto a, auto b) { return a->dist < b->dist; });

  NearestPointCluster out;
  out.query = x;
  out.distance = dmin;
  out.spacing = spacing;
  for (const auto* c : band) {
    bool joined = false;
    for (const auto& r : out.representatives)
      if (distance(r, c->p) <= 2 * spacing) {
        joined = true;
        break;
      }
    if (joined) continue;
    out.representatives.push_back(c->p);
    out.pieces.push_back(c->piece);
  }
  for (std::size_t i = 0; i < out.representatives.size(); ++i)
    for (std::size_t j = i + 1; j < out.representatives.size(); ++j)
      out.max_pair_angle = std::max(out.max_pair_angle, angle_at(x, out.representatives[i], out.representatives[j]));
  out.cluster_count = static_cast<int>(out.representatives.size());
  if (out.cluster_count >= 2 && out.max_pair_angle < params.theta_min) {
    out.representatives.resize(1);
    out.pieces.resize(1);
    out.cluster_count = 1;
    out.max_pair_angle = 0.0;
  }
  return out;
}

namespace {

GermSet single_branch(const GermSet& set, std::size_t i) {
  return GermSet{set.branches[i].label(), set.ambient_dim, {set.branches[i]}, {}};
}

double distance_to(const GermSet& piece, const Point& p, const MedialParams& params) {
  try {
    return nearest_point_set(p, piece, params).distance;
  } catch (const OnSetError&) {
    return 0.0;
  }
}

bool same_point(const Point& a, const Point& b, double tol) { return distance(a, b) <= tol; }

}  // namespace

MedialAxisSample extract_medial_axis_grid(const GermSet& set, const Box& window, double h,
                                          const MedialParams& params) {
  const std::size_t dim = set.ambient_dim;
  if (window.lo.size() != dim || window.hi.size() != dim) throw InputError("window dimension differs from the set");
  double extent = 0.0;
  std::vector<long> counts(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    double e = window.hi[i] - window.lo[i];
    if (e < 0) throw InputError("window has lo > hi");
    extent = std::max(extent, e);
  }
  if (!(h > 0.0) || h > extent / 64 * (1 + 1e-9)) throw InputError("grid spacing must be at most window size / 64");
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) {
    double e = window.hi[i] - window.lo[i];
    counts[i] = e == 0.0 ? 1 : std::lround(e / h) + 1;
    total *= counts[i];
  }
  auto node_point = [&](std::size_t idx) {
    Point p(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      p[i] = window.lo[i] + h * static_cast<double>(idx % counts[i]);
      idx /= counts[i];
    }
    return p;
  };

  MedialAxisSample out;
  out.source = MedialSource::GRID;
  out.resolution = h;
  for (std::size_t i = 0; i < set.piece_count(); ++i) out.piece_names.push_back(set.piece_label(i));

  std::vector<int> label(total, -1);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Point p = node_point(idx);
    NearestPointCluster c;
    try {
      c = nearest_point_set(p, set, params);
    } catch (const OnSetError&) {
      continue;
    }
    label[idx] = c.pieces.front();
    if (c.distance < h || c.cluster_count < 2) continue;
    out.points.push_back({std::move(p), std::move(c), h, 0.0});
  }

  const int nb = static_cast<int>(set.branches.size());
  if (nb < 2) return out;
  std::vector<GermSet> singles;
  for (int i = 0; i < nb; ++i) singles.push_back(single_branch(set, i));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t stride = 1;
    for (std::size_t ax = 0; ax < dim; ++ax) {
      std::size_t coord = (idx / stride) % counts[ax];
      std::size_t nbr = idx + stride;
      stride *= counts[ax];
      if (coord + 1 >= static_cast<std::size_t>(counts[ax])) continue;
      int la = label[idx], lb = label[nbr];
      if (la < 0 || lb < 0 || la == lb || la >= nb || lb >= nb) continue;
      Point a = node_point(idx), b = node_point(nbr);
      auto f = [&](double s) {
        Point q = (1 - s) * a + s * b;
        return distance_to(singles[la], q, params) - distance_to(singles[lb], q, params);
      };
      double fa = f(0.0), fb = f(1.0);
      if (fa == 0.0 || fb == 0.0 || (fa < 0.0) == (fb < 0.0)) continue;
      double s = find_root_bracketed(f, 0.0, 1.0, 1e-12);
      Point q = (1 - s) * a + s * b;
      bool dup = false;
      for (std::size_t k = 0; k < out.points.size() && !dup; ++k) dup = same_point(out.points[k].p, q, 1e-9 * h);
      if (dup) continue;
      NearestPointCluster c;
      try {
        c = nearest_point_set(q, set, params);
      } catch (const OnSetError&) {
        continue;
      }
      if (c.distance < h || c.cluster_count < 2) continue;
      out.points.push_back({std::move(q), std::move(c), h, 0.0});
    }
  }
  return out;
}

namespace {

Point on_circle(double t, double theta) { return {t * std::cos(theta), t * std::sin(theta)}; }

/// Root of d(p, first) = d(p, second) on the arc ||p|| = t, theta in [a, b].
Point solve_on_arc(const GermSet& first, const GermSet& second, double t, double a, double b,
                   const MedialParams& params) {
  auto f = [&](double th) {
    Point p = on_circle(t, th);
    return distance_to(first, p, params) - distance_to(second, p, params);
  };
  double th = find_root_bracketed(f, a, b, 1e-15);
  return on_circle(t, th);
}

void require_plane(std::size_t dim) {
  if (dim != 2) throw TraceError("bisector tracing is only available in the plane");
}

}  // namespace

BisectorTrace trace_bisector_2d(const PuiseuxBranch& b1, const PuiseuxBranch& b2, std::span<const double> scales,
                                const MedialParams& params) {
  require_plane(b1.ambient_dim());
  require_plane(b2.ambient_dim());
  GermSet pair{b1.label() + "|" + b2.label(), 2, {b1, b2}, {}};
  GermSet s1 = single_branch(pair, 0), s2 = single_branch(pair, 1);
  BisectorTrace out;
  out.sample.source = MedialSource::BISECTOR;
  out.sample.resolution = 1e-10;
  out.sample.piece_names = {b1.label(), b2.label()};
  for (double t : scales) {
    try {
      double one[] = {t};
      Point p1 = reparametrize_by_distance(b1, one)[0];
      Point p2 = reparametrize_by_distance(b2, one)[0];
      double a = std::atan2(p1[1], p1[0]);
      double b = std::atan2(p2[1], p2[0]);
      if (b < a) std::swap(a, b);
      if (b - a > std::numbers::pi) {
        std::swap(a, b);
        b += 2 * std::numbers::pi;
      }
      if (b - a == 0.0) throw TraceError("branches meet at this scale");
      Point p = solve_on_arc(s1, s2, t, a, b, params);
      NearestPointCluster c = nearest_point_set(p, pair, params);
      if (c.cluster_count < 2) throw TraceError("bisector point has a single nearest cluster");
      out.sample.points.push_back({std::move(p), std::move(c), 1e-10 * t, t});
    } catch (const Error& e) {
      out.failures.push_back({t, e.what()});
    }
  }
  return out;
}

BisectorTrace trace_medial_2d(const GermSet& set, std::span<const double> scales, const MedialParams& params) {
  require_plane(set.ambient_dim);
  BisectorTrace out;
  out.sample.source = MedialSource::BISECTOR;
  out.sample.resolution = 1e-10;
  for (std::size_t i = 0; i < set.piece_count(); ++i) out.sample.piece_names.push_back(set.piece_label(i));
  const std::size_t nb = set.branches.size();
  if (nb < 2) return out;
  std::vector<GermSet> singles;
  for (std::size_t i = 0; i < nb; ++i) singles.push_back(single_branch(set, i));
  for (double t : scales) {
    std::vector<std::pair<double, std::size_t>> angles;
    for (std::size_t i = 0; i < nb; ++i) {
      try {
        double one[] = {t};
        Point p = reparametrize_by_distance(set.branches[i], one)[0];
        angles.push_back({std::atan2(p[1], p[0]), i});
      } catch (const Error& e) {
        out.failures.push_back({t, set.branches[i].label() + ": " + e.what()});
      }
    }
    std::sort(angles.begin(), angles.end());
    const std::size_t n = angles.size();
    if (n < 2) continue;
    for (std::size_t k = 0; k < n; ++k) {
      auto [a, i] = angles[k];
      auto [b, j] = angles[(k + 1) % n];
      if (k + 1 == n) b += 2 * std::numbers::pi;
      if (!(b > a)) continue;
      try {
        Point p = solve_on_arc(singles[i], singles[j], t, a, b, params);
        NearestPointCluster c = nearest_point_set(p, set, params);
        if (c.cluster_count < 2) continue;
        out.sample.points.push_back({std::move(p), std::move(c), 1e-10 * t, t});
      } catch (const Error& e) {
        out.failures.push_back({t, set.branches[i].label() + "|" + set.branches[j].label() + ": " + e.what()});
      }
    }
  }
  return out;
}

namespace {

struct ScaleCluster {
  Point point;  // on the sphere of radius t
  std::vector<int> pieces;
};

std::vector<ScaleCluster> clusters_at(const MedialAxisSample& axis, double t) {
  std::vector<const MedialPoint*> shell;
  for (const auto& m : axis.points)
    if (std::fabs(norm(m.p) - t) <= std::max(2 * m.resolution, 1e-9 * t)) shell.push_back(&m);
  const std::size_t n = shell.size();
  std::vector<int> comp(n, -1);
  int ncomp = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = ncomp;
    std::vector<std::size_t> stack{s};
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        if (comp[v] >= 0) continue;
        double reach = 3 * std::max(shell[u]->resolution, shell[v]->resolution);
        if (distance(shell[u]->p, shell[v]->p) <= std::max(reach, 1e-9 * t)) {
          comp[v] = ncomp;
          stack.push_back(v);
        }
      }
    }
    ++ncomp;
  }
  std::vector<ScaleCluster> out(ncomp);
  std::vector<std::vector<int>> reps(ncomp);
  for (std::size_t s = 0; s < n; ++s) {
    auto& c = out[comp[s]];
    if (c.point.empty()) c.point = zeros(shell[s]->p.size());
    c.point = c.point + shell[s]->p;
    for (int pc : shell[s]->cluster.pieces) reps[comp[s]].push_back(pc);
  }
  for (int k = 0; k < ncomp; ++k) {
    auto& c = out[k];
    // the signature keeps pieces holding at least a quarter of the
    // representatives, so a seam point shared by two pieces does not flip it
    auto& r = reps[k];
    std::sort(r.begin(), r.end());
    for (std::size_t i = 0; i < r.size();) {
      std::size_t j = i;
      while (j < r.size() && r[j] == r[i]) ++j;
      if (4 * (j - i) >= r.size()) c.pieces.push_back(r[i]);
      i = j;
    }
    c.point = (t / norm(c.point)) * c.point;
  }
  return out;
}

struct Track {
  std::vector<int> pieces;
  std::vector<double> scales;
  std::vector<Point> points;
  std::optional<double> merge_scale;
  bool open = true;
};

double direction_angle(const Point& a, const Point& b) { return angle_at(zeros(a.size()), a, b); }

}  // namespace

std::vector<MedialBranch> medial_branch_germs(const MedialAxisSample& axis, std::span<const double> scales) {
  for (std::size_t i = 1; i < scales.size(); ++i)
    if (!(scales[i] < scales[i - 1])) throw InputError("scales must be strictly decreasing");
  constexpr double kGate = std::numbers::pi / 4;
  std::vector<Track> tracks;
  for (double t : scales) {
    auto cl = clusters_at(axis, t);
    struct Match {
      double angle;
      std::size_t track, cluster;
    };
    std::vector<Match> matches;
    for (std::size_t a = 0; a < tracks.size(); ++a) {
      if (!tracks[a].open) continue;
      for (std::size_t c = 0; c < cl.size(); ++c) {
        if (cl[c].pieces != tracks[a].pieces) continue;
        double ang = direction_angle(tracks[a].points.back(), cl[c].point);
        if (ang <= kGate) matches.push_back({ang, a, c});
      }
    }
    std::stable_sort(matches.begin(), matches.end(), [](auto& x, auto& y) { return x.angle < y.angle; });
    std::vector<bool> track_used(tracks.size(), false), cluster_used(cl.size(), false);
    for (const auto& m : matches) {
      if (track_used[m.track]) continue;
      if (cluster_used[m.cluster]) {
        // a second track claims the same cluster: the branches merged
        tracks[m.track].merge_scale = t;
        tracks[m.track].open = false;
        track_used[m.track] = true;
        continue;
      }
      track_used[m.track] = cluster_used[m.cluster] = true;
      tracks[m.track].scales.push_back(t);
      tracks[m.track].points.push_back(cl[m.cluster].point);
    }
    for (std::size_t a = 0; a < tracks.size(); ++a)
      if (!track_used[a]) tracks[a].open = false;
    for (std::size_t c = 0; c < cl.size(); ++c)
      if (!cluster_used[c]) tracks.push_back({cl[c].pieces, {t}, {cl[c].point}, std::nullopt, true});
  }
  std::vector<MedialBranch> out;
  for (auto& tr : tracks) {
    if (tr.scales.size() < 5) continue;
    MedialBranch b;
    std::string name = "medial[";
    for (std::size_t k = 0; k < tr.pieces.size(); ++k) {
      if (k) name += "|";
      std::size_t pc = static_cast<std::size_t>(tr.pieces[k]);
      name += pc < axis.piece_names.size() ? axis.piece_names[pc] : std::to_string(pc);
    }
    b.arc = SampledArc{name + "]", tr.scales, tr.points};
    b.pieces = tr.pieces;
    b.tangent.direction = (1.0 / tr.scales.back()) * tr.points.back();
    b.merge_scale = tr.merge_scale;
    out.push_back(std::move(b));
  }
  return out;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string medial_csv(const MedialAxisSample& axis, std::size_t ambient_dim) {
  std::ostringstream os;
  os << (ambient_dim == 3 ? "x,y,z" : "x,y") << ",distance,cluster_count,max_pair_angle\n";
  for (const auto& m : axis.points) {
    for (std::size_t i = 0; i < m.p.size(); ++i) os << num(m.p[i]) << ',';
    os << num(m.cluster.distance) << ',' << m.cluster.cluster_count << ',' << num(m.cluster.max_pair_angle) << '\n';
  }
  return os.str();
}

std::string medial_svg(const MedialAxisSample& axis, const GermSet& set, const Box& window) {
  if (set.ambient_dim != 2) throw InputError("SVG overlays are only drawn for plane sets");
  const double w = window.hi[0] - window.lo[0], hgt = window.hi[1] - window.lo[1];
  const double size = 512.0;
  const double k = size / std::max(w, hgt);
  auto sx = [&](double x) { return num((x - window.lo[0]) * k); };
  auto sy = [&](double y) { return num((window.hi[1] - y) * k); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w * k) << "\" height=\"" << num(hgt * k)
     << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  double reach = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    reach = std::max({reach, std::fabs(window.lo[i]), std::fabs(window.hi[i])});
  PointCloud cloud = sample_cloud(set, reach * std::sqrt(2.0), 256);
  os << "<g fill=\"black\">\n";
  for (const auto& p : cloud.points) {
    if (p[0] < window.lo[0] || p[0] > window.hi[0] || p[1] < window.lo[1] || p[1] > window.hi[1]) continue;
    os << "<circle cx=\"" << sx(p[0]) << "\" cy=\"" << sy(p[1]) << "\" r=\"1\"/>\n";
  }
  os << "</g>\n<g fill=\"red\">\n";
  for (const auto& m : axis.points)
    os << "<circle cx=\"" << sx(m.p[0]) << "\" cy=\"" << sy(m.p[1]) << "\" r=\"1.5\"/>\n";
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace lne
