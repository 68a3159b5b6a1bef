#include "lne/germs.hpp"

#include <cstdint>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lne/errors.hpp"
#include "lne/roots.hpp"
#include "series.hpp"

namespace lne {

PuiseuxBranch::PuiseuxBranch(std::string label, std::vector<Term> terms, double t_max)
    : label_(std::move(label)), t_max_(t_max) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("branch '" + label_ + "': t_max must be positive");
  for (auto& term : terms) {
    if (std::all_of(term.coeff.begin(), term.coeff.end(), [](double c) { return c == 0.0; })) continue;
    terms_.push_back(std::move(term));
  }
  if (terms_.empty()) throw ValidationError("branch '" + label_ + "' has no nonzero term");
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.exponent < b.exponent; });
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!terms_[i].exponent.is_positive())
      throw ValidationError("branch '" + label_ + "': exponents must be positive");
    if (terms_[i].coeff.size() != terms_.front().coeff.size())
      throw ValidationError("branch '" + label_ + "': coefficient dimensions differ");
    if (i > 0 && terms_[i].exponent == terms_[i - 1].exponent)
      throw ValidationError("branch '" + label_ + "': repeated exponent " + terms_[i].exponent.str());
  }
  for (const auto& term : terms_) derivative_exponents_.push_back(term.exponent - Rational(1));
}

namespace {

double ipow(double x, std::int64_t n) {
  bool inv = n < 0;
  std::uint64_t m = inv ? -static_cast<std::uint64_t>(n) : static_cast<std::uint64_t>(n);
  double r = 1.0;
  while (m) {
    if (m & 1) r *= x;
    x *= x;
    m >>= 1;
  }
  return inv ? 1.0 / r : r;
}

/// t^e for t > 0, exact-exponent shortcuts for integers and halves.
double rpow(double t, const Rational& e) {
  if (e.den() == 1) return ipow(t, e.num());
  if (e.den() == 2) return ipow(std::sqrt(t), e.num());
  return std::pow(t, e.to_double());
}

}  // namespace

Point PuiseuxBranch::eval(double t) const {
  if (!(t >= 0.0 && t <= t_max_)) throw DomainError("branch '" + label_ + "': parameter outside [0, t_max]");
  Point p = zeros(ambient_dim());
  if (t == 0.0) return p;
  for (const auto& term : terms_) {
    double f = rpow(t, term.exponent);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += f * term.coeff[i];
  }
  return p;
}

Point PuiseuxBranch::derivative(double t) const {
  Point d = zeros(ambient_dim());
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const auto& term = terms_[k];
    double e = term.exponent.to_double();
    double f = (t == 0.0) ? (e < 1.0 ? std::numeric_limits<double>::infinity() : (e == 1.0 ? 1.0 : 0.0))
                          : e * rpow(t, derivative_exponents_[k]);
    for (std::size_t i = 0; i < d.size(); ++i)
      if (term.coeff[i] != 0.0) d[i] += f * term.coeff[i];
  }
  return d;
}

Point eval_branch(const PuiseuxBranch& branch, double t) { return branch.eval(t); }

double parameter_at_norm(const PuiseuxBranch& branch, double target, const NormSpec& norm_spec) {
  if (target < 0.0) throw DomainError("negative target norm");
  if (target == 0.0) return 0.0;
  auto nrm = [&](double s) { return norm_spec(branch.eval(s)); };
  const double t_max = branch.t_max();
  if (nrm(t_max) < target) {
    for (int i = 1; i < 64; ++i)
      if (nrm(t_max * i / 64.0) >= target)
        throw ReparametrizationError("branch '" + branch.label() + "': norm turns back before reaching " +
                                     std::to_string(target));
    throw DomainError("branch '" + branch.label() + "': norm " + std::to_string(target) + " not reachable");
  }
  const auto& lead = branch.terms().front();
  double lead_norm = norm_spec(lead.coeff);
  double hi = std::min(t_max, std::pow(target / lead_norm, 1.0 / lead.exponent.to_double()));
  while (nrm(hi) < target) hi = std::min(t_max, 2.0 * hi);
  double lo = hi;
  for (int i = 0; i < 2000 && nrm(lo) >= target; ++i) lo *= 0.5;
  if (nrm(lo) >= target) lo = 0.0;
  // monotonicity probe on the bracket
  constexpr int probes = 16;
  double prev = nrm(lo);
  for (int i = 1; i <= probes; ++i) {
    double s = lo + (hi - lo) * i / probes;
    double v = nrm(s);
    if (v < prev)
      throw ReparametrizationError("branch '" + branch.label() + "': norm not increasing near target " +
                                   std::to_string(target));
    prev = v;
  }
  return find_root_bracketed([&](double s) { return nrm(s) - target; }, lo, hi);
}

std::vector<Point> reparametrize_by_distance(const PuiseuxBranch& branch, std::span<const double> scales) {
  std::vector<Point> out;
  out.reserve(scales.size());
  for (double t : scales) {
    if (!(t > 0.0)) throw DomainError("scales must be positive");
    out.push_back(branch.eval(parameter_at_norm(branch, t)));
  }
  return out;
}

HalfLine tangent_halfline(const PuiseuxBranch& branch) {
  const Point& c = branch.terms().front().coeff;
  double n = norm(c);
  return HalfLine{(1.0 / n) * c};
}

namespace {

using detail::Series;

struct AlignedBranch {
  std::map<Rational, Point> series;
  Rational certified;
};

// Series of the branch reparametrized by distance, t -> branch(s(t)), with
// ||branch(s(t))|| = t, truncated at `bound`.
AlignedBranch align_by_distance(const PuiseuxBranch& b, const Rational& bound) {
  const auto& terms = b.terms();
  const Rational a0 = terms.front().exponent;
  const Rational inv_a0 = Rational(1) / a0;
  const double c0 = dot(terms.front().coeff, terms.front().coeff);
  // ||b(s)||^2 / (c0 s^{2 a0}) - 1 as a series in s
  Series u_s;
  for (const auto& ti : terms)
    for (const auto& tj : terms) {
      Rational e = ti.exponent + tj.exponent - a0 - a0;
      if (e.is_zero()) continue;
      u_s[e] += dot(ti.coeff, tj.coeff) / c0;
    }
  const double k = std::pow(c0, -0.5 / a0.to_double());
  // relative corrections are needed up to bound - 1
  const Rational rel_bound = bound - Rational(1);
  Series w;
  for (int it = 0; it < 64; ++it) {
    Series u_t = detail::substitute(u_s, k, inv_a0, w, rel_bound);
    Series next = detail::pow_one_plus(u_t, -0.5 / a0.to_double(), rel_bound);
    next.erase(Rational(0));
    if (detail::nearly_equal(next, w, 0.0)) break;
    w = std::move(next);
  }
  AlignedBranch out;
  const std::size_t n = b.ambient_dim();
  for (const auto& term : terms) {
    Rational shift = term.exponent * inv_a0;
    if (shift > bound) continue;
    Series f = detail::pow_one_plus(w, term.exponent.to_double(), bound - shift);
    double scale = std::pow(k, term.exponent.to_double());
    for (const auto& [e, c] : f) {
      auto& slot = out.series[e + shift];
      if (slot.empty()) slot = zeros(n);
      for (std::size_t i = 0; i < n; ++i) slot[i] += scale * c * term.coeff[i];
    }
  }
  out.certified = terms.back().exponent * inv_a0;
  return out;
}

}  // namespace

SeparationOrder symbolic_separation_order(const PuiseuxBranch& b1, const PuiseuxBranch& b2) {
  if (b1.ambient_dim() != b2.ambient_dim()) throw ValidationError("branches live in different dimensions");
  const Rational cert1 = b1.terms().back().exponent / b1.leading_exponent();
  const Rational cert2 = b2.terms().back().exponent / b2.leading_exponent();
  const Rational certified = std::min(cert1, cert2);
  const Rational bound = std::max(cert1, cert2) + Rational(1);
  AlignedBranch s1 = align_by_distance(b1, bound);
  AlignedBranch s2 = align_by_distance(b2, bound);
  double scale = 0.0;
  for (const auto* s : {&s1, &s2})
    for (const auto& [e, c] : s->series) scale = std::max(scale, norm(c));
  const double tol = 1e-9 * std::max(1.0, scale);
  std::map<Rational, Point> diff = s1.series;
  const std::size_t n = b1.ambient_dim();
  for (const auto& [e, c] : s2.series) {
    auto& slot = diff[e];
    if (slot.empty()) slot = zeros(n);
    slot = slot - c;
  }
  SeparationOrder out;
  out.certified_through = certified;
  for (const auto& [e, c] : diff) {
    if (norm(c) <= tol) continue;
    if (e <= certified) {
      out.order = e;
      return out;
    }
    throw UndecidableError("aligned series of '" + b1.label() + "' and '" + b2.label() +
                               "' agree through exponent " + certified.str(),
                           certified.to_double());
  }
  out.infinite = true;
  return out;
}

std::string GermSet::piece_label(std::size_t piece) const {
  if (piece < branches.size()) return branches[piece].label();
  return surfaces.at(piece - branches.size())->label();
}

void GermSet::validate() const {
  if (ambient_dim < 1) throw ValidationError("ambient_dim must be positive");
  if (piece_count() == 0) throw ValidationError("germ '" + label + "' has no pieces");
  for (const auto& b : branches)
    if (b.ambient_dim() != ambient_dim)
      throw ValidationError("branch '" + b.label() + "' has dimension " + std::to_string(b.ambient_dim()) +
                            ", germ declares " + std::to_string(ambient_dim));
  for (const auto& s : surfaces)
    if (s->ambient_dim() != ambient_dim)
      throw ValidationError("surface '" + s->label() + "' has dimension " + std::to_string(s->ambient_dim()) +
                            ", germ declares " + std::to_string(ambient_dim));
}

namespace {

int u_count(const SurfacePiece& s, double r, double spacing, int min_u) {
  double w = s.width(r);
  int n = std::max(min_u, static_cast<int>(std::ceil(w / spacing)));
  if (s.periodic() && n % 2 == 1) ++n;
  return n;
}

double u_at(const SurfacePiece& s, int k, int n) {
  return s.u_lo() + (s.u_hi() - s.u_lo()) * static_cast<double>(k) / n;
}

}  // namespace

PointCloud sample_cloud(const GermSet& set, double scale, int density) {
  if (density < 8) throw InputError("density must be at least 8");
  PointCloud cloud;
  cloud.scale = scale;
  const double spacing = scale / density;
  const double limit = scale * (1.0 + 1e-9);
  for (std::size_t i = 0; i < set.piece_count(); ++i) {
    cloud.piece_names.push_back(set.piece_label(i));
    cloud.piece_spacing.push_back(spacing);
  }
  for (std::size_t bi = 0; bi < set.branches.size(); ++bi) {
    const auto& b = set.branches[bi];
    for (int j = 0; j <= density; ++j) {
      double r = j * spacing;
      double s;
      try {
        s = parameter_at_norm(b, r);
      } catch (const DomainError&) {
        break;
      }
      cloud.points.push_back(b.eval(s));
      cloud.piece.push_back(static_cast<int>(bi));
    }
  }
  for (std::size_t si = 0; si < set.surfaces.size(); ++si) {
    const auto& s = *set.surfaces[si];
    const int piece = static_cast<int>(set.branches.size() + si);
    cloud.points.push_back(s.point(0.0, s.u_lo()));
    cloud.piece.push_back(piece);
    for (int j = 1; j * spacing <= std::min(s.r_max(), scale); ++j) {
      double r = j * spacing;
      int n = u_count(s, r, spacing, 8);
      int last = s.periodic() ? n - 1 : n;
      for (int k = 0; k <= last; ++k) {
        Point p = s.point(r, u_at(s, k, n));
        if (norm(p) > limit) continue;
        cloud.points.push_back(std::move(p));
        cloud.piece.push_back(piece);
      }
    }
  }
  return cloud;
}

std::vector<PointCloud> sample_germ(const GermSet& set, std::span<const double> scales, int density) {
  for (std::size_t i = 1; i < scales.size(); ++i)
    if (!(scales[i] < scales[i - 1])) throw InputError("scales must be strictly decreasing");
  std::vector<PointCloud> out;
  for (double t : scales) {
    try {
      out.push_back(sample_cloud(set, t, density));
    } catch (const InputError&) {
      throw;
    } catch (const Error& e) {
      throw Error("sampling germ '" + set.label + "' at scale " + std::to_string(t) + ": " + e.what());
    }
  }
  return out;
}

namespace {

/// Loose parameter for a Euclidean norm, used only to bound sampling windows.
double approx_parameter_at_norm(const PuiseuxBranch& b, double target) {
  auto nrm = [&](double s) { return norm(b.eval(s)); };
  const auto& lead = b.terms().front();
  double hi = std::min(b.t_max(), std::pow(target / norm(lead.coeff), 1.0 / lead.exponent.to_double()));
  while (nrm(hi) < target && hi < b.t_max()) hi = std::min(b.t_max(), 2.0 * hi);
  double lo = hi;
  for (int i = 0; i < 2000 && nrm(lo) >= target; ++i) lo *= 0.5;
  if (nrm(lo) >= target) return 0.0;
  return find_root_bracketed([&](double s) { return nrm(s) - target; }, lo, hi, 1e-6);
}

}  // namespace

std::vector<NearSample> sample_near(const GermSet& set, const Point& x, double radius, double spacing) {
  std::vector<NearSample> out;
  const double nx = norm(x);
  for (std::size_t bi = 0; bi < set.branches.size(); ++bi) {
    const auto& b = set.branches[bi];
    double lo = std::max(0.0, nx - radius);
    double hi = nx + radius;
    double reach = norm(b.eval(b.t_max()));
    if (lo > reach) continue;
    double s_lo = lo > 0.0 ? approx_parameter_at_norm(b, lo) : 0.0;
    double s_hi = hi < reach ? approx_parameter_at_norm(b, hi) : b.t_max();
    double s = s_lo;
    Point p = b.eval(s);
    for (int guard = 0; guard < 1000000; ++guard) {
      if (distance(p, x) <= radius) out.push_back({p, static_cast<int>(bi), s});
      if (s >= s_hi) break;
      double v = b.speed(s);
      double ds = std::isfinite(v) && v > 0.0 ? spacing / v : 0.0;
      if (!(ds > 0.0)) {
        double target = std::min(norm(p) + spacing, reach);
        double next = parameter_at_norm(b, target);
        ds = next > s ? next - s : (s_hi - s);
      }
      // shrink the step until the chord is at most 1.25 spacings
      Point q;
      for (;;) {
        double s_next = std::min(s_hi, s + ds);
        q = b.eval(s_next);
        if (distance(p, q) <= 1.25 * spacing || ds < 1e-15 * s_hi) {
          s = s_next;
          break;
        }
        ds *= 0.5;
      }
      p = std::move(q);
    }
  }
  for (std::size_t si = 0; si < set.surfaces.size(); ++si) {
    const auto& surf = *set.surfaces[si];
    const int piece = static_cast<int>(set.branches.size() + si);
    auto [r_lo, r_hi] = surf.r_range_near(x, radius);
    r_hi = std::min(r_hi, surf.r_max());
    long j0 = static_cast<long>(std::ceil(std::max(0.0, r_lo) / spacing));
    long j1 = static_cast<long>(std::floor(r_hi / spacing));
    for (long j = j0; j <= j1; ++j) {
      double r = j * spacing;
      if (j == 0) {
        Point p = surf.point(0.0, surf.u_lo());
        if (distance(p, x) <= radius) out.push_back({std::move(p), piece, 0.0, surf.u_lo()});
        continue;
      }
      int n = u_count(surf, r, spacing, 16);
      int last = surf.periodic() ? n - 1 : n;
      const double du = (surf.u_hi() - surf.u_lo()) / n;
      for (auto [a, b] : surf.u_ranges_near(x, r, radius)) {
        long k0 = std::max(0L, static_cast<long>(std::ceil((a - surf.u_lo()) / du - 1e-9)));
        long k1 = std::min(static_cast<long>(last), static_cast<long>(std::floor((b - surf.u_lo()) / du + 1e-9)));
        for (long k = k0; k <= k1; ++k) {
          double u = u_at(surf, static_cast<int>(k), n);
          Point p = surf.point(r, u);
          if (distance(p, x) <= radius) out.push_back({std::move(p), piece, r, u});
        }
      }
    }
  }
  return out;
}

std::vector<std::pair<double, double>> SurfacePiece::u_ranges_near(const Point&, double, double) const {
  return {{u_lo(), u_hi()}};
}

std::vector<NearSample> sample_sphere(const GermSet& set, double t, const NormSpec& norm_spec, int u_samples) {
  std::vector<NearSample> out;
  for (std::size_t bi = 0; bi < set.branches.size(); ++bi) {
    const auto& b = set.branches[bi];
    double s;
    try {
      s = parameter_at_norm(b, t, norm_spec);
    } catch (const DomainError&) {
      continue;
    }
    out.push_back({b.eval(s), static_cast<int>(bi), s});
  }
  for (std::size_t si = 0; si < set.surfaces.size(); ++si) {
    const auto& surf = *set.surfaces[si];
    const int piece = static_cast<int>(set.branches.size() + si);
    int n = u_samples;
    if (surf.periodic() && n % 2 == 1) ++n;
    int last = surf.periodic() ? n - 1 : n;
    for (int k = 0; k <= last; ++k) {
      double u = u_at(surf, k, n);
      auto f = [&](double r) { return norm_spec(surf.point(r, u)) - t; };
      if (f(surf.r_max()) < 0.0) continue;
      double r = find_root_bracketed(f, 0.0, surf.r_max());
      out.push_back({surf.point(r, u), piece, r, u});
    }
  }
  return out;
}

namespace {

double param_or(const nlohmann::json& p, const char* key, double fallback) {
  return p.contains(key) ? p.at(key).get<double>() : fallback;
}

/// Tube whose cross-section at height r is the circle, in the plane y = r,
/// with diameter between the generator points x = side r^2/inner^2 and
/// x = side r^2/outer^2.
class Horn final : public SurfacePiece {
 public:
  explicit Horn(const nlohmann::json& p)
      : side_(param_or(p, "side", 1.0) < 0 ? -1.0 : 1.0),
        inner_(param_or(p, "inner", 1.0)),
        outer_(param_or(p, "outer", 2.0)),
        r_max_(param_or(p, "r_max", 1.0)) {
    if (!(inner_ > 0 && outer_ > 0 && inner_ != outer_ && r_max_ > 0))
      throw ValidationError("horn: need positive distinct inner/outer and positive r_max");
  }
  std::string kind() const override { return "horn"; }
  nlohmann::json params() const override {
    return {{"side", side_}, {"inner", inner_}, {"outer", outer_}, {"r_max", r_max_}};
  }
  std::size_t ambient_dim() const override { return 3; }
  double center(double r) const { return 0.5 * (r * r / (inner_ * inner_) + r * r / (outer_ * outer_)); }
  double radius(double r) const { return 0.5 * std::fabs(r * r / (inner_ * inner_) - r * r / (outer_ * outer_)); }
  Point point(double r, double u) const override {
    double c = center(r), rho = radius(r);
    return {side_ * (c + rho * std::cos(u)), r, rho * std::sin(u)};
  }
  double r_max() const override { return r_max_; }
  double u_lo() const override { return 0.0; }
  double u_hi() const override { return 2.0 * std::numbers::pi; }
  bool periodic() const override { return true; }
  double width(double r) const override { return 2.0 * std::numbers::pi * radius(r); }
  std::pair<double, double> r_range_near(const Point& x, double rad) const override {
    return {std::max(0.0, x[1] - rad), x[1] + rad};
  }
  std::vector<std::pair<double, double>> u_ranges_near(const Point& x, double r, double rad) const override {
    const double two_pi = 2.0 * std::numbers::pi;
    double rem2 = rad * rad - (x[1] - r) * (x[1] - r);
    if (rem2 < 0.0) return {};
    double q0 = side_ * (x[0] - side_ * center(r)), q2 = x[2], rho = radius(r);
    double q = std::hypot(q0, q2);
    if (q == 0.0) return rho * rho <= rem2 * (1 + 1e-12) ? std::vector<std::pair<double, double>>{{0.0, two_pi}}
                                                         : std::vector<std::pair<double, double>>{};
    double kappa = (q * q + rho * rho - rem2) / (2.0 * rho * q);
    if (kappa > 1.0 + 1e-12) return {};
    if (kappa <= -1.0) return {{0.0, two_pi}};
    double phi = std::atan2(q2, q0);
    if (phi < 0.0) phi += two_pi;
    double delta = std::acos(std::fmin(1.0, kappa)) + 1e-9;
    double a = phi - delta, b = phi + delta;
    if (a < 0.0) return {{0.0, b}, {a + two_pi, two_pi}};
    if (b > two_pi) return {{0.0, b - two_pi}, {a, two_pi}};
    return {{a, b}};
  }

 private:
  double side_, inner_, outer_, r_max_;
};

/// Planar region {|x| <= coeff y^2, z = 0} joining two horns.
class Wall final : public SurfacePiece {
 public:
  explicit Wall(const nlohmann::json& p) : coeff_(param_or(p, "coeff", 0.25)), r_max_(param_or(p, "r_max", 1.0)) {
    if (!(coeff_ > 0 && r_max_ > 0)) throw ValidationError("wall: need positive coeff and r_max");
  }
  std::string kind() const override { return "wall"; }
  nlohmann::json params() const override { return {{"coeff", coeff_}, {"r_max", r_max_}}; }
  std::size_t ambient_dim() const override { return 3; }
  Point point(double r, double u) const override { return {u * coeff_ * r * r, r, 0.0}; }
  double r_max() const override { return r_max_; }
  double u_lo() const override { return -1.0; }
  double u_hi() const override { return 1.0; }
  double width(double r) const override { return 2.0 * coeff_ * r * r; }
  std::pair<double, double> r_range_near(const Point& x, double rad) const override {
    return {std::max(0.0, x[1] - rad), x[1] + rad};
  }
  std::vector<std::pair<double, double>> u_ranges_near(const Point& x, double r, double rad) const override {
    double rem2 = rad * rad - (x[1] - r) * (x[1] - r) - x[2] * x[2];
    double w = coeff_ * r * r;
    if (rem2 < 0.0 || w == 0.0) return {};
    double s = std::sqrt(rem2);
    double a = std::max(-1.0, (x[0] - s) / w), b = std::min(1.0, (x[0] + s) / w);
    if (a > b) return {};
    return {{a, b}};
  }

 private:
  double coeff_, r_max_;
};

/// The full plane germ in R^2 in polar coordinates.
class Disk final : public SurfacePiece {
 public:
  explicit Disk(const nlohmann::json& p) : r_max_(param_or(p, "r_max", 1.0)) {
    if (!(r_max_ > 0)) throw ValidationError("disk: need positive r_max");
  }
  std::string kind() const override { return "disk"; }
  nlohmann::json params() const override { return {{"r_max", r_max_}}; }
  std::size_t ambient_dim() const override { return 2; }
  Point point(double r, double u) const override { return {r * std::cos(u), r * std::sin(u)}; }
  double r_max() const override { return r_max_; }
  double u_lo() const override { return 0.0; }
  double u_hi() const override { return 2.0 * std::numbers::pi; }
  bool periodic() const override { return true; }
  double width(double r) const override { return 2.0 * std::numbers::pi * r; }
  std::pair<double, double> r_range_near(const Point& x, double rad) const override {
    double n = norm(x);
    return {std::max(0.0, n - rad), n + rad};
  }

 private:
  double r_max_;
};

}  // namespace

std::shared_ptr<const SurfacePiece> make_surface(const std::string& kind, const std::string& label,
                                                 const nlohmann::json& params) {
  std::shared_ptr<SurfacePiece> s;
  if (kind == "horn")
    s = std::make_shared<Horn>(params);
  else if (kind == "wall")
    s = std::make_shared<Wall>(params);
  else if (kind == "disk")
    s = std::make_shared<Disk>(params);
  else
    throw ValidationError("unknown surface sampler '" + kind + "'");
  s->set_label(label.empty() ? kind : label);
  return s;
}

}  // namespace lne
