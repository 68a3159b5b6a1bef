#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lne/point.hpp"
#include "lne/rational.hpp"

namespace lne {

struct Term {
  Rational exponent;
  Point coeff;
};

/// Curve germ t -> sum_i coeff_i * t^exponent_i on [0, t_max]. Exponents are
/// exact, strictly increasing and positive, so the curve starts at the origin.
class PuiseuxBranch {
 public:
  PuiseuxBranch(std::string label, std::vector<Term> terms, double t_max = 1.0);

  const std::string& label() const { return label_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t ambient_dim() const { return terms_.front().coeff.size(); }
  double t_max() const { return t_max_; }
  const Rational& leading_exponent() const { return terms_.front().exponent; }

  /// Throws DomainError outside [0, t_max].
  Point eval(double t) const;
  /// Parameter derivative; +inf components are possible at t = 0.
  Point derivative(double t) const;
  double speed(double t) const { return norm(derivative(t)); }

 private:
  std::string label_;
  std::vector<Term> terms_;
  std::vector<Rational> derivative_exponents_;
  double t_max_;
};

Point eval_branch(const PuiseuxBranch& branch, double t);

/// Parameter s with ||branch(s)||_norm = target. Throws ReparametrizationError
/// if the norm is not increasing on the probed range and DomainError when the
/// target exceeds the reachable norm.
double parameter_at_norm(const PuiseuxBranch& branch, double target,
                         const NormSpec& norm_spec = NormSpec::euclid());

/// Points of the branch with Euclidean norm exactly equal to each scale.
std::vector<Point> reparametrize_by_distance(const PuiseuxBranch& branch,
                                             std::span<const double> scales);

struct HalfLine {
  Point direction;
};

HalfLine tangent_halfline(const PuiseuxBranch& branch);

/// Order of ||b1~(t) - b2~(t)|| for the distance-aligned branches.
struct SeparationOrder {
  bool infinite = false;
  Rational order;             // valid when !infinite
  Rational certified_through; // exponent up to which the aligned series are exact
};

SeparationOrder symbolic_separation_order(const PuiseuxBranch& b1, const PuiseuxBranch& b2);

/// A two-parameter surface piece p(r, u): r is a radial parameter along which
/// the norm increases, u runs across the piece at fixed r.
class SurfacePiece {
 public:
  virtual ~SurfacePiece() = default;

  virtual std::string kind() const = 0;
  virtual nlohmann::json params() const = 0;
  virtual std::size_t ambient_dim() const = 0;
  virtual Point point(double r, double u) const = 0;
  virtual double r_max() const = 0;
  virtual double u_lo() const = 0;
  virtual double u_hi() const = 0;
  virtual bool periodic() const { return false; }
  /// Length of the u-curve at radius r.
  virtual double width(double r) const = 0;
  /// Radial interval containing every point of the piece within `radius` of x.
  virtual std::pair<double, double> r_range_near(const Point& x, double radius) const = 0;
  /// u-intervals that can hold points within `radius` of x at radius r.
  virtual std::vector<std::pair<double, double>> u_ranges_near(const Point& x, double r, double radius) const;

  const std::string& label() const { return label_; }
  void set_label(std::string l) { label_ = std::move(l); }

 private:
  std::string label_;
};

/// Builds a builtin surface sampler: "horn", "wall" or "disk".
std::shared_ptr<const SurfacePiece> make_surface(const std::string& kind, const std::string& label,
                                                 const nlohmann::json& params);

/// Closed germ at the origin made of curve branches and surface pieces.
struct GermSet {
  std::string label;
  std::size_t ambient_dim = 2;
  std::vector<PuiseuxBranch> branches;
  std::vector<std::shared_ptr<const SurfacePiece>> surfaces;

  std::size_t piece_count() const { return branches.size() + surfaces.size(); }
  std::string piece_label(std::size_t piece) const;
  /// Throws ValidationError on inconsistent dimensions or empty sets.
  void validate() const;
};

/// Finite sample of a set inside the ball of radius `scale`; points sampled
/// from several pieces carry the piece index they came from.
struct PointCloud {
  std::vector<Point> points;
  double scale = 1.0;
  std::vector<int> piece;
  std::vector<std::string> piece_names;
  /// Nominal spacing per piece (used for graph radii).
  std::vector<double> piece_spacing;

  std::size_t size() const { return points.size(); }
};

/// One cloud per scale; pieces sampled with spacing <= scale / density.
std::vector<PointCloud> sample_germ(const GermSet& set, std::span<const double> scales,
                                    int density);
PointCloud sample_cloud(const GermSet& set, double scale, int density);

/// Sample of the set near x: every piece point within `radius` of x, at the
/// given spacing. Samples remember their parameters.
struct NearSample {
  Point p;
  int piece;
  double param;  // branch parameter, or r on a surface
  double u = std::numeric_limits<double>::quiet_NaN();  // surface only
};
std::vector<NearSample> sample_near(const GermSet& set, const Point& x, double radius,
                                    double spacing);

/// Points of each piece on the norm sphere {||x|| = t}; branches solved
/// exactly, surfaces by solving along r for `u_samples` values of u.
std::vector<NearSample> sample_sphere(const GermSet& set, double t, const NormSpec& norm_spec,
                                      int u_samples);

GermSet germ_from_json(const nlohmann::json& j);
nlohmann::json germ_to_json(const GermSet& set);
/// Parses the germ file format; ParseError carries line and field.
GermSet parse_germ_text(const std::string& text);

}  // namespace lne
