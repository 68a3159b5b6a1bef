#include <doctest.h>

#include <cmath>
#include <random>

#include "lne/errors.hpp"
#include "lne/germs.hpp"
#include "oracles.hpp"

using namespace lne;
using oracle::random_branch;

namespace {

PuiseuxBranch branch(std::string label, std::vector<Term> terms, double t_max = 1.0) {
  return PuiseuxBranch(std::move(label), std::move(terms), t_max);
}

PuiseuxBranch cusp_upper() { return branch("upper", {{2, {1, 0}}, {3, {0, 1}}}); }
PuiseuxBranch cusp_lower() { return branch("lower", {{2, {1, 0}}, {3, {0, -1}}}); }
PuiseuxBranch parabola(double k) { return branch("p" + std::to_string(k), {{1, {1, 0}}, {2, {0, k}}}); }

}  // namespace

TEST_CASE("rational arithmetic stays in lowest terms") {
  Rational a(6, -4);
  CHECK(a.num() == -3);
  CHECK(a.den() == 2);
  CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
  CHECK(Rational(3, 2) / Rational(3, 4) == Rational(2));
  CHECK(Rational(2, 3) < Rational(3, 4));
  CHECK(Rational(4, 2).str() == "2");
  CHECK_THROWS_AS(Rational(1, 0), DomainError);
}

TEST_CASE("eval_branch") {
  auto b0 = branch("b", {{1, {1, 0}}, {Rational(3, 2), {0, 1}}});
  CHECK(eval_branch(b0, 0.0) == Point{0, 0});
  Point p = eval_branch(cusp_upper(), 0.25);
  CHECK(p[0] == doctest::Approx(1.0 / 16));
  CHECK(p[1] == doctest::Approx(1.0 / 64));
  auto sqrt_graph = branch("sqrt", {{Rational(1, 2), {0, 1}}, {1, {1, 0}}});
  p = eval_branch(sqrt_graph, 0.25);
  CHECK(p[0] == doctest::Approx(0.25));
  CHECK(p[1] == doctest::Approx(0.5));
  CHECK_THROWS_AS(eval_branch(cusp_upper(), 1.5), DomainError);
  CHECK_THROWS_AS(eval_branch(cusp_upper(), -0.1), DomainError);
}

TEST_CASE("branch construction rejects bad input") {
  CHECK_THROWS_AS(branch("z", {{1, {0, 0}}}), ValidationError);
  CHECK_THROWS_AS(branch("n", {{-1, {1, 0}}}), ValidationError);
  CHECK_THROWS_AS(branch("d", {{1, {1, 0}}, {2, {1, 0, 0}}}), ValidationError);
  // zero coefficients are dropped rather than stored
  CHECK(branch("k", {{1, {1, 0}}, {2, {0, 0}}}).terms().size() == 1);
}

TEST_CASE("reparametrize_by_distance") {
  auto ray = branch("ray", {{1, {1, 0}}});
  double half[] = {0.5};
  auto pts = reparametrize_by_distance(ray, half);
  CHECK(pts[0][0] == doctest::Approx(0.5));
  CHECK(pts[0][1] == doctest::Approx(0.0));

  auto vertical = branch("v", {{1, {0, 1}}});
  double quarter[] = {0.25};
  CHECK(reparametrize_by_distance(vertical, quarter)[0][1] == doctest::Approx(0.25));

  // Oracle: plain bisection on the closed form s^2 sqrt(1 + s^2) = 0.01.
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (mid * mid * std::sqrt(1 + mid * mid) < 0.01 ? lo : hi) = mid;
  }
  double tiny[] = {0.01};
  Point q = reparametrize_by_distance(cusp_upper(), tiny)[0];
  CHECK(q[0] == doctest::Approx(lo * lo).epsilon(1e-12));
  CHECK(q[1] == doctest::Approx(lo * lo * lo).epsilon(1e-12));
  CHECK(std::fabs(norm(q) - 0.01) <= 1e-10 * 0.01);

  double too_far[] = {5.0};
  CHECK_THROWS_AS(reparametrize_by_distance(cusp_upper(), too_far), DomainError);
  // the circle-like loop t -> (t - t^3, 0) turns back before t = 1
  auto back = branch("back", {{1, {1, 0}}, {3, {-1, 0}}});
  double mid_scale[] = {0.38};
  CHECK_THROWS_AS(reparametrize_by_distance(back, mid_scale), ReparametrizationError);
}

TEST_CASE("reparametrized points have exact norms (property)") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    auto b = random_branch(rng);
    std::vector<double> scales;
    for (int k = 6; k <= 16; ++k) scales.push_back(std::ldexp(1.0, -k));
    auto pts = reparametrize_by_distance(b, scales);
    for (std::size_t i = 0; i < pts.size(); ++i)
      CHECK(std::fabs(norm(pts[i]) - scales[i]) <= 1e-10 * scales[i]);
  }
}

TEST_CASE("branch norms decay with the leading exponent (property)") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    auto b = random_branch(rng);
    // log-log slope over t = 2^-6 .. 2^-16
    double t0 = std::ldexp(1.0, -6), t1 = std::ldexp(1.0, -16);
    double slope = std::log(norm(b.eval(t1)) / norm(b.eval(t0))) / std::log(t1 / t0);
    CHECK(std::fabs(slope - b.leading_exponent().to_double()) <= 0.05);
    CHECK(norm(b.eval(std::ldexp(1.0, -30))) < norm(b.eval(t1)));
  }
}

TEST_CASE("tangent_halfline") {
  auto d = tangent_halfline(cusp_upper()).direction;
  CHECK(d[0] == doctest::Approx(1.0));
  CHECK(d[1] == doctest::Approx(0.0));
  d = tangent_halfline(branch("b", {{1, {3, 4}}})).direction;
  CHECK(d[0] == doctest::Approx(0.6));
  CHECK(d[1] == doctest::Approx(0.8));
  CHECK(tangent_halfline(parabola(1)).direction == tangent_halfline(parabola(2)).direction);

  std::mt19937 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    auto b = random_branch(rng);
    Point p = b.eval(std::ldexp(1.0, -20));
    Point dir = tangent_halfline(b).direction;
    double c = dot(p, dir) / norm(p);
    CHECK(std::acos(std::fmin(1.0, c)) <= 1e-3);
  }
}

TEST_CASE("symbolic_separation_order") {
  auto two = symbolic_separation_order(parabola(1), parabola(2));
  CHECK_FALSE(two.infinite);
  CHECK(two.order == Rational(2));

  auto cusp = symbolic_separation_order(cusp_upper(), cusp_lower());
  CHECK_FALSE(cusp.infinite);
  CHECK(cusp.order == Rational(3, 2));

  auto self = symbolic_separation_order(cusp_upper(), cusp_upper());
  CHECK(self.infinite);

  // a reparametrization of the same curve aligns to the same series
  auto slow = branch("slow", {{2, {4, 0}}, {3, {0, 8}}}, 0.5);
  CHECK(symbolic_separation_order(cusp_upper(), slow).infinite);

  auto lines = symbolic_separation_order(branch("a", {{1, {1, 0}}}), branch("b", {{1, {0, 1}}}));
  CHECK(lines.order == Rational(1));

  // the single-term ray is only certified to first order
  try {
    symbolic_separation_order(branch("ray", {{1, {1, 0}}}), parabola(1));
    FAIL("expected undecidable");
  } catch (const UndecidableError& e) {
    CHECK(e.bound() == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(symbolic_separation_order(parabola(1), branch("c", {{1, {1, 0, 0}}})), ValidationError);
}

TEST_CASE("sample_germ on branches") {
  GermSet ray{"ray", 2, {branch("ray", {{1, {0.6, 0.8}}})}, {}};
  double one[] = {1.0};
  auto clouds = sample_germ(ray, one, 8);
  REQUIRE(clouds.size() == 1);
  CHECK(clouds[0].size() >= 8);
  for (const auto& p : clouds[0].points) {
    CHECK(std::fabs(p[0] * 0.8 - p[1] * 0.6) < 1e-12);
    CHECK(norm(p) <= 1.0 + 1e-9);
  }

  GermSet cusp{"cusp", 2, {cusp_upper(), cusp_lower()}, {}};
  std::vector<double> scales;
  for (int k = 4; k <= 10; ++k) scales.push_back(std::ldexp(1.0, -k));
  for (const auto& c : sample_germ(cusp, scales, 16))
    for (const auto& p : c.points) CHECK(std::fabs(p[1] * p[1] - p[0] * p[0] * p[0]) <= 1e-9);

  double increasing[] = {0.1, 0.2};
  CHECK_THROWS_AS(sample_germ(cusp, increasing, 16), InputError);
  CHECK_THROWS_AS(sample_germ(cusp, one, 4), InputError);
}

TEST_CASE("horn germ samples lie on the analytic pieces") {
  GermSet horn{"horn3d", 3, {}, {}};
  horn.surfaces.push_back(make_surface("horn", "horn+", {{"side", 1}}));
  horn.surfaces.push_back(make_surface("horn", "horn-", {{"side", -1}}));
  horn.surfaces.push_back(make_surface("wall", "wall", {}));
  auto cloud = sample_cloud(horn, 0.25, 32);
  std::size_t per_piece[3] = {0, 0, 0};
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point& p = cloud.points[i];
    double y = p[1];
    double c = 5.0 / 8.0 * y * y, rho = 3.0 / 8.0 * y * y;
    double residual;
    if (cloud.piece[i] == 2)
      residual = std::fabs(p[2]) + std::fmax(0.0, std::fabs(p[0]) - y * y / 4);
    else
      residual = std::fabs(std::hypot(std::fabs(p[0]) - c, p[2]) - rho) +
                 (cloud.piece[i] == 0 ? std::fmax(0.0, -p[0]) : std::fmax(0.0, p[0]));
    CHECK(residual <= 1e-6);
    ++per_piece[cloud.piece[i]];
  }
  CHECK(per_piece[0] > 0);
  CHECK(per_piece[1] > 0);
  CHECK(per_piece[2] > 0);
}

TEST_CASE("germ file parsing") {
  const std::string text = R"({
    "label": "cusp", "ambient_dim": 2,
    "branches": [
      {"label": "up", "t_max": 1, "terms": [{"exp": [2, 1], "coeff": [1, 0]}, {"exp": [3, 1], "coeff": [0, 1]}]},
      {"label": "down", "t_max": 1, "terms": [{"exp": [2, 1], "coeff": [1, 0]}, {"exp": [3, 1], "coeff": [0, -1]}]}
    ]
  })";
  GermSet g = parse_germ_text(text);
  CHECK(g.branches.size() == 2);
  CHECK(g.branches[1].terms()[1].coeff[1] == -1.0);
  // serialization is stable under a round trip
  auto j = germ_to_json(g);
  CHECK(germ_to_json(germ_from_json(j)) == j);

  try {
    parse_germ_text("{\n \"label\": \"x\",\n \"ambient_dim\": 2,\n oops }");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
  try {
    parse_germ_text(R"({"label": "x", "ambient_dim": 2, "branches": [{"terms": [{"exp": 1.5, "coeff": [1, 0]}]}]})");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("/branches/0/terms/0/exp") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_germ_text(R"({"label": "x", "ambient_dim": 3, "branches": [{"terms": [{"exp": [1, 1], "coeff": [1, 0]}]}]})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_germ_text(R"({"label": "x", "ambient_dim": 3, "surfaces": [{"type": "blob"}]})"), ParseError);
}
