#include "lne/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "lne/errors.hpp"

namespace lne {

namespace {

// Accuracy of numeric orders against the series oracle; deviations from an
// expected exponent below this are not resolvable.
constexpr double kOrderResolution = 0.05;

GermSet make_cusp() {
  return GermSet{"cusp",
                 2,
                 {PuiseuxBranch("upper", {{2, {1, 0}}, {3, {0, 1}}}, 2),
                  PuiseuxBranch("lower", {{2, {1, 0}}, {3, {0, -1}}}, 2)},
                 {}};
}

GermSet make_abs_graph() {
  const double c = std::sqrt(0.5);
  return GermSet{"abs_graph",
                 2,
                 {PuiseuxBranch("right", {{1, {c, c}}}, 2), PuiseuxBranch("left", {{1, {-c, c}}}, 2)},
                 {}};
}

GermSet make_three_tangent() {
  std::vector<PuiseuxBranch> b;
  for (int k = 1; k <= 3; ++k)
    b.emplace_back("y=" + std::to_string(k) + "x^2", std::vector<Term>{{1, {1, 0}}, {2, {0, double(k)}}}, 2);
  return GermSet{"three_tangent", 2, std::move(b), {}};
}

GermSet make_horn3d() {
  return GermSet{"horn3d",
                 3,
                 {},
                 {make_surface("horn", "horn+", {{"side", 1}, {"inner", 1}, {"outer", 2}}),
                  make_surface("horn", "horn-", {{"side", -1}, {"inner", 1}, {"outer", 2}}),
                  make_surface("wall", "wall", {{"coeff", 0.25}})}};
}

Box horn_slab(double t) {
  const double a = t * t;
  return Box{{-1.25 * a, t, -0.25 * a}, {1.25 * a, t, 0.25 * a}};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

nlohmann::json opt_json(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json pair_json(const TangencyReport& r) {
  return {{"first", r.first},         {"second", r.second},   {"tord", r.tord.slope},
          {"tord_inn", r.tord_inn.slope}, {"verdict", to_string(r.verdict)}, {"L", r.lojasiewicz}};
}

nlohmann::json exponent_json(const GermExponent& g) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : g.pairs) pairs.push_back(pair_json(p));
  return {{"L", g.value}, {"first", g.first}, {"second", g.second}, {"lower_bound", g.lower_bound},
          {"verdict", to_string(g.verdict)}, {"pairs", pairs}};
}

double distance_to_ray(const Point& p, const Point& dir) {
  double s = std::max(0.0, dot(p, dir));
  return distance(p, s * dir);
}

}  // namespace

void validate(const RunConfig& c) {
  const auto& s = c.tangency.scales;
  if (s.size() < 5) throw InsufficientDataError("at least 5 scale levels are required");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!(s[i] < s[i - 1])) throw InputError("scales must be strictly decreasing");
  if (c.tangency.density < 8) throw InputError("density must be at least 8");
  if (!(c.tangency.radius_factor > 0)) throw InputError("radius factor must be positive");
  if (!(c.tangency.order_tolerance > 0)) throw InputError("order tolerance must be positive");
  if (!(c.grid_res > 0)) throw InputError("grid resolution must be positive");
  if (!(c.medial.tau > 0) || !(c.medial.theta_min >= 0)) throw InputError("invalid medial parameters");
  if (c.norm.kind == NormSpec::Kind::MaxV)
    for (double w : c.norm.weights)
      if (!(w > 0)) throw InputError("max-norm weights must be positive");
}

std::vector<std::string> builtin_labels() { return {"cusp", "abs_graph", "three_tangent", "horn3d"}; }

Scenario builtin(const std::string& label) {
  Scenario s;
  s.label = label;
  if (label == "cusp") {
    s.germ = make_cusp();
    s.expected_set = Verdict::NOT_LNE;
    s.expected_medial = Verdict::LNE;
    s.expected_l_set = 1.5;
    s.expected_l_medial = 1.0;
    s.notes = "plane cusp (t^2, +-t^3); medial axis is the positive x-axis";
    s.medial_window = Box{{0, -0.25}, {0.5, 0.25}};
    s.medial_ray = Point{1, 0};
  } else if (label == "abs_graph") {
    s.germ = make_abs_graph();
    s.expected_set = Verdict::LNE;
    s.expected_medial = Verdict::LNE;
    s.expected_l_set = 1.0;
    s.expected_l_medial = 1.0;
    s.notes = "graph of |x|; medial axis is the positive y-axis";
    s.medial_window = Box{{-0.5, -0.25}, {0.5, 0.75}};
    s.medial_ray = Point{0, 1};
  } else if (label == "three_tangent") {
    s.germ = make_three_tangent();
    s.expected_set = Verdict::NOT_LNE;
    s.expected_medial = Verdict::NOT_LNE;
    s.expected_l_set = 2.0;
    s.expected_l_medial = 2.0;
    s.notes = "parabolas y = k x^2, k = 1, 2, 3; medial branches y = 3/2 x^2 and y = 5/2 x^2";
    s.medial_window = Box{{0, 0}, {0.5, 1}};
  } else if (label == "horn3d") {
    s.germ = make_horn3d();
    s.expected_set = Verdict::LNE;
    s.expected_medial = Verdict::NOT_LNE;
    s.expected_l_medial = 2.0;
    s.notes =
        "horns over x = +-y^2 and x = +-y^2/4: cross-section at height y is the circle in the plane y = const "
        "whose diameter joins the two generator points; wall |x| <= y^2/4, z = 0 joins them; medial centre "
        "curves x = +-(5/8) y^2";
    s.medial_slab = horn_slab;
  } else {
    throw RegistryError("unknown scenario '" + label + "'");
  }
  return s;
}

Scenario custom_scenario(GermSet germ) {
  Scenario s;
  s.label = germ.label;
  s.germ = std::move(germ);
  s.has_expectations = false;
  s.medial_window = Box{{-0.5, -0.5}, {0.5, 0.5}};
  return s;
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::PASS: return "PASS";
    case Outcome::FAIL: return "FAIL";
    default: return "INCONCLUSIVE";
  }
}

ScenarioResult run_scenario(const Scenario& sc, const RunConfig& config) {
  validate(config);
  sc.germ.validate();
  const auto& tc = config.tangency;
  const double tol = tc.order_tolerance;
  ScenarioResult res;
  res.label = sc.label;
  res.ambient_dim = sc.germ.ambient_dim;
  res.has_expectations = sc.has_expectations;
  const bool plane = sc.germ.ambient_dim == 2;

  auto check = [&](std::string name, Outcome status, std::string detail) {
    res.checks.push_back({std::move(name), status, std::move(detail)});
  };
  auto check_verdict = [&](const std::string& name, Verdict got, Verdict want) {
    Outcome o = got == Verdict::UNDECIDED ? Outcome::INCONCLUSIVE : got == want ? Outcome::PASS : Outcome::FAIL;
    check(name, o, to_string(got) + " (expected " + to_string(want) + ")");
  };
  auto check_exponent = [&](const std::string& name, const std::optional<double>& got, double want) {
    if (!got) return check(name, Outcome::INCONCLUSIVE, "not measured");
    double dev = std::fabs(*got - want);
    Outcome o = dev <= tol ? Outcome::PASS : dev <= kOrderResolution ? Outcome::INCONCLUSIVE : Outcome::FAIL;
    check(name, o, fmt(*got) + " (expected " + fmt(want) + " +- " + fmt(tol) + ")");
  };

  // set verdict: branch pairs for curve germs, link criterion for surfaces
  res.link = link_criterion_verdict(sc.germ, tc.scales, tc.density, config.norm);
  if (sc.germ.surfaces.empty()) {
    res.set_exponent = lojasiewicz_germ(sc.germ, tc);
    res.set_verdict = res.set_exponent->verdict;
    if (!res.set_exponent->lower_bound) res.l_set = res.set_exponent->value;
    if (res.set_verdict != Verdict::UNDECIDED && res.link.verdict != Verdict::UNDECIDED)
      check("link criterion agrees with branch pairs",
            res.link.verdict == res.set_verdict ? Outcome::PASS : Outcome::FAIL,
            "link " + to_string(res.link.verdict) + ", pairs " + to_string(res.set_verdict));
  } else {
    res.set_verdict = res.link.verdict;
    if (res.set_verdict == Verdict::LNE) res.l_set = 1.0;
  }

  // medial axis
  std::vector<SampledArc> arcs;
  if (plane) {
    res.medial_axis = extract_medial_axis_grid(sc.germ, sc.medial_window, config.grid_res, config.medial);
    auto trace = trace_medial_2d(sc.germ, tc.scales, config.medial);
    res.medial_branches = medial_branch_germs(trace.sample, tc.scales);
    if (sc.medial_ray) {
      double worst = 0.0;
      for (const auto& m : res.medial_axis.points) worst = std::max(worst, distance_to_ray(m.p, *sc.medial_ray));
      bool ok = !res.medial_axis.points.empty() && worst <= 2 * config.grid_res;
      check("grid axis within 2h of the expected ray", ok ? Outcome::PASS : Outcome::FAIL,
            std::to_string(res.medial_axis.points.size()) + " points, max offset " + fmt(worst / config.grid_res) +
                " h");
    }
  } else if (sc.medial_slab) {
    res.medial_axis.source = MedialSource::GRID;
    for (double t : tc.scales) {
      Box w = sc.medial_slab(t);
      auto slab = extract_medial_axis_grid(sc.germ, w, (w.hi[0] - w.lo[0]) / 64, config.medial);
      res.medial_axis.piece_names = slab.piece_names;
      for (auto& m : slab.points) res.medial_axis.points.push_back(std::move(m));
    }
    res.medial_branches = medial_branch_germs(res.medial_axis, tc.scales);
  }
  for (const auto& b : res.medial_branches) arcs.push_back(b.arc);
  if (arcs.size() == 1) {
    res.medial_verdict = Verdict::LNE;
    res.l_medial = 1.0;
  } else if (arcs.size() > 1) {
    res.medial_exponent = lojasiewicz_sampled(arcs, tc);
    res.medial_verdict = res.medial_exponent->verdict;
    if (!res.medial_exponent->lower_bound) res.l_medial = res.medial_exponent->value;
  }

  if (res.has_expectations) {
    check_verdict("set verdict", res.set_verdict, sc.expected_set);
    check_verdict("medial verdict", res.medial_verdict, sc.expected_medial);
    if (sc.expected_l_set) check_exponent("L_set", res.l_set, *sc.expected_l_set);
    if (sc.expected_l_medial) check_exponent("L_medial", res.l_medial, *sc.expected_l_medial);
  }
  if (plane && res.set_verdict != Verdict::UNDECIDED && res.medial_verdict != Verdict::UNDECIDED)
    check("medial NOT_LNE implies set NOT_LNE",
          res.medial_verdict != Verdict::NOT_LNE || res.set_verdict == Verdict::NOT_LNE ? Outcome::PASS
                                                                                           : Outcome::FAIL,
          "medial " + to_string(res.medial_verdict) + ", set " + to_string(res.set_verdict));
  if (plane && res.l_set && res.l_medial)
    check("L_medial <= L_set + 0.1", *res.l_medial <= *res.l_set + 0.1 ? Outcome::PASS : Outcome::FAIL,
          fmt(*res.l_medial) + " vs " + fmt(*res.l_set));

  bool undecided = res.set_verdict == Verdict::UNDECIDED || res.medial_verdict == Verdict::UNDECIDED ||
                   res.link.verdict == Verdict::UNDECIDED;
  bool failed = false;
  for (const auto& c : res.checks) {
    undecided = undecided || c.status == Outcome::INCONCLUSIVE;
    failed = failed || c.status == Outcome::FAIL;
  }
  res.outcome = undecided ? Outcome::INCONCLUSIVE : failed ? Outcome::FAIL : Outcome::PASS;
  return res;
}

nlohmann::json to_json(const ScenarioResult& r) {
  nlohmann::json branches = nlohmann::json::array();
  for (const auto& b : r.medial_branches) {
    nlohmann::json pieces = nlohmann::json::array();
    for (int p : b.pieces) pieces.push_back(p);
    branches.push_back({{"label", b.arc.label},
                        {"pieces", pieces},
                        {"tangent", b.tangent.direction},
                        {"scales", b.arc.scales.size()},
                        {"merge_scale", opt_json(b.merge_scale)}});
  }
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"status", to_string(c.status)}, {"detail", c.detail}});
  nlohmann::json j = {{"label", r.label},
                      {"ambient_dim", r.ambient_dim},
                      {"set_verdict", to_string(r.set_verdict)},
                      {"medial_verdict", to_string(r.medial_verdict)},
                      {"L_set", opt_json(r.l_set)},
                      {"L_medial", opt_json(r.l_medial)},
                      {"medial_points", r.medial_axis.points.size()},
                      {"medial_branches", branches},
                      {"link_report", to_json(r.link)},
                      {"checks", checks},
                      {"pass", to_string(r.outcome)}};
  if (r.set_exponent) j["set_exponent"] = exponent_json(*r.set_exponent);
  if (r.medial_exponent) j["medial_exponent"] = exponent_json(*r.medial_exponent);
  return j;
}

std::string scenarios_csv(const std::vector<ScenarioResult>& results) {
  std::ostringstream out;
  out << "label,set_verdict,medial_verdict,L_set,L_medial,link_verdict,outcome\n";
  auto num = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
  for (const auto& r : results)
    out << r.label << ',' << to_string(r.set_verdict) << ',' << to_string(r.medial_verdict) << ','
        << num(r.l_set) << ',' << num(r.l_medial) << ',' << to_string(r.link.verdict) << ','
        << to_string(r.outcome) << '\n';
  return out.str();
}

}  // namespace lne
