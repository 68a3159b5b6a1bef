// Acceptance suite: prints one PASS/FAIL line per criterion.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lne/errors.hpp"
#include "lne/links.hpp"
#include "lne/medial.hpp"
#include "lne/metrics.hpp"
#include "lne/scenarios.hpp"
#include "lne/tangency.hpp"
#include "oracles.hpp"

using namespace lne;

namespace {

struct Result {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

std::string f(double v, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

bool near(double v, double want, double tol) { return std::fabs(v - want) <= tol; }

std::map<std::string, ScenarioResult>& results() {
  static std::map<std::string, ScenarioResult> cache = [] {
    std::map<std::string, ScenarioResult> m;
    for (const auto& l : builtin_labels()) m.emplace(l, run_scenario(builtin(l), RunConfig{}));
    return m;
  }();
  return cache;
}

double max_ray_offset(const MedialAxisSample& axis, const Point& dir) {
  double worst = 0.0;
  for (const auto& m : axis.points) {
    double s = std::max(0.0, dot(m.p, dir));
    worst = std::max(worst, distance(m.p, s * dir));
  }
  return worst;
}

NormSpec max_norm(std::size_t dim) { return NormSpec::maxv(std::vector<double>(dim, 1.0)); }

// Pair of Puiseux branches agreeing up to a random exponent, or unrelated.
std::pair<PuiseuxBranch, PuiseuxBranch> random_pair(std::mt19937& rng) {
  static const Rational exps[] = {1, Rational(3, 2), 2, Rational(5, 2), 3};
  auto b1 = oracle::random_branch(rng);
  if (std::bernoulli_distribution(0.2)(rng)) return {b1, oracle::random_branch(rng)};
  std::vector<Term> terms = b1.terms();
  std::vector<Rational> later;
  for (const auto& e : exps)
    if (terms.front().exponent < e) later.push_back(e);
  Rational at = later[std::uniform_int_distribution<std::size_t>(0, later.size() - 1)(rng)];
  std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi), mag(0.3, 1.0);
  double a = ang(rng), r = mag(rng);
  Point bump{r * std::cos(a), r * std::sin(a)};
  bool found = false;
  for (auto& t : terms)
    if (t.exponent == at) {
      t.coeff = t.coeff + bump;
      found = true;
    }
  if (!found) {
    terms.push_back({at, bump});
    std::sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) { return x.exponent < y.exponent; });
  }
  return {b1, PuiseuxBranch("r2", terms)};
}

Result criterion1() {
  Result o;
  std::mt19937 rng(101);
  auto scales = dyadic_scales();
  int done = 0, skipped = 0;
  double worst = 0.0;
  std::set<std::string> orders;
  while (done < 20) {
    auto [b1, b2] = random_pair(rng);
    SeparationOrder exact;
    try {
      exact = symbolic_separation_order(b1, b2);
    } catch (const UndecidableError&) {
      ++skipped;
      continue;
    }
    if (exact.infinite) {
      ++skipped;
      continue;
    }
    double slope = outer_tangency_order(b1, b2, scales).slope;
    double dev = std::fabs(slope - exact.order.to_double());
    worst = std::max(worst, dev);
    orders.insert(exact.order.str());
    o.require(dev <= 0.05, "pair " + std::to_string(done) + " numeric " + f(slope) + " vs " + exact.order.str());
    ++done;
  }
  o.detail << "20 pairs, max |numeric - exact| = " << f(worst) << ", exact orders {";
  for (auto it = orders.begin(); it != orders.end(); ++it) o.detail << (it == orders.begin() ? "" : ", ") << *it;
  o.detail << "}, " << skipped << " undecidable draws skipped";
  return o;
}

Result criterion2() {
  Result o;
  const auto& r = results().at("cusp");
  const auto& pair = r.set_exponent->pairs.at(0);
  o.require(r.set_verdict == Verdict::NOT_LNE, "set verdict");
  o.require(near(pair.tord.slope, 1.5, 0.05), "tord");
  o.require(near(pair.tord_inn.slope, 1.0, 0.05), "tord_inn");
  o.require(r.l_set && near(*r.l_set, 1.5, 0.1), "L_set");
  double off = max_ray_offset(r.medial_axis, Point{1, 0});
  o.require(!r.medial_axis.points.empty() && off <= 2 * RunConfig{}.grid_res, "axis offset");
  o.require(r.medial_verdict == Verdict::LNE, "medial verdict");
  o.detail << "set " << to_string(r.set_verdict) << ", tord " << f(pair.tord.slope) << ", tord_inn "
           << f(pair.tord_inn.slope) << ", L_set " << f(r.l_set.value_or(NAN)) << ", axis offset "
           << f(off / RunConfig{}.grid_res, 2) << "h, medial " << to_string(r.medial_verdict);
  return o;
}

Result criterion3() {
  Result o;
  const auto& r = results().at("abs_graph");
  o.require(r.set_verdict == Verdict::LNE, "set verdict");
  o.require(r.l_set && near(*r.l_set, 1.0, 0.05), "L_set");
  double off = max_ray_offset(r.medial_axis, Point{0, 1});
  o.require(!r.medial_axis.points.empty() && off <= 2 * RunConfig{}.grid_res, "axis offset");
  o.require(r.medial_verdict == Verdict::LNE, "medial verdict");
  double worst = 0.0;
  for (double t : dyadic_scales()) {
    auto link = link_section(builtin("abs_graph").germ, t, max_norm(2));
    o.require(link.points.size() == 2, "two link points");
    for (const auto& p : link.points) worst = std::max({worst, std::fabs(std::fabs(p[0]) - t), std::fabs(p[1] - t)});
  }
  o.require(worst <= 1e-9, "max-norm link points");
  o.detail << "set " << to_string(r.set_verdict) << ", L_set " << f(r.l_set.value_or(NAN)) << ", axis offset "
           << f(off / RunConfig{}.grid_res, 2) << "h, medial " << to_string(r.medial_verdict)
           << ", max-norm link error " << worst;
  return o;
}

Result criterion4() {
  Result o;
  const auto& r = results().at("three_tangent");
  o.require(r.set_verdict == Verdict::NOT_LNE, "set verdict");
  o.require(r.l_set && near(*r.l_set, 2.0, 0.1), "L_set");
  o.require(r.medial_branches.size() == 2 && r.medial_exponent.has_value(), "two medial branches");
  if (r.medial_exponent)
    for (const auto& p : r.medial_exponent->pairs) {
      o.require(near(p.tord.slope, 2.0, 0.1), "medial tord");
      o.require(near(p.tord_inn.slope, 1.0, 0.1), "medial tord_inn");
      o.detail << "medial pair tord " << f(p.tord.slope) << " vs tord_inn " << f(p.tord_inn.slope) << "; ";
    }
  o.require(r.medial_verdict == Verdict::NOT_LNE, "medial verdict");
  o.detail << "set " << to_string(r.set_verdict) << ", L_set " << f(r.l_set.value_or(NAN)) << ", medial "
           << to_string(r.medial_verdict);
  return o;
}

Result criterion5() {
  Result o;
  const auto& r = results().at("horn3d");
  auto link = link_criterion_verdict(builtin("horn3d").germ, dyadic_scales(), 32, max_norm(3));
  double cmax = 0.0;
  for (const auto& s : link.report.per_scale) cmax = std::max(cmax, s.c_t);
  o.require(link.verdict == Verdict::LNE, "link verdict");
  o.require(cmax <= 1.3, "C(t) <= 1.3");
  o.require(link.report.trend == Trend::BOUNDED, "trend");
  bool centre = false;
  if (r.medial_exponent)
    for (const auto& p : r.medial_exponent->pairs) {
      o.detail << "medial pair tord " << f(p.tord.slope) << " vs tord_inn " << f(p.tord_inn.slope) << "; ";
      centre = centre || (near(p.tord.slope, 2.0, 0.1) && near(p.tord_inn.slope, 1.0, 0.1));
    }
  o.require(centre, "centre pair orders");
  o.require(r.medial_verdict == Verdict::NOT_LNE, "medial verdict");
  o.detail << "link " << to_string(link.verdict) << ", max C(t) " << f(cmax) << ", trend "
           << to_string(link.report.trend) << ", medial " << to_string(r.medial_verdict);
  return o;
}

// Two parabolas through 0 with random tangent directions and curvatures.
GermSet random_parabolas(std::mt19937& rng, int index) {
  std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi), curv(-2.0, 2.0), gap(0.5, 2.5);
  double a1 = ang(rng);
  double a2 = std::bernoulli_distribution(0.5)(rng) ? a1 : a1 + gap(rng);
  double k1 = curv(rng), k2 = curv(rng);
  if (a1 == a2 && std::fabs(k1 - k2) < 0.3) k2 = k1 + 0.5;
  auto make = [](std::string label, double a, double k) {
    Point d{std::cos(a), std::sin(a)}, n{-std::sin(a), std::cos(a)};
    return PuiseuxBranch(std::move(label), {{1, d}, {2, k * n}}, 1.0);
  };
  return GermSet{"parabolas" + std::to_string(index), 2, {make("p", a1, k1), make("q", a2, k2)}, {}};
}

std::vector<ScenarioResult>& plane_results() {
  static std::vector<ScenarioResult> all = [] {
    std::vector<ScenarioResult> v;
    for (const auto& [label, r] : results())
      if (r.ambient_dim == 2) v.push_back(r);
    std::mt19937 rng(202);
    for (int i = 0; i < 10; ++i) v.push_back(run_scenario(custom_scenario(random_parabolas(rng, i)), RunConfig{}));
    return v;
  }();
  return all;
}

Result criterion6() {
  Result o;
  int counter = 0, medial_not = 0;
  for (const auto& r : plane_results()) {
    if (r.medial_verdict != Verdict::NOT_LNE) continue;
    ++medial_not;
    if (r.set_verdict != Verdict::NOT_LNE) {
      ++counter;
      o.require(false, r.label);
    }
  }
  std::map<std::string, int> tally;
  for (const auto& r : plane_results()) ++tally[to_string(r.set_verdict) + "/" + to_string(r.medial_verdict)];
  o.detail << plane_results().size() << " plane germs, " << medial_not << " with medial NOT_LNE, " << counter
           << " counterexamples; set/medial tally";
  for (const auto& [k, n] : tally) o.detail << " " << k << ":" << n;
  return o;
}

Result criterion7() {
  Result o;
  int checked = 0;
  double margin = -kInfinity;
  for (const auto& r : plane_results()) {
    if (!r.l_set || !r.l_medial || r.set_verdict == Verdict::UNDECIDED || r.medial_verdict == Verdict::UNDECIDED)
      continue;
    ++checked;
    margin = std::max(margin, *r.l_medial - *r.l_set);
    o.require(*r.l_medial <= *r.l_set + 0.1, r.label);
  }
  o.require(checked > 0, "no confident germs");
  o.detail << checked << " confident plane germs, max L_medial - L_set = " << f(margin);
  return o;
}

Result criterion8() {
  Result o;
  std::mt19937 rng(303);
  int graphs = 0, triples = 0, violations = 0;
  for (const auto& label : builtin_labels()) {
    GermSet g = builtin(label).germ;
    for (int k : {6, 10}) {
      const double t = std::ldexp(1.0, -k);
      auto cloud = sample_cloud(g, t, label == "horn3d" ? 16 : 32);
      double spacing = *std::max_element(cloud.piece_spacing.begin(), cloud.piece_spacing.end());
      NeighborhoodGraph graph(cloud, 4 * spacing);
      ++graphs;
      std::uniform_int_distribution<int> pick(0, static_cast<int>(graph.node_count()) - 1);
      for (int i = 0; i < 1000; ++i, ++triples) {
        int a = pick(rng), b = pick(rng), c = pick(rng);
        double ab = graph.inner_distance(a, b), ac = graph.inner_distance(a, c), bc = graph.inner_distance(b, c);
        if (!(induced_distance(graph.node_point(a), graph.node_point(b)) <= ab * (1 + 1e-12))) ++violations;
        if (ab != graph.inner_distance(b, a)) ++violations;
        if (!(ac <= (ab + bc) * (1 + 1e-12))) ++violations;
      }
    }
  }
  o.require(violations == 0, std::to_string(violations) + " violations");
  o.detail << graphs << " graphs, " << triples << " triples, " << violations << " violations";
  return o;
}

Result criterion9() {
  Result o;
  PancakeComplex cx;
  cx.pancakes.push_back(polyline_pancake("A", {{0, 0}, {1, 0}, {1, 1}}));
  cx.pancakes.push_back(polyline_pancake("B", {{1, 1}, {2, 1}, {2, 0}}));
  cx.pancakes.push_back(polyline_pancake("C", {{2, 0}, {3, 0}, {0.5, -2}, {0.5, 0}}));
  cx.junctions = {{{1, 1}, 0, 1}, {{2, 0}, 1, 2}, {{0.5, 0}, 0, 2}};
  cx.validate();
  std::vector<Point> probes{{0, 0}, {0.2, 0}, {1, 0.5}, {1.5, 1}, {2, 0.5}, {2.5, 0}, {1.75, -1}, {0.5, -1}};
  int pairs = 0, mismatches = 0;
  for (const auto& x : probes)
    for (const auto& y : probes) {
      if (x == y) continue;
      ++pairs;
      if (pancake_distance(cx, x, y).length != oracle::enumerate_pancake_sequences(cx, x, y)) ++mismatches;
    }
  o.require(mismatches == 0, "enumeration mismatch");

  // two tangent parabolas meeting only at 0
  PuiseuxBranch g1("g1", {{1, {1, 0}}, {2, {0, 1}}}), g2("g2", {{1, {1, 0}}, {2, {0, 2}}});
  double worst = 0.0;
  for (double t : dyadic_scales()) {
    auto polyline = [&](const PuiseuxBranch& b) {
      std::vector<double> norms{t};
      for (double s = 2 * t; s <= 0.5; s *= 2) norms.push_back(s);
      std::vector<Point> v{zeros(2)};
      for (const auto& p : reparametrize_by_distance(b, norms)) v.push_back(p);
      return v;
    };
    auto v1 = polyline(g1), v2 = polyline(g2);
    PancakeComplex two;
    two.scale = t;
    two.pancakes.push_back(polyline_pancake("g1", v1));
    two.pancakes.push_back(polyline_pancake("g2", v2));
    two.junctions.push_back({zeros(2), 0, 1});
    two.validate();
    double d = pancake_distance(two, v1[1], v2[1]).length;
    worst = std::max(worst, std::fabs(d - 2 * t));
  }
  o.require(worst <= 1e-9, "d_P = 2t");
  o.detail << "3-pancake complex: " << pairs << " pairs, " << mismatches << " mismatches; tangent pair max |d_P - 2t| = "
           << worst;
  return o;
}

Result criterion10() {
  Result o;
  int compared = 0;
  for (const auto& label : builtin_labels()) {
    const auto& r = results().at(label);
    GermSet g = builtin(label).germ;
    Verdict e = r.link.verdict;
    Verdict m = link_criterion_verdict(g, dyadic_scales(), 32, max_norm(g.ambient_dim)).verdict;
    o.detail << label << " " << to_string(e) << "/" << to_string(m) << "; ";
    if (e == Verdict::UNDECIDED || m == Verdict::UNDECIDED) continue;
    ++compared;
    o.require(e == m, label);
  }
  o.detail << compared << " scenarios compared (euclid/maxv)";
  return o;
}

std::string capture(const std::string& cmd) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  pclose(p);
  return out;
}

Result criterion11() {
  Result o;
  const std::string cmd = std::string(LNE_BINARY) + " scenarios --format json --seed 42";
  std::string a = capture(cmd), b = capture(cmd);
  o.require(!a.empty(), "empty output");
  o.require(a == b, "outputs differ");
  o.detail << "two CLI runs, " << a.size() << " bytes each, " << (a == b ? "identical" : "different");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--known-fail") known.insert(std::stoi(argv[++i]));

  using Fn = Result (*)();
  const std::vector<std::pair<std::string, Fn>> criteria{
      {"order oracle equivalence", criterion1},  {"cusp", criterion2},
      {"abs_graph", criterion3},                 {"three_tangent", criterion4},
      {"horn3d", criterion5},                    {"plane medial implication", criterion6},
      {"medial exponent inequality", criterion7}, {"metric invariants", criterion8},
      {"pancake metric", criterion9},            {"norm independence", criterion10},
      {"determinism", criterion11}};

  int passed = 0, unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    Result o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    std::cout << "criterion " << id << " (" << criteria[i].first << "): " << (o.pass ? "PASS" : "FAIL");
    if (!o.pass && known.count(id)) std::cout << " (known)";
    std::cout << " -- " << o.detail.str() << std::endl;
    if (o.pass)
      ++passed;
    else if (!known.count(id))
      ++unexpected;
  }
  std::cout << passed << "/" << criteria.size() << " criteria pass" << std::endl;
  return unexpected == 0 ? 0 : 1;
}
