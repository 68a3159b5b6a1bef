// lne: Lipschitz normal embedding analysis of curve and surface germs.
#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lne/errors.hpp"
#include "lne/links.hpp"
#include "lne/medial.hpp"
#include "lne/scenarios.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kUndecided = 2;

struct Options {
  std::string builtin;
  std::string germ;
  double t_min = std::ldexp(1.0, -16);
  double t_max = std::ldexp(1.0, -6);
  int levels = 11;
  int density = 32;
  double radius_factor = 4.0;
  double order_tol = 0.1;
  double grid_res = 1.0 / 128;
  double tau = 1e-3;
  double theta_min = 0.2;
  std::string norm = "euclid";
  std::vector<double> weights;
  std::string format;
  std::string plot;
  std::uint64_t seed = 0;
};

lne::Scenario load_source(const Options& o) {
  if (o.builtin.empty() == o.germ.empty()) throw lne::InputError("give exactly one of --builtin and --germ");
  if (!o.builtin.empty()) return lne::builtin(o.builtin);
  std::ifstream in(o.germ);
  if (!in) throw lne::InputError("cannot read germ file " + o.germ);
  std::stringstream buf;
  buf << in.rdbuf();
  lne::GermSet g = lne::parse_germ_text(buf.str());
  g.validate();
  return lne::custom_scenario(std::move(g));
}

lne::RunConfig make_config(const Options& o, std::size_t dim) {
  lne::RunConfig c;
  c.tangency.scales = lne::geometric_scales(o.t_min, o.t_max, o.levels);
  c.tangency.density = o.density;
  c.tangency.radius_factor = o.radius_factor;
  c.tangency.order_tolerance = o.order_tol;
  c.grid_res = o.grid_res;
  c.medial.density = o.density;
  c.medial.tau = o.tau;
  c.medial.theta_min = o.theta_min;
  c.seed = o.seed;
  if (o.norm == "maxv") {
    std::vector<double> w = o.weights.empty() ? std::vector<double>(dim, 1.0) : o.weights;
    if (w.size() != dim)
      throw lne::InputError("--weights needs " + std::to_string(dim) + " values, got " + std::to_string(w.size()));
    c.norm = lne::NormSpec::maxv(w);
  }
  lne::validate(c);
  return c;
}

json config_json(const Options& o, const lne::RunConfig& c) {
  json j = {{"t_min", o.t_min},         {"t_max", o.t_max},     {"levels", o.levels},
            {"density", o.density},     {"radius_factor", o.radius_factor},
            {"order_tol", o.order_tol}, {"grid_res", o.grid_res}, {"tau", o.tau},
            {"theta_min", o.theta_min}, {"norm", c.norm.name()}, {"seed", o.seed}};
  if (c.norm.kind == lne::NormSpec::Kind::MaxV) j["weights"] = c.norm.weights;
  return j;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw lne::InputError("cannot write " + path.string());
  out << text;
}

bool undecided(const lne::ScenarioResult& r) {
  return r.outcome == lne::Outcome::INCONCLUSIVE || r.set_verdict == lne::Verdict::UNDECIDED ||
         r.medial_verdict == lne::Verdict::UNDECIDED || r.link.verdict == lne::Verdict::UNDECIDED;
}

int cmd_analyze(const Options& o) {
  auto sc = load_source(o);
  auto cfg = make_config(o, sc.germ.ambient_dim);
  auto r = lne::run_scenario(sc, cfg);
  if (o.format == "csv") {
    std::cout << lne::scenarios_csv({r});
  } else {
    json j = lne::to_json(r);
    j["config"] = config_json(o, cfg);
    std::cout << j.dump(2) << '\n';
  }
  if (!o.plot.empty() && sc.germ.ambient_dim == 2)
    write_file(fs::path(o.plot) / (r.label + ".svg"), lne::medial_svg(r.medial_axis, sc.germ, sc.medial_window));
  return undecided(r) ? kUndecided : kOk;
}

int cmd_scenarios(const Options& o) {
  std::vector<lne::ScenarioResult> results;
  json rows = json::array();
  json cfg_json;
  for (const auto& label : lne::builtin_labels()) {
    auto sc = lne::builtin(label);
    auto cfg = make_config(o, sc.germ.ambient_dim);
    if (cfg_json.is_null()) cfg_json = config_json(o, cfg);
    results.push_back(lne::run_scenario(sc, cfg));
    rows.push_back(lne::to_json(results.back()));
    if (!o.plot.empty() && sc.germ.ambient_dim == 2)
      write_file(fs::path(o.plot) / (label + ".svg"),
                 lne::medial_svg(results.back().medial_axis, sc.germ, sc.medial_window));
  }
  if (o.format == "csv")
    std::cout << lne::scenarios_csv(results);
  else
    std::cout << json{{"config", cfg_json}, {"scenarios", rows}}.dump(2) << '\n';

  int code = kOk;
  for (const auto& r : results) {
    if (r.outcome == lne::Outcome::FAIL) return kError;
    if (r.outcome == lne::Outcome::INCONCLUSIVE) code = kUndecided;
  }
  return code;
}

int cmd_medial(const Options& o) {
  auto sc = load_source(o);
  const auto dim = sc.germ.ambient_dim;
  if (dim != 2 && dim != 3) throw lne::InputError("medial export needs a germ in the plane or in space");
  if (!o.plot.empty() && dim != 2) throw lne::InputError("unsupported plot: SVG output is only available for plane germs");
  auto cfg = make_config(o, dim);

  lne::MedialAxisSample axis;
  if (sc.medial_slab) {
    for (double t : cfg.tangency.scales) {
      lne::Box w = sc.medial_slab(t);
      auto slab = lne::extract_medial_axis_grid(sc.germ, w, (w.hi[0] - w.lo[0]) / 64, cfg.medial);
      axis.piece_names = slab.piece_names;
      for (auto& m : slab.points) axis.points.push_back(std::move(m));
    }
  } else {
    lne::Box w = sc.medial_window;
    if (dim == 3) w = lne::Box{{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}};
    axis = lne::extract_medial_axis_grid(sc.germ, w, cfg.grid_res, cfg.medial);
  }

  if (o.format == "json") {
    json pts = json::array();
    for (const auto& m : axis.points)
      pts.push_back({{"p", m.p},
                     {"distance", m.cluster.distance},
                     {"cluster_count", m.cluster.cluster_count},
                     {"max_pair_angle", m.cluster.max_pair_angle}});
    std::cout << json{{"label", sc.label}, {"config", config_json(o, cfg)}, {"points", pts}}.dump(2) << '\n';
  } else {
    std::cout << lne::medial_csv(axis, dim);
  }
  if (!o.plot.empty())
    write_file(fs::path(o.plot) / (sc.label + "_medial.svg"), lne::medial_svg(axis, sc.germ, sc.medial_window));
  return kOk;
}

int cmd_link(const Options& o) {
  auto sc = load_source(o);
  auto cfg = make_config(o, sc.germ.ambient_dim);
  auto c = lne::link_criterion_verdict(sc.germ, cfg.tangency.scales, cfg.tangency.density, cfg.norm);
  if (o.format == "csv") {
    std::cout << "t,component_count,C_t,min_separation\n";
    for (const auto& s : c.report.per_scale) {
      if (s.empty) continue;
      std::cout << s.t << ',' << s.component_count << ',' << s.c_t << ',';
      if (std::isfinite(s.min_separation)) std::cout << s.min_separation;
      std::cout << '\n';
    }
  } else {
    json j = lne::to_json(c);
    j["label"] = sc.label;
    j["config"] = config_json(o, cfg);
    std::cout << j.dump(2) << '\n';
  }
  return c.verdict == lne::Verdict::UNDECIDED ? kUndecided : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lipschitz normal embedding of curve and surface germs"};
  app.set_config("--config", "", "TOML/INI file with option defaults");
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--builtin", o.builtin, "Builtin scenario label");
  app.add_option("--germ", o.germ, "Germ file (JSON)");
  app.add_option("--t-min", o.t_min, "Smallest scale")->capture_default_str();
  app.add_option("--t-max", o.t_max, "Largest scale")->capture_default_str();
  app.add_option("--levels", o.levels, "Number of geometric scales")->capture_default_str();
  app.add_option("--density", o.density, "Samples per scale")->capture_default_str();
  app.add_option("--radius-factor", o.radius_factor, "Graph radius in units of the spacing")->capture_default_str();
  app.add_option("--order-tol", o.order_tol, "Order tolerance")->capture_default_str();
  app.add_option("--grid-res", o.grid_res, "Grid spacing for plane medial extraction")->capture_default_str();
  app.add_option("--tau", o.tau, "Relative equidistance tolerance")->capture_default_str();
  app.add_option("--theta-min", o.theta_min, "Minimal angle between nearest points")->capture_default_str();
  app.add_option("--norm", o.norm, "Norm for link sections")
      ->check(CLI::IsMember({"euclid", "maxv"}))
      ->capture_default_str();
  app.add_option("--weights", o.weights, "Max-norm weights, comma separated")->delimiter(',');
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--plot", o.plot, "Directory for SVG plots");
  app.add_option("--seed", o.seed, "Random seed")->capture_default_str();

  auto* analyze = app.add_subcommand("analyze", "Tangency, medial axis and link report for one germ");
  auto* scenarios = app.add_subcommand("scenarios", "Run the builtin scenario registry");
  auto* medial = app.add_subcommand("medial", "Export the medial axis of a germ");
  auto* link = app.add_subcommand("link", "Link criterion report for a germ");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Error& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kError;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(o);
    if (scenarios->parsed()) return cmd_scenarios(o);
    if (medial->parsed()) return cmd_medial(o);
    if (link->parsed()) return cmd_link(o);
  } catch (const lne::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
