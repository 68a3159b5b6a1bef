#include <algorithm>
#include <string>

#include "lne/errors.hpp"
#include "lne/germs.hpp"

namespace lne {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ParseError("field " + path + ": " + what);
}

const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) field_error(path + "/" + key, "missing");
  return j.at(key);
}

Rational parse_exponent(const json& e, const std::string& path) {
  if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
    field_error(path, "exponent must be an integer pair [num, den]");
  auto den = e[1].get<std::int64_t>();
  if (den <= 0) field_error(path, "exponent denominator must be positive");
  return Rational(e[0].get<std::int64_t>(), den);
}

}  // namespace

GermSet germ_from_json(const json& j) {
  GermSet set;
  const std::string root;
  const json& label = require(j, "label", root);
  if (!label.is_string()) field_error("/label", "expected string");
  set.label = label.get<std::string>();
  const json& dim = require(j, "ambient_dim", root);
  if (!dim.is_number_integer() || dim.get<int>() < 1) field_error("/ambient_dim", "expected positive integer");
  set.ambient_dim = dim.get<std::size_t>();
  if (j.contains("branches")) {
    const json& bs = j.at("branches");
    if (!bs.is_array()) field_error("/branches", "expected array");
    for (std::size_t bi = 0; bi < bs.size(); ++bi) {
      const std::string bp = "/branches/" + std::to_string(bi);
      const json& b = bs[bi];
      std::string blabel = b.contains("label") && b.at("label").is_string() ? b.at("label").get<std::string>()
                                                                             : "b" + std::to_string(bi);
      double t_max = 1.0;
      if (b.contains("t_max")) {
        if (!b.at("t_max").is_number()) field_error(bp + "/t_max", "expected number");
        t_max = b.at("t_max").get<double>();
      }
      const json& terms = require(b, "terms", bp);
      if (!terms.is_array() || terms.empty()) field_error(bp + "/terms", "expected nonempty array");
      std::vector<Term> parsed;
      for (std::size_t ti = 0; ti < terms.size(); ++ti) {
        const std::string tp = bp + "/terms/" + std::to_string(ti);
        Rational e = parse_exponent(require(terms[ti], "exp", tp), tp + "/exp");
        const json& c = require(terms[ti], "coeff", tp);
        if (!c.is_array() || !std::all_of(c.begin(), c.end(), [](const json& v) { return v.is_number(); }))
          field_error(tp + "/coeff", "expected array of numbers");
        parsed.push_back({e, c.get<std::vector<double>>()});
      }
      try {
        set.branches.emplace_back(blabel, std::move(parsed), t_max);
      } catch (const ValidationError& err) {
        field_error(bp, err.what());
      }
    }
  }
  if (j.contains("surfaces")) {
    const json& ss = j.at("surfaces");
    if (!ss.is_array()) field_error("/surfaces", "expected array");
    for (std::size_t si = 0; si < ss.size(); ++si) {
      const std::string sp = "/surfaces/" + std::to_string(si);
      const json& type = require(ss[si], "type", sp);
      if (!type.is_string()) field_error(sp + "/type", "expected string");
      std::string slabel = ss[si].value("label", type.get<std::string>() + std::to_string(si));
      json params = ss[si].value("params", json::object());
      try {
        set.surfaces.push_back(make_surface(type.get<std::string>(), slabel, params));
      } catch (const ValidationError& err) {
        field_error(sp, err.what());
      } catch (const json::exception& err) {
        field_error(sp + "/params", err.what());
      }
    }
  }
  set.validate();
  return set;
}

json germ_to_json(const GermSet& set) {
  json j;
  j["label"] = set.label;
  j["ambient_dim"] = set.ambient_dim;
  j["branches"] = json::array();
  for (const auto& b : set.branches) {
    json terms = json::array();
    for (const auto& t : b.terms()) terms.push_back({{"exp", {t.exponent.num(), t.exponent.den()}}, {"coeff", t.coeff}});
    j["branches"].push_back({{"label", b.label()}, {"t_max", b.t_max()}, {"terms", terms}});
  }
  j["surfaces"] = json::array();
  for (const auto& s : set.surfaces)
    j["surfaces"].push_back({{"type", s->kind()}, {"label", s->label()}, {"params", s->params()}});
  return j;
}

GermSet parse_germ_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
    throw ParseError("line " + std::to_string(line) + ": " + e.what());
  }
  return germ_from_json(j);
}

}  // namespace lne
