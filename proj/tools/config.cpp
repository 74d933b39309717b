#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "ldrate/errors.hpp"

namespace ldrate::cli {

namespace {

std::string at(const YAML::Node& n) { return "line " + std::to_string(n.Mark().line + 1); }

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg) { throw ConfigError(at(n) + ": " + msg); }

void allow_keys(const YAML::Node& n, const std::set<std::string>& keys, const std::string& where) {
  if (!n.IsMap()) fail(n, where + " must be a mapping");
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (!keys.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
  }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(n, what + " must be a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail(n, what + " has the wrong type");
  }
}

double number(const YAML::Node& n, const std::string& what) {
  if (n.IsScalar()) {
    const auto s = n.as<std::string>();
    if (s == "inf" || s == ".inf") return kInf;
    if (s == "-inf" || s == "-.inf") return -kInf;
  }
  return scalar<double>(n, what);
}

std::vector<double> numbers(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence()) fail(n, what + " must be a list");
  std::vector<double> v;
  for (const auto& e : n) v.push_back(number(e, what));
  return v;
}

Vec vec(const YAML::Node& n, const std::string& what) {
  if (n.IsScalar()) return Vec::Constant(1, number(n, what));
  const auto v = numbers(n, what);
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Mat mat(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence() || n.size() == 0) fail(n, what + " must be a nonempty list of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : n) rows.push_back(numbers(r, what));
  Mat m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) fail(n, what + " has rows of different lengths");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

DiscreteMeasure measure(const YAML::Node& n, const std::string& what) {
  allow_keys(n, {"points", "weights"}, what);
  if (!n["points"] || !n["weights"]) fail(n, what + " needs points and weights");
  try {
    return DiscreteMeasure(numbers(n["points"], what + ".points"), numbers(n["weights"], what + ".weights"));
  } catch (const std::invalid_argument& e) {
    fail(n, e.what());
  }
}

WeightFunction weight_function(const YAML::Node& n) {
  if (n.IsScalar()) {
    const auto s = n.as<std::string>();
    if (s == "identity") return WeightFunction::identity_scalar();
    if (s == "diag_one_x") return WeightFunction::diag_one_x();
    if (s == "spiked5x3") return WeightFunction::spiked5x3();
    fail(n, "unknown weight function '" + s + "' (identity, diag_one_x, spiked5x3 or {base, slope})");
  }
  allow_keys(n, {"base", "slope"}, "scenario.f");
  if (!n["base"] || !n["slope"]) fail(n, "scenario.f needs base and slope");
  try {
    return WeightFunction(mat(n["base"], "f.base"), mat(n["slope"], "f.slope"));
  } catch (const std::invalid_argument& e) {
    fail(n, e.what());
  }
}

Scenario custom_scenario(const YAML::Node& n) {
  allow_keys(n, {"law", "bulk", "support", "tracks", "f", "horizon"}, "scenario");
  for (const char* k : {"law", "bulk", "support", "f"})
    if (!n[k]) fail(n, std::string("scenario needs '") + k + "'");
  std::shared_ptr<const ParticleLaw> law;
  try {
    law = make_law(scalar<std::string>(n["law"], "scenario.law"));
  } catch (const std::invalid_argument& e) {
    fail(n["law"], e.what());
  }
  const DiscreteMeasure bulk = measure(n["bulk"], "scenario.bulk");

  const YAML::Node s = n["support"];
  allow_keys(s, {"atoms", "interval"}, "scenario.support");
  std::optional<SupportSet> support;
  if (s["atoms"]) support = SupportSet::atoms(numbers(s["atoms"], "support.atoms"));
  if (s["interval"]) {
    const auto iv = numbers(s["interval"], "support.interval");
    if (iv.size() != 2 || support) fail(s, "support needs exactly one of atoms or interval [lo, hi]");
    support = SupportSet::interval(iv[0], iv[1]);
  }
  if (!support) fail(s, "support needs atoms or interval");

  std::vector<OutlierTrack> tracks;
  if (const YAML::Node t = n["tracks"]) {
    if (!t.IsSequence()) fail(t, "scenario.tracks must be a list");
    for (const auto& e : t) {
      allow_keys(e, {"name", "limits", "amplitude", "approach_rate"}, "track");
      if (!e["name"] || !e["limits"]) fail(e, "track needs name and limits");
      OutlierTrack tr{scalar<std::string>(e["name"], "track.name"), numbers(e["limits"], "track.limits")};
      if (e["amplitude"]) tr.amplitude = number(e["amplitude"], "track.amplitude");
      if (e["approach_rate"]) tr.approach_rate = number(e["approach_rate"], "track.approach_rate");
      tracks.push_back(std::move(tr));
    }
  }
  const WeightFunction f = weight_function(n["f"]);
  const long horizon = n["horizon"] ? scalar<long>(n["horizon"], "scenario.horizon") : kDefaultHorizon;
  try {
    return Scenario(law, WeightArraySpec{bulk, tracks, *support}, f, horizon);
  } catch (const std::invalid_argument& e) {
    fail(n, e.what());
  }
}

void apply_gauss2d(RunConfig& cfg, const YAML::Node& n) {
  allow_keys(n, {"R", "x_min", "x_max", "map"}, "gauss2d");
  const Gauss2DParams d = Gauss2DParams::standard();
  DiscreteMeasure R = n["R"] ? measure(n["R"], "gauss2d.R") : d.R();
  const double lo = n["x_min"] ? number(n["x_min"], "gauss2d.x_min") : d.x_min();
  const double hi = n["x_max"] ? number(n["x_max"], "gauss2d.x_max") : d.x_max();
  try {
    cfg.gauss2d.emplace(std::move(R), lo, hi);
  } catch (const std::invalid_argument& e) {
    fail(n, e.what());
  }
  if (const YAML::Node m = n["map"]) {
    allow_keys(m, {"x", "y"}, "gauss2d.map");
    auto axis = [&](const YAML::Node& a, double& l, double& h, int& c) {
      const auto v = numbers(a, "map axis");
      if (v.size() != 3 || v[2] < 1) fail(a, "map axis must be [lo, hi, count]");
      l = v[0];
      h = v[1];
      c = static_cast<int>(v[2]);
    };
    if (m["x"]) axis(m["x"], cfg.map.x_lo, cfg.map.x_hi, cfg.map.nx);
    if (m["y"]) axis(m["y"], cfg.map.y_lo, cfg.map.y_hi, cfg.map.ny);
  }
}

void apply_nonconvex(RunConfig& cfg, const YAML::Node& n) {
  allow_keys(n, {"k1", "k2", "T"}, "nonconvex");
  NonConvexScenario sc;
  if (n["k1"]) sc.kappa1 = number(n["k1"], "nonconvex.k1");
  if (n["k2"]) sc.kappa2 = number(n["k2"], "nonconvex.k2");
  if (n["T"]) sc.T = scalar<int>(n["T"], "nonconvex.T");
  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    fail(n, e.what());
  }
  cfg.nonconvex = sc;
}

void set_preset(RunConfig& cfg, const std::string& name) {
  cfg.preset = name;
  if (name == "cramer") cfg.scenario = cramer_scenario();
  else if (name == "figure1") cfg.scenario = figure1_scenario();
  else if (name == "example1") cfg.scenario = example1_scenario();
  else if (name == "example2") cfg.scenario = example2_scenario();
  else if (name == "gauss2d") {
    if (!cfg.gauss2d) cfg.gauss2d = Gauss2DParams::standard();
    cfg.scenario = cfg.gauss2d->scenario();
  } else if (name == "nonconvex") {
    if (!cfg.nonconvex) cfg.nonconvex = NonConvexScenario{};
    cfg.scenario = cfg.nonconvex->scenario();
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
}

}  // namespace

RunConfig preset_config(const std::string& name) {
  RunConfig cfg;
  set_preset(cfg, name);
  return cfg;
}

RunConfig parse_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  RunConfig cfg;
  if (root.IsNull()) throw ConfigError("line 1: empty configuration");
  allow_keys(root, {"seed", "scenario", "gauss2d", "nonconvex", "rate", "mc", "spherical", "output"}, "top level");

  if (root["seed"]) cfg.seed = scalar<std::uint64_t>(root["seed"], "seed");
  if (root["gauss2d"]) apply_gauss2d(cfg, root["gauss2d"]);
  if (root["nonconvex"]) apply_nonconvex(cfg, root["nonconvex"]);

  if (const YAML::Node s = root["scenario"]) {
    if (s.IsScalar()) {
      try {
        set_preset(cfg, s.as<std::string>());
      } catch (const ConfigError& e) {
        fail(s, e.what());
      }
    } else {
      cfg.scenario = custom_scenario(s);
    }
  }

  if (const YAML::Node r = root["rate"]) {
    allow_keys(r, {"route", "points", "grid"}, "rate");
    if (r["route"]) {
      cfg.route = scalar<std::string>(r["route"], "rate.route");
      if (cfg.route != "dual" && cfg.route != "infconv" && cfg.route != "closed")
        fail(r["route"], "rate.route must be dual, infconv or closed");
    }
    if (const YAML::Node p = r["points"]) {
      if (!p.IsSequence()) fail(p, "rate.points must be a list");
      for (const auto& e : p) cfg.points.push_back(vec(e, "rate.points"));
    }
    if (const YAML::Node g = r["grid"]) {
      allow_keys(g, {"lo", "hi", "step"}, "rate.grid");
      if (!g["lo"] || !g["hi"] || !g["step"]) fail(g, "rate.grid needs lo, hi and step");
      GridSpec gs{vec(g["lo"], "grid.lo"), vec(g["hi"], "grid.hi"), vec(g["step"], "grid.step")};
      if (gs.lo.size() != gs.hi.size() || gs.lo.size() != gs.step.size()) fail(g, "grid lo/hi/step sizes differ");
      if ((gs.step.array() <= 0.0).any() || (gs.hi.array() < gs.lo.array()).any())
        fail(g, "grid needs positive steps and lo <= hi");
      cfg.grid = gs;
    }
  }

  if (const YAML::Node m = root["mc"]) {
    allow_keys(m, {"z", "delta", "n_list", "trials", "tilt", "event", "tolerance", "abs_tolerance", "computed_rate"},
               "mc");
    if (!m["z"] || !m["n_list"]) fail(m, "mc needs z and n_list");
    McSpec mc;
    mc.z = vec(m["z"], "mc.z");
    for (double v : numbers(m["n_list"], "mc.n_list")) mc.n_list.push_back(static_cast<long>(v));
    if (m["delta"]) mc.delta = number(m["delta"], "mc.delta");
    if (m["trials"]) mc.trials = scalar<long>(m["trials"], "mc.trials");
    if (m["tilt"]) mc.tilt = vec(m["tilt"], "mc.tilt");
    if (m["tolerance"]) mc.tolerance = number(m["tolerance"], "mc.tolerance");
    if (m["abs_tolerance"]) mc.abs_tolerance = number(m["abs_tolerance"], "mc.abs_tolerance");
    if (m["computed_rate"]) mc.computed_rate = number(m["computed_rate"], "mc.computed_rate");
    if (m["event"]) {
      const auto e = scalar<std::string>(m["event"], "mc.event");
      if (e == "ball") mc.event = EventKind::Ball;
      else if (e == "upper_tail") mc.event = EventKind::UpperTail;
      else fail(m["event"], "mc.event must be ball or upper_tail");
    }
    cfg.mc = mc;
  }

  if (const YAML::Node s = root["spherical"]) {
    allow_keys(s, {"thetas"}, "spherical");
    if (s["thetas"]) cfg.thetas = numbers(s["thetas"], "spherical.thetas");
  }

  if (const YAML::Node o = root["output"]) {
    allow_keys(o, {"csv", "json"}, "output");
    if (o["csv"]) cfg.csv_path = scalar<std::string>(o["csv"], "output.csv");
    if (o["json"]) cfg.json_path = scalar<std::string>(o["json"], "output.json");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace ldrate::cli
