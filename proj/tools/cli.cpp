#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <utility>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "ldrate/errors.hpp"
#include "ldrate/gauss2d.hpp"
#include "ldrate/montecarlo.hpp"
#include "ldrate/nonconvex.hpp"
#include "ldrate/rate_engine.hpp"
#include "ldrate/weight_arrays.hpp"

namespace ldrate::cli {

using nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string num(ExtReal v) { return num(v.to_double()); }

std::string join(const std::optional<Vec>& v) {
  if (!v) return "";
  std::string s;
  for (Eigen::Index i = 0; i < v->size(); ++i) s += (i ? ";" : "") + num((*v)[i]);
  return s;
}

json jnum(double v) {
  if (std::isinf(v)) return v > 0 ? json{{"inf", true}} : json{{"inf", true}, {"sign", -1}};
  return v;
}
json jnum(ExtReal v) { return jnum(v.to_double()); }

json jvec(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(jnum(v[i]));
  return a;
}

json jdomain(const HalfspaceDomain& d) {
  json a = json::array();
  for (const auto& h : d.constraints()) a.push_back({{"normal", jvec(h.normal)}, {"bound", jnum(h.bound)}});
  return a;
}

// Sink that writes to a configured file or falls back to a stream.
class Sink {
 public:
  Sink(const std::optional<std::string>& path, std::ostream& fallback) : os_(&fallback) {
    if (path) {
      file_ = std::make_unique<std::ofstream>(*path);
      if (!*file_) throw ConfigError("cannot open output file " + *path);
      os_ = file_.get();
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

void emit_json(const RunConfig& cfg, const json& j, std::ostream& out) {
  Sink s(cfg.json_path, out);
  *s << j.dump(2) << '\n';
}

const Scenario& need_scenario(const RunConfig& cfg) {
  if (!cfg.scenario) throw ConfigError("configuration has no scenario section");
  return *cfg.scenario;
}

std::vector<Vec> grid_points(const GridSpec& g) {
  const auto m = g.lo.size();
  std::vector<long> counts(m);
  for (Eigen::Index k = 0; k < m; ++k)
    counts[k] = static_cast<long>(std::floor((g.hi[k] - g.lo[k]) / g.step[k] + 1e-9)) + 1;
  std::vector<Vec> pts;
  std::vector<long> idx(m, 0);
  while (true) {
    Vec z(m);
    for (Eigen::Index k = 0; k < m; ++k) z[k] = g.lo[k] + static_cast<double>(idx[k]) * g.step[k];
    pts.push_back(z);
    Eigen::Index k = m - 1;
    while (k >= 0 && ++idx[k] == counts[k]) idx[k--] = 0;
    if (k < 0) break;
  }
  return pts;
}

int cmd_rate(const RunConfig& cfg, bool grid, std::ostream& out) {
  const Scenario& sc = need_scenario(cfg);
  std::vector<Vec> pts;
  if (grid) {
    if (!cfg.grid) throw ConfigError("rate grid needs a rate.grid section");
    pts = grid_points(*cfg.grid);
  } else {
    if (cfg.points.empty()) throw ConfigError("rate eval needs rate.points");
    pts = cfg.points;
  }
  for (const auto& z : pts)
    if (z.size() != sc.m()) throw ConfigError("rate point has dimension " + std::to_string(z.size()) + ", expected " +
                                              std::to_string(sc.m()));

  std::optional<RateEngine> engine;
  if (cfg.preset != "nonconvex" && cfg.route != "closed") engine.emplace(sc);

  Sink csv(cfg.csv_path, out);
  for (int k = 0; k < sc.m(); ++k) *csv << 'z' << k + 1 << ',';
  *csv << "value,route,region,value_only,lambda_star,z_star,z_n\n";
  auto row = [&](const Vec& z, const RateReport& r, const std::string& route) {
    for (Eigen::Index k = 0; k < z.size(); ++k) *csv << num(z[k]) << ',';
    *csv << num(r.value) << ',' << route << ',' << r.region << ',' << (r.value_only ? 1 : 0) << ','
         << join(r.lambda_star) << ',' << join(r.z_star) << ',' << join(r.z_n) << '\n';
  };

  if (cfg.preset == "nonconvex") {
    for (const auto& z : pts) {
      const NonConvexRate nr = rate_nonconvex(*cfg.nonconvex, z);
      RateReport r;
      r.value = nr.value;
      r.value_only = true;
      if (nr.value.is_finite()) r.z_star = nr.z0;
      row(z, r, "nonconvex");
    }
    return kExitOk;
  }
  if (cfg.route == "closed") {
    if (cfg.preset != "gauss2d") throw ConfigError("route 'closed' is available for the gauss2d scenario only");
    const Gauss2D g(*cfg.gauss2d);
    for (const auto& z : pts) row(z, g.rate_closed_form(z[0], z[1]), "closed");
    return kExitOk;
  }
  const Route route = cfg.route == "infconv" ? Route::InfConv : Route::DualSup;
  for (const auto& z : pts) {
    RateReport r = engine->rate(z, route);
    if (cfg.preset == "gauss2d") r.region = to_string(classify(*cfg.gauss2d, z[0], z[1]));
    row(z, r, to_string(route));
  }
  return kExitOk;
}

int cmd_check_a4(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Scenario& sc = need_scenario(cfg);
  const LimitSets ls = limit_sets(sc.spec, sc.f, sc.horizon);
  const A4Check a4 = check_a4(ls, *sc.law);
  json j{{"holds", a4.holds}, {"empty_inner", a4.empty_inner}};
  j["witness"] = a4.witness ? jvec(*a4.witness) : json(nullptr);
  j["inner_domain"] = a4.inner_domain ? jdomain(*a4.inner_domain) : json(nullptr);
  j["outer_domain"] = a4.outer_domain ? jdomain(*a4.outer_domain) : json(nullptr);
  emit_json(cfg, j, out);
  if (!a4.holds) {
    err << "inner and outer limit domains differ";
    if (a4.witness) err << "; witness " << join(a4.witness);
    err << '\n';
    return kExitA4;
  }
  return kExitOk;
}

int example_figure1(const RunConfig& cfg, std::ostream& out) {
  const RateEngine engine(figure1_scenario());
  Sink csv(cfg.csv_path, out);
  *csv << "z,dual,infconv\n";
  std::vector<double> zs, vs;
  for (int i = 0; i <= 390; ++i) {
    const double z = 0.1 + 0.01 * i;
    const Vec zv = Vec::Constant(1, z);
    const ExtReal d = engine.rate(zv, Route::DualSup).value;
    const ExtReal c = engine.rate(zv, Route::InfConv).value;
    *csv << num(z) << ',' << num(d) << ',' << num(c) << '\n';
    zs.push_back(z);
    vs.push_back(d.to_double());
  }
  // Kink: start of the trailing linear piece.
  std::size_t kink = vs.size() - 2;
  while (kink > 1 && std::abs(vs[kink + 1] - 2 * vs[kink] + vs[kink - 1]) <= 1e-9) --kink;
  if (cfg.json_path) emit_json(cfg, {{"kink", zs[kink]}, {"slope_after_kink", 1.0 / 6.0}}, out);
  return kExitOk;
}

json subsequence_rates(const Scenario& sc, long parity) {
  WeightArraySpec frozen = sc.spec;
  for (auto& t : frozen.tracks) t = OutlierTrack{t.name, {t.limit(parity)}};
  const RateEngine eng(Scenario(sc.law, frozen, sc.f, sc.horizon));
  json j{{"domain", jdomain(eng.domain())}};
  json r = json::object();
  for (double z : {0.5, 1.0, 2.0}) r[num(z)] = jnum(eng.partial_mean_rate(Vec::Constant(1, z)));
  j["partial_mean_rate"] = r;
  return j;
}

int example_example(const RunConfig& cfg, bool second, std::ostream& out) {
  const Scenario sc = second ? example2_scenario() : example1_scenario();
  const A4Check a4 = check_a4(limit_sets(sc.spec, sc.f, sc.horizon), *sc.law);
  json j{{"a4_holds", a4.holds}};
  j["witness"] = a4.witness ? jvec(*a4.witness) : json(nullptr);
  j["even"] = subsequence_rates(sc, 0);
  j["odd"] = subsequence_rates(sc, 1);
  if (a4.holds) {
    const RateEngine eng(sc);
    j["domain"] = jdomain(eng.domain());
    json r = json::object();
    for (double z : {0.5, 1.0, 2.0}) r[num(z)] = jnum(eng.partial_mean_rate(Vec::Constant(1, z)));
    j["partial_mean_rate"] = r;
  }
  emit_json(cfg, j, out);
  return kExitOk;
}

int example_gauss2d(const RunConfig& cfg, std::ostream& out) {
  const Gauss2D g(cfg.gauss2d ? *cfg.gauss2d : Gauss2DParams::standard());
  const auto& p = g.params();
  {
    Sink csv(cfg.csv_path, out);
    write_region_map(*csv, g.region_map(cfg.map.x_lo, cfg.map.x_hi, cfg.map.nx, cfg.map.y_lo, cfg.map.y_hi, cfg.map.ny));
  }
  json j{{"m", p.m()},           {"M", p.M()},           {"x_min", p.x_min()},
         {"x_max", p.x_max()},   {"H_min", p.H_min()},   {"H_max", p.H_max()},
         {"alpha_min", p.alpha_min()}, {"alpha_max", p.alpha_max()}};
  j["I_f(1,-2)"] = jnum(g.rate_closed_form(1.0, -2.0).value);
  j["I_f(1,0)"] = jnum(g.rate_closed_form(1.0, 0.0).value);
  if (cfg.json_path) emit_json(cfg, j, out);
  return kExitOk;
}

json jfeasibility(const FeasibilityResult& r) {
  json j{{"feasible", r.feasible}};
  if (r.witness) {
    const auto& w = *r.witness;
    j["witness"] = {{"x0", w.x0}, {"y0", w.y0}, {"r0", w.r0}, {"x1", w.x1},     {"y1", w.y1},
                    {"x2", w.x2}, {"y2", w.y2}, {"eps1", w.eps1}, {"eps2", w.eps2}};
  } else {
    j["witness"] = nullptr;
  }
  if (!r.reason.empty()) j["infeasibility_reason"] = r.reason;
  return j;
}

int example_nonconvex(const RunConfig& cfg, std::optional<double> k1, std::optional<double> k2, std::ostream& out) {
  NonConvexScenario base = cfg.nonconvex ? *cfg.nonconvex : NonConvexScenario{};
  if (k1) base.kappa1 = *k1;
  if (k2) base.kappa2 = *k2;
  NonConvexScenario s2 = base, s1 = base;
  s2.T = 2;
  s1.T = 1;
  s2.validate();
  const Vec z = probe_point(base.kappa2);
  const NonConvexRate r2 = rate_nonconvex(s2, z);
  const NonConvexRate r1 = rate_nonconvex(s1, z);
  auto verdict = [](const NonConvexRate& r) { return r.value.is_finite() ? "finite" : "infinite"; };
  {
    Sink csv(cfg.csv_path, out);
    *csv << "quantity,T,value,verdict\n";
    *csv << "I,2," << num(r2.value) << ',' << verdict(r2) << '\n';
    *csv << "I_bar,1," << num(r1.value) << ',' << verdict(r1) << '\n';
  }
  json j{{"k1", base.kappa1}, {"k2", base.kappa2}, {"z_star", jvec(z)}};
  j["system_I"] = jfeasibility(solve_system_I(base.kappa1, base.kappa2));
  j["system_barI"] = jfeasibility(solve_system_barI(base.kappa1, base.kappa2));
  j["rate_T2"] = jnum(r2.value);
  j["rate_T1"] = jnum(r1.value);
  if (!r1.reason.empty()) j["rate_T1_reason"] = r1.reason;
  j["verdict"] = {{"I", verdict(r2)}, {"I_bar", verdict(r1)}};
  emit_json(cfg, j, out);
  return kExitOk;
}

int cmd_mc(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Scenario& sc = need_scenario(cfg);
  if (!cfg.mc) throw ConfigError("mc verify needs an mc section");
  const McSpec& m = *cfg.mc;
  MCPlan plan(sc, m.z);
  plan.delta = m.delta;
  plan.n_list = m.n_list;
  plan.trials = m.trials;
  plan.tilt = m.tilt;
  plan.seed = cfg.seed;
  plan.event = m.event;
  plan.tolerance = m.tolerance;
  plan.abs_tolerance = m.abs_tolerance;
  plan.computed_rate = m.computed_rate;
  const DecayEstimate est = estimate_decay(plan);
  {
    Sink csv(cfg.csv_path, out);
    *csv << "n,tilt,hits,p_hat,log_p,log_p_se,decay,decay_half_width,censored\n";
    for (const auto& p : est.points)
      *csv << p.n << ',' << join(p.tilt) << ',' << p.hits << ',' << num(p.p_hat) << ',' << num(p.log_p) << ','
           << num(p.log_p_se) << ',' << num(p.decay) << ',' << num(p.decay_half_width) << ','
           << (p.censored ? 1 : 0) << '\n';
  }
  json j{{"computed_rate", jnum(est.computed_rate)}, {"pass", est.agrees && !est.inconclusive}};
  j["estimated_rate"] = est.inconclusive ? json(nullptr) : jnum(est.slope);
  j["estimated_rate_half_width"] = est.inconclusive ? json(nullptr) : jnum(est.slope_half_width);
  j["relative_error"] = est.inconclusive ? json(nullptr) : jnum(est.relative_error);
  j["inconclusive"] = est.inconclusive;
  j["warnings"] = est.warnings;
  emit_json(cfg, j, out);
  for (const auto& w : est.warnings) err << "warning: " << w << '\n';
  if (est.inconclusive) return kExitInconclusive;
  return est.agrees ? kExitOk : kExitMcFail;
}

int cmd_spherical(const RunConfig& cfg, const std::vector<double>& thetas, std::ostream& out) {
  const Gauss2D g(cfg.gauss2d ? *cfg.gauss2d : Gauss2DParams::standard());
  json rows = json::array();
  for (double t : thetas) rows.push_back({{"theta", t}, {"value", jnum(g.spherical_rank_one(t))}});
  emit_json(cfg, {{"spherical_rank1", rows}}, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rate functions of weighted empirical means", "ldrate"};
  app.require_subcommand(1);
  std::string config_path;
  auto add_config = [&](CLI::App* a, bool required) {
    auto* o = a->add_option("--config", config_path, "YAML run configuration");
    if (required) o->required();
  };

  auto* rate = app.add_subcommand("rate", "Evaluate the rate function");
  rate->require_subcommand(1);
  auto* rate_eval = rate->add_subcommand("eval", "At the configured points");
  auto* rate_grid = rate->add_subcommand("grid", "On the configured grid");
  add_config(rate_eval, true);
  add_config(rate_grid, true);

  auto* domains = app.add_subcommand("domains", "Limit domain checks");
  domains->require_subcommand(1);
  auto* a4 = domains->add_subcommand("check-a4", "Compare inner and outer limit domains");
  add_config(a4, true);

  auto* example = app.add_subcommand("example", "Worked examples");
  example->require_subcommand(1);
  std::optional<double> k1, k2;
  std::vector<CLI::App*> ex;
  const std::pair<const char*, const char*> examples[] = {
      {"gauss2d", "Two-dimensional Gaussian example"},
      {"nonconvex", "Second-eigenvalue feasibility systems and rates"},
      {"figure1", "Scalar chi-square rate with an outlier at 3"},
      {"example1", "Alternating outlier, A4 fails"},
      {"example2", "Alternating outlier inside the domain, A4 holds"}};
  for (const auto& [name, desc] : examples) {
    auto* e = example->add_subcommand(name, desc);
    add_config(e, false);
    ex.push_back(e);
  }
  ex[1]->add_option("--k1", k1, "largest outlier");
  ex[1]->add_option("--k2", k2, "second outlier");

  auto* mc = app.add_subcommand("mc", "Monte Carlo checks");
  mc->require_subcommand(1);
  auto* mc_verify = mc->add_subcommand("verify", "Estimate the decay rate and compare");
  add_config(mc_verify, true);

  auto* sph = app.add_subcommand("spherical", "Spherical integral limits");
  sph->require_subcommand(1);
  auto* rank1 = sph->add_subcommand("rank1", "Rank-one limit for the two-dimensional example");
  std::vector<double> thetas;
  rank1->add_option("--theta", thetas, "theta values");
  add_config(rank1, false);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (*rate_eval) return cmd_rate(cfg, false, out);
    if (*rate_grid) return cmd_rate(cfg, true, out);
    if (*a4) return cmd_check_a4(cfg, out, err);
    if (*ex[0]) {
      if (!cfg.gauss2d) cfg.gauss2d = Gauss2DParams::standard();
      return example_gauss2d(cfg, out);
    }
    if (*ex[1]) return example_nonconvex(cfg, k1, k2, out);
    if (*ex[2]) return example_figure1(cfg, out);
    if (*ex[3]) return example_example(cfg, false, out);
    if (*ex[4]) return example_example(cfg, true, out);
    if (*mc_verify) return cmd_mc(cfg, out, err);
    if (*rank1) {
      if (!thetas.empty()) cfg.thetas = thetas;
      if (cfg.thetas.empty()) throw ConfigError("spherical rank1 needs --theta or spherical.thetas");
      return cmd_spherical(cfg, cfg.thetas, out);
    }
    err << "error: no command\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const A4FailureError& e) {
    err << "assumption failure: " << e.what() << "; witness " << join(e.witness()) << '\n';
    return kExitA4;
  } catch (const UnsupportedDomainError& e) {
    err << "unsupported: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "precondition failed: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace ldrate::cli
