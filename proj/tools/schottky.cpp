// schottky: numerical probes of the trisecant and K-P characterizations of
// Jacobians among principally polarized abelian varieties.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <schottky/divisor.hpp>
#include <schottky/kp.hpp>
#include <schottky/kummer.hpp>
#include <schottky/siegel.hpp>
#include <schottky/theta.hpp>
#include <schottky/trisecant.hpp>

using namespace schottky;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInput = 2, kEvaluation = 3, kNoConvergence = 4, kInsufficientRoots = 5 };

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotSymmetric:
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvalidInput:
    case ErrorCode::OrderExceeded:
    case ErrorCode::TooFewSamples:
      return kInput;
    case ErrorCode::NoConvergence:
      return kNoConvergence;
    case ErrorCode::InsufficientRoots:
      return kInsufficientRoots;
    default:
      return kEvaluation;
  }
}

struct Common {
  std::string matrix;
  double tol = 1e-14;
  std::uint64_t seed = 1;
  std::size_t starts = 0;
  std::size_t samples = 0;
  unsigned threads = 1;
  std::string json_out;
  int order = 3;
  double pass = 1e-7;
  double fail = 1e-3;
  bool timing = false;
};

CVector parse_cvector(const std::string& text, int g, const std::string& what) {
  std::vector<double> xs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      xs.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, what + ": '" + item + "' is not a number");
    }
  }
  if (static_cast<int>(xs.size()) != 2 * g)
    throw Error(ErrorCode::InvalidInput, what + " needs " + std::to_string(2 * g) + " comma-separated numbers (re,im pairs)");
  CVector v(g);
  for (int i = 0; i < g; ++i) v[i] = Complex(xs[2 * i], xs[2 * i + 1]);
  return v;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, "malformed JSON in '" + path + "': " + e.what());
  }
}

std::string verdict_of(double r, double pass, double fail) {
  if (r <= pass) return "JACOBIAN-CONSISTENT";
  if (r >= fail) return "INCONSISTENT";
  return "INCONCLUSIVE";
}

/// Collects one probe's report. The human summary is rendered from the same
/// document, so both always agree.
class Report {
 public:
  Report(std::string command, const RiemannMatrix& tau, const Common& c) : common_(c) {
    doc_["command"] = std::move(command);
    doc_["tau_digest"] = tau_digest(tau);
    doc_["genus"] = tau.genus();
    doc_["thresholds"] = {{"pass", c.pass}, {"fail", c.fail}};
    doc_["warnings"] = json::array();
    doc_["notes"] = json::array();
    doc_["residuals"] = json::object();
    doc_["fitted"] = json::object();
    doc_["parameters"] = {{"tol", c.tol}, {"seed", c.seed}, {"threads", c.threads}};
    const auto blocks = is_exactly_block_decomposable(tau);
    if (blocks.decomposable)
      warn("tau is block diagonal (" + std::to_string(blocks.blocks.size()) +
           " blocks): the characterizations apply to indecomposable matrices only");
    if (tau.genus() == 1) note("genus 1: every matrix is a Jacobian and the Kummer map lands in P^1, so the probes are trivially satisfied");
  }

  void param(const std::string& k, json v) { doc_["parameters"][k] = std::move(v); }
  void residual(const std::string& k, double v) { doc_["residuals"][k] = v; }
  bool has(const std::string& k) const { return doc_["residuals"].contains(k); }
  void fitted(const std::string& k, json v) { doc_["fitted"][k] = std::move(v); }
  void section(const std::string& k, json v) { doc_[k] = std::move(v); }
  void warn(const std::string& s) { doc_["warnings"].push_back(s); }
  void note(const std::string& s) { doc_["notes"].push_back(s); }

  /// Verdict from the named residual, or the maximum of several.
  void decide(const std::vector<std::string>& keys) {
    double r = 0.0;
    for (const auto& k : keys) r = std::max(r, doc_["residuals"].at(k).get<double>());
    doc_["verdict_residuals"] = keys;
    doc_["verdict_value"] = r;
    doc_["verdict"] = verdict_of(r, common_.pass, common_.fail);
  }
  void inconclusive(const std::string& why) {
    doc_["verdict"] = "INCONCLUSIVE";
    note(why);
  }

  void finish(double seconds) {
    if (common_.timing) doc_["runtime_seconds"] = seconds;
    if (!common_.json_out.empty()) {
      const std::string text = doc_.dump(2) + "\n";
      if (common_.json_out == "-") {
        std::cout << text;
      } else {
        std::ofstream out(common_.json_out);
        if (!out) throw Error(ErrorCode::InvalidInput, "cannot write '" + common_.json_out + "'");
        out << text;
      }
    }
    std::ostream& os = common_.json_out == "-" ? std::cerr : std::cout;
    os << doc_["command"].get<std::string>() << "  tau " << doc_["tau_digest"].get<std::string>() << "  g="
       << doc_["genus"] << "\n";
    for (const auto& [k, v] : doc_["residuals"].items()) os << "  " << k << " = " << fmt(v.get<double>()) << "\n";
    for (const auto& w : doc_["warnings"]) os << "  warning: " << w.get<std::string>() << "\n";
    for (const auto& n : doc_["notes"]) os << "  note: " << n.get<std::string>() << "\n";
    os << "  verdict: " << doc_.value("verdict", std::string("INCONCLUSIVE"));
    if (doc_.contains("verdict_value")) os << " (" << fmt(doc_["verdict_value"].get<double>()) << ")";
    os << "\n  runtime: " << fmt(seconds) << " s\n";
  }

 private:
  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
  }
  json doc_;
  const Common& common_;
};

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

json points_json(const std::vector<DivisorPoint>& pts) {
  json out = json::array();
  for (const auto& p : pts) out.push_back({{"z", vector_json(p.z)}, {"condition", p.condition}});
  return out;
}

// Divisor-restricted identities of a degenerate configuration on Theta_u.
void tangency_identities(Report& rep, const DegenerateConfig& cfg, const FormalCurveData& data, const EvalPlan& plan,
                         const Common& c) {
  const int g = plan.genus();
  std::size_t both = 0;
  if (g >= 2) {
    both = find_intersection_points({cfg.u, -cfg.u}, plan, 8, c.seed, {.max_starts = 200}).size();
    rep.param("theta_u_cap_theta_minus_u_points", both);
  }
  const auto pts = find_intersection_points({cfg.u}, plan, 8, c.seed);
  if (pts.empty()) {
    rep.note("no points of Theta_u found; divisor identities skipped");
    return;
  }
  std::vector<double> r38, r39;
  std::vector<std::vector<double>> l310(data.order());
  for (const auto& p : pts) {
    const auto r = check_38_39(p.z, cfg, plan);
    r38.push_back(r.r38);
    r39.push_back(r.r39);
    for (int n = 1; n <= data.order(); ++n) l310[n - 1].push_back(check_lemma_310(p.z, data, cfg.u, cfg.v, plan, n));
  }
  rep.param("theta_u_points", pts.size());
  rep.section("divisor_points", points_json(pts));
  rep.residual("tangency_on_theta_u", max_of(r38));
  rep.residual("tangency_translated", max_of(r39));
  for (int n = 1; n <= data.order(); ++n) rep.residual("continuation_on_theta_u_order" + std::to_string(n), max_of(l310[n - 1]));
  if (g == 2 && both < 8)
    rep.note("Theta_u . Theta_-u has " + std::to_string(both) +
             " points on an abelian surface (Theta^2 = 2); identities are checked on sliced points of Theta_u");
}

// Identities of a trisecant triple: the translated section identity on Theta_a,
// P^c on Theta_a . Theta_b, and the duality of the two tangent directions.
void triple_identities(Report& rep, const TrisecantTriple& t, const EvalPlan& plan, const Common& c,
                       const std::vector<CVector>& samples) {
  const int g = plan.genus();
  const auto pa = find_intersection_points({t.a}, plan, 8, c.seed);
  if (!pa.empty()) {
    std::vector<double> r;
    for (const auto& p : pa) r.push_back(check_lemma_43(p.z, t, plan));
    rep.param("theta_a_points", pa.size());
    rep.residual("section_translate_on_theta_a", max_of(r));
  }
  if (g >= 2) {
    const auto pab = find_intersection_points({t.a, t.b}, plan, 8, c.seed, {.max_starts = 200});
    if (!pab.empty()) {
      std::vector<double> r;
      for (const auto& p : pab) r.push_back(check_pc_vanishing(p.z, t, plan));
      rep.param("theta_a_cap_theta_b_points", pab.size());
      rep.residual("pc_on_theta_a_cap_theta_b", max_of(r));
    }
  }
  try {
    const auto l49 = check_lemma_49_order1(t, plan, samples);
    rep.residual("direction_duality", l49.residual);
    rep.residual("duality_fit", l49.fit.residual);
    rep.residual("duality_fit_prime", l49.fit_prime.residual);
  } catch (const Error& e) {
    rep.note(std::string("direction duality fits unavailable: ") + e.what());
  }
}

std::vector<CVector> fit_samples(const RiemannMatrix& tau, const Common& c, std::size_t fallback, std::uint64_t salt = 0) {
  return sample_points(tau, c.samples ? c.samples : fallback, mix_seed(c.seed + salt));
}

// ---------------------------------------------------------------------------

int cmd_theta_eval(const Common& c, const std::string& z_text, const std::vector<std::string>& dirs_text) {
  const RiemannMatrix tau = read_matrix_file(c.matrix);
  const int g = tau.genus();
  const CVector z = parse_cvector(z_text, g, "--z");
  std::vector<Direction> dirs;
  for (const auto& d : dirs_text) dirs.push_back(parse_cvector(d, g, "--dir"));
  const int order = std::max(4, static_cast<int>(dirs.size()));
  const EvalPlan plan(tau, c.tol, order);
  const Complex v = theta_deriv(z, tau, dirs, plan);
  const json doc = {{"command", "theta-eval"},
                    {"tau_digest", tau_digest(tau)},
                    {"z", vector_json(z)},
                    {"order", dirs.size()},
                    {"value", complex_json(v)},
                    {"abs", std::abs(v)},
                    {"radius", plan.radius()},
                    {"lattice_points", plan.size()},
                    {"tol", c.tol}};
  if (c.json_out == "-") {
    std::cout << doc.dump(2) << "\n";
    return kOk;
  }
  if (!c.json_out.empty()) std::ofstream(c.json_out) << doc.dump(2) << "\n";
  std::printf("theta = %.16g %+.16gi\n|theta| = %.6e\nradius = %.6f (%zu lattice points)\n", v.real(), v.imag(),
              std::abs(v), plan.radius(), plan.size());
  return kOk;
}

int cmd_probe_kp(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const RiemannMatrix tau = read_matrix_file(c.matrix);
  const int g = tau.genus();
  if (g > 4) throw Error(ErrorCode::InvalidInput, "probe-kp supports g <= 4");
  Report rep("probe-kp", tau, c);
  const EvalPlan plan(tau, c.tol);
  KPFitOptions opts;
  opts.n_starts = c.starts ? c.starts : 16;
  opts.seed = c.seed;
  opts.threads = c.threads;
  opts.n_samples = c.samples ? c.samples : default_kp_samples(g);
  rep.param("starts", opts.n_starts);
  rep.param("samples", opts.n_samples);
  int code = kOk;
  try {
    const KPFit fit = kp_fit(tau, plan, opts);
    const KPObjective fresh(plan, fit_samples(tau, c, opts.n_samples, 0x5eed));
    rep.residual("kp_train", fit.residual);
    rep.residual("kp_fresh", fresh.normalized_residual(fit.data));
    rep.fitted("kp", to_json(fit.data, fit.residual, g, c.seed));
    rep.fitted("best_start", fit.best_start);
    rep.fitted("start_residuals", fit.start_residuals);
    const EvalPlan plan5(tau, c.tol, 5, true);
    const auto pts = find_intersection_points({CVector::Zero(g)}, plan, 8, c.seed);
    if (!pts.empty()) {
      std::vector<CVector> zs;
      for (const auto& p : pts) zs.push_back(p.z);
      rep.param("theta_points", pts.size());
      rep.residual("step1", step1_check(plan5, fit.data, zs).max_residual);
    } else {
      rep.note("no points of Theta found; step-1 check skipped");
    }
    rep.decide({"kp_train", "kp_fresh"});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoConvergence) throw;
    rep.inconclusive(e.what());
    code = kNoConvergence;
  }
  rep.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return code;
}

int cmd_probe_trisecant(const Common& c, const std::string& mode, const std::string& points) {
  const auto t0 = std::chrono::steady_clock::now();
  const RiemannMatrix tau = read_matrix_file(c.matrix);
  const int g = tau.genus();
  if (c.order < 1 || c.order > 3) throw Error(ErrorCode::OrderExceeded, "--order must be in [1, 3]");
  Report rep("probe-trisecant", tau, c);
  rep.param("mode", mode);
  const EvalPlan plan(tau, c.tol);
  const KummerMap km(tau, c.tol);
  int code = kOk;

  if (mode == "triple") {
    TrisecantTriple t;
    const auto samples = fit_samples(tau, c, 6u << g);
    if (!points.empty()) {
      t = triple_from_json(read_json_file(points), g);
      const SectionFit fit = section_collinearity_fit(t.a, t.b, t.c, plan, samples);
      t.coeffs = Eigen::Vector3cd(fit.alpha, fit.beta, fit.gamma);
      t.residual = fit.residual;
    } else if (g <= 2) {
      t = locate_trisecant_triple(tau, plan, km, c.seed, samples.size());
    } else {
      throw Error(ErrorCode::InvalidInput, "triple mode needs --points for g > 2");
    }
    rep.param("samples", samples.size());
    rep.residual("section_fit", t.residual);
    rep.residual("kummer_collinearity", collinearity_residual(t.a, t.b, t.c, km));
    rep.fitted("triple", to_json(t));
    triple_identities(rep, t, plan, c, fit_samples(tau, c, default_fit_samples(g), 1));
    rep.decide({"section_fit"});
  } else if (mode == "degenerate") {
    if (points.empty()) throw Error(ErrorCode::InvalidInput, "degenerate mode needs --points with u and v");
    const json j = read_json_file(points);
    for (const char* f : {"u", "v"})
      if (!j.contains(f)) throw Error(ErrorCode::InvalidInput, std::string("field '") + f + "' missing");
    const CVector u = vector_from_json(j["u"], "u", g), v = vector_from_json(j["v"], "v", g);
    const auto samples = fit_samples(tau, c, default_fit_samples(g));
    rep.param("samples", samples.size());
    const DegenerateFit fit = degenerate_linear_fit(u, v, plan, samples);
    if (fit.degenerate) rep.warn("fitted D1 vanishes: degenerate solution");
    const Continuation cont =
        continue_formal_curve(fit.cfg, c.order, plan, samples, {.check_precondition = false});
    std::vector<std::string> keys{"p1_fit"};
    rep.residual("p1_fit", fit.residual);
    for (std::size_t n = 1; n < cont.residuals.size(); ++n) {
      keys.push_back("continuation_order" + std::to_string(n + 1));
      rep.residual(keys.back(), cont.residuals[n]);
    }
    if (cont.diverged) rep.note("formal continuation diverged at order " + std::to_string(cont.residuals.size()));
    rep.fitted("config", to_json(fit.cfg, fit.residual, cont.residuals));
    tangency_identities(rep, fit.cfg, cont.data, plan, c);
    rep.decide(keys);
  } else if (mode == "search") {
    SearchOptions opts;
    opts.n_starts = c.starts ? c.starts : 32;
    opts.seed = c.seed;
    opts.threads = c.threads;
    opts.n_samples = c.samples;
    rep.param("starts", opts.n_starts);
    rep.param("samples", c.samples ? c.samples : default_fit_samples(g));
    const SearchResult r = run_degenerate_search(tau, plan, km, opts);
    std::size_t accepted = 0;
    for (const auto& s : r.starts) accepted += s.accepted;
    rep.param("accepted_starts", accepted);
    if (!r.converged) {
      rep.inconclusive("no accepted start reached tangency residual " + std::to_string(opts.stall_threshold));
      if (accepted) rep.residual("tangency", r.tangency);
      code = kNoConvergence;
    } else {
      rep.residual("tangency", r.tangency);
      rep.residual("p1_fit", r.best.residual);
      rep.residual("kummer_separation", r.separation);
      const auto fresh = fit_samples(tau, c, default_fit_samples(g), 1);
      const Continuation cont = continue_formal_curve(r.best.cfg, c.order, plan, fresh, {.check_precondition = false});
      std::vector<std::string> keys{"tangency"};
      rep.residual("p1_fresh", cont.residuals[0]);
      for (std::size_t n = 1; n < cont.residuals.size(); ++n) {
        keys.push_back("continuation_order" + std::to_string(n + 1));
        rep.residual(keys.back(), cont.residuals[n]);
      }
      if (cont.diverged) rep.note("formal continuation diverged at order " + std::to_string(cont.residuals.size()));
      rep.fitted("config", to_json(r.best.cfg, r.best.residual, cont.residuals));
      rep.fitted("best_start", r.best_start);
      tangency_identities(rep, r.best.cfg, cont.data, plan, c);
      rep.decide(keys);
    }
  } else {
    throw Error(ErrorCode::InvalidInput, "unknown mode '" + mode + "'");
  }
  rep.note("the codimension hypothesis on intersections of theta translates is not numerically decidable and is untested");
  rep.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return code;
}

int cmd_verify_identities(const Common& c, const std::string& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const RiemannMatrix tau = read_matrix_file(c.matrix);
  const int g = tau.genus();
  if (c.order < 1 || c.order > 3) throw Error(ErrorCode::OrderExceeded, "--order must be in [1, 3]");
  const json j = read_json_file(config);
  Report rep("verify-identities", tau, c);
  const EvalPlan plan(tau, c.tol);
  const auto samples = fit_samples(tau, c, default_fit_samples(g));
  std::vector<std::string> keys;
  if (j.contains("a")) {
    const TrisecantTriple t = triple_from_json(j, g);
    rep.param("kind", "triple");
    // the points must exist; fewer than requested is an error here
    newton_on_intersection({t.a}, plan, 8, c.seed);
    triple_identities(rep, t, plan, c, samples);
    for (const char* k : {"section_translate_on_theta_a", "pc_on_theta_a_cap_theta_b", "direction_duality"})
      if (rep.has(k)) keys.push_back(k);
  } else {
    const DegenerateConfig cfg = degenerate_config_from_json(j, g);
    rep.param("kind", "degenerate");
    if (cfg.D1.norm() <= 1e-6) rep.warn("D1 vanishes: degenerate configuration");
    if (torus_distance(cfg.u, cfg.v, tau) <= 1e-9 || torus_distance(cfg.u, -cfg.v, tau) <= 1e-9)
      rep.warn("v = +-u: trivial solution, identities cancel identically");
    newton_on_intersection({cfg.u}, plan, 8, c.seed);
    const Continuation cont = continue_formal_curve(cfg, c.order, plan, samples, {.check_precondition = false});
    rep.residual("p1_config", cont.residuals[0]);
    tangency_identities(rep, cfg, cont.data, plan, c);
    keys = {"tangency_on_theta_u", "tangency_translated"};
    for (int n = 1; n <= cont.data.order(); ++n) keys.push_back("continuation_on_theta_u_order" + std::to_string(n));
  }
  rep.decide(keys);
  rep.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return kOk;
}

int cmd_gen_matrix(int g, std::uint64_t seed, double delta, const std::string& out) {
  const RiemannMatrix tau = random_riemann_matrix(g, seed, delta);
  json doc = to_json(tau);
  doc["seed"] = seed;
  doc["delta"] = delta;
  const std::string text = doc.dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream f(out);
    if (!f) throw Error(ErrorCode::InvalidInput, "cannot write '" + out + "'");
    f << text;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical probes of the trisecant and K-P characterizations of Jacobians"};
  app.require_subcommand(1);
  Common c;
  auto common = [&](CLI::App* sub, bool fits) {
    sub->add_option("matrix", c.matrix, "Riemann matrix JSON file {g, re, im}")->required();
    sub->add_option("--tol", c.tol, "absolute truncation target of the theta sums")->check(CLI::PositiveNumber);
    sub->add_option("--json-out", c.json_out, "write the JSON report here ('-' for stdout)");
    if (!fits) return;
    sub->add_option("--seed", c.seed, "seed for samples, starts and slices");
    sub->add_option("--starts", c.starts, "multi-start count");
    sub->add_option("--samples", c.samples, "sample points per fit");
    sub->add_option("--threads", c.threads, "worker threads for multi-start")->check(CLI::PositiveNumber);
    sub->add_option("--order", c.order, "continuation order (<= 3)");
    sub->add_option("--pass", c.pass, "pass threshold");
    sub->add_option("--fail", c.fail, "fail threshold");
    sub->add_flag("--timing", c.timing, "include runtime in the JSON report");
  };

  std::string z_text;
  std::vector<std::string> dirs;
  auto* theta_cmd = app.add_subcommand("theta-eval", "evaluate theta or a directional derivative");
  common(theta_cmd, false);
  theta_cmd->add_option("--z", z_text, "point as re,im,re,im,...")->required();
  theta_cmd->add_option("--dir", dirs, "derivative direction as re,im,...; repeat for higher order");

  auto* kp_cmd = app.add_subcommand("probe-kp", "fit the K-P equation and check the step-1 identity on Theta");
  common(kp_cmd, true);

  std::string mode = "search", points;
  auto* tri_cmd = app.add_subcommand("probe-trisecant", "trisecant probes");
  common(tri_cmd, true);
  tri_cmd->add_option("--mode", mode, "triple | degenerate | search")
      ->check(CLI::IsMember({"triple", "degenerate", "search"}));
  tri_cmd->add_option("--points", points, "JSON with a, b, c (triple) or u, v (degenerate)");

  std::string config;
  auto* ver_cmd = app.add_subcommand("verify-identities", "divisor-restricted identities for a fitted configuration");
  common(ver_cmd, true);
  ver_cmd->add_option("config", config, "degenerate configuration or trisecant triple JSON")->required();

  int gen_g = 2;
  std::uint64_t gen_seed = 1;
  double gen_delta = 0.1;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen-matrix", "write a seeded random Riemann matrix");
  gen_cmd->add_option("--genus", gen_g, "genus")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen_seed, "seed");
  gen_cmd->add_option("--delta", gen_delta, "positive-definiteness margin")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--out", gen_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (*theta_cmd) return cmd_theta_eval(c, z_text, dirs);
    if (*kp_cmd) return cmd_probe_kp(c);
    if (*tri_cmd) return cmd_probe_trisecant(c, mode, points);
    if (*ver_cmd) return cmd_verify_identities(c, config);
    if (*gen_cmd) return cmd_gen_matrix(gen_g, gen_seed, gen_delta, gen_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kEvaluation;
  }
  return kInput;
}
