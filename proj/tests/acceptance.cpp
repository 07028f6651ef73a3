// Acceptance run: one PASS/FAIL line per criterion, indented detail below it.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <schottky/divisor.hpp>
#include <schottky/kp.hpp>

#include "oracles.hpp"

using namespace schottky;

namespace {

class Criterion {
 public:
  Criterion(int id, std::string title, double budget_s)
      : id_(id), title_(std::move(title)), budget_(budget_s), start_(std::chrono::steady_clock::now()) {}

  void expect(bool ok, const std::string& what) {
    if (!ok) ok_ = false;
    lines_.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
  }

  void info(const std::string& what) { lines_.push_back("      " + what); }

  bool finish() {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.1f s (budget %.0f s)", s, budget_);
    expect(s < budget_, buf);
    std::printf("criterion %d: %s  %s\n", id_, ok_ ? "PASS" : "FAIL", title_.c_str());
    for (const auto& l : lines_) std::printf("    %s\n", l.c_str());
    std::fflush(stdout);
    return ok_;
  }

 private:
  int id_;
  std::string title_;
  double budget_;
  std::chrono::steady_clock::time_point start_;
  bool ok_ = true;
  std::vector<std::string> lines_;
};

std::string fmt(const char* f, double a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double rel(Complex a, Complex b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

bool theta_engine() {
  Criterion c(1, "theta engine", 60);
  double qp = 0.0, par = 0.0, fac = 0.0, qs = 0.0, der = 0.0;
  std::mt19937_64 rng(1);
  for (int g = 1; g <= 4; ++g) {
    const RiemannMatrix tau = random_riemann_matrix(g, 100 + g);
    const EvalPlan plan(tau);
    std::uniform_int_distribution<int> k(-2, 2);
    for (int t = 0; t < 10; ++t) {
      const CVector z = oracle::random_domain_point(tau, rng);
      CVector m(g), n(g);
      for (int j = 0; j < g; ++j) {
        m[j] = k(rng);
        n[j] = k(rng);
      }
      const Complex base = theta(z, tau, plan);
      const Complex pref = std::exp(-kI * kPi * Complex((n.transpose() * tau.tau() * n)(0, 0)) -
                                    2.0 * kPi * kI * Complex((n.transpose() * z)(0, 0)));
      const Complex shifted = theta(z + m + tau.tau() * n, tau, plan);
      qp = std::max(qp, std::abs(shifted - pref * base) / ((1.0 + std::abs(base)) * std::max(1.0, std::abs(pref))));
      par = std::max(par, rel(theta(-z, tau, plan), base));
    }
  }
  {
    const RiemannMatrix t1 = random_riemann_matrix(1, 5), t2 = random_riemann_matrix(2, 6);
    const RiemannMatrix t = block_diagonal(t1, t2);
    const EvalPlan p1(t1), p2(t2), p(t);
    for (int i = 0; i < 20; ++i) {
      const CVector z = oracle::random_domain_point(t, rng);
      fac = std::max(fac, rel(theta(z, t, p), theta(z.head(1), t1, p1) * theta(z.tail(2), t2, p2)));
    }
  }
  {
    const RiemannMatrix tau = validate(1, CMatrix::Constant(1, 1, kI));
    const EvalPlan plan(tau);
    for (int i = 0; i < 20; ++i) {
      const CVector z = oracle::random_domain_point(tau, rng);
      // sum_n q^{n^2} e^{2 pi i n z}
      Complex ref = 0.0;
      for (int n = -30; n <= 30; ++n) ref += std::exp(-kPi * n * n + 2.0 * kPi * kI * double(n) * z[0]);
      qs = std::max(qs, rel(theta(z, tau, plan), ref));
    }
  }
  for (int g = 2; g <= 3; ++g) {
    const RiemannMatrix tau = random_riemann_matrix(g, 14 + g);
    const EvalPlan plan(tau);
    auto f = [&](const CVector& w) { return theta(w, tau, plan); };
    for (int t = 0; t < 3; ++t) {
      const CVector z = oracle::random_domain_point(tau, rng);
      std::vector<CVector> dirs;
      for (int k = 0; k < 4; ++k) dirs.push_back(oracle::random_cvector(g, rng));
      for (int order = 1; order <= 4; ++order) {
        const std::vector<CVector> sub(dirs.begin(), dirs.begin() + order);
        const Complex an = theta_deriv(z, tau, sub, plan);
        der = std::max(der, std::abs(oracle::mixed_derivative(f, z, sub) - an) / std::abs(an));
      }
    }
  }
  c.expect(qp <= 1e-9, fmt("quasi-periodicity g=1..4: %.2e <= 1e-9", qp));
  c.expect(par <= 1e-9, fmt("parity g=1..4: %.2e <= 1e-9", par));
  c.expect(fac <= 1e-9, fmt("block factorization 1+2: %.2e <= 1e-9", fac));
  c.expect(qs <= 1e-9, fmt("q-series tau=i, 20 points: %.2e <= 1e-9", qs));
  c.expect(der <= 1e-5, fmt("derivatives orders 1-4 vs contour differences: %.2e <= 1e-5", der));
  return c.finish();
}

bool addition_formula() {
  Criterion c(2, "addition formula", 120);
  for (int g = 1; g <= 3; ++g) {
    const RiemannMatrix tau = random_riemann_matrix(g, 20 + g);
    const EvalPlan plan(tau);
    const KummerMap km(tau);
    std::mt19937_64 rng(g);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t)
      worst = std::max(worst, addition_formula_residual(oracle::random_domain_point(tau, rng),
                                                        oracle::random_domain_point(tau, rng), plan, km));
    c.expect(worst <= 1e-9, fmt("g=%.0f, 100 pairs: %.2e <= 1e-9", g, worst));
  }
  return c.finish();
}

bool collinearity() {
  Criterion c(3, "collinearity criterion", 120);
  const double tol = 1e-6;
  for (int g = 1; g <= 2; ++g) {
    int agree = 0, pass = 0;
    double kmin = 1e300, kmax = 0.0;
    for (int t = 0; t < 50; ++t) {
      const RiemannMatrix tau = random_riemann_matrix(g, 300 + 50 * g + t);
      const EvalPlan plan(tau);
      const KummerMap km(tau);
      const auto samples = sample_points(tau, 12u << g, t);
      std::mt19937_64 rng(1000 * g + t);
      const CVector a = oracle::random_domain_point(tau, rng);
      const CVector b = oracle::random_domain_point(tau, rng);
      const CVector cc = oracle::random_domain_point(tau, rng);
      const double kr = collinearity_residual(a, b, cc, km);
      const bool kp = kr <= tol;
      const bool sp = section_collinearity_fit(a, b, cc, plan, samples).residual <= 10 * tol;
      agree += kp == sp;
      pass += kp;
      kmin = std::min(kmin, kr);
      kmax = std::max(kmax, kr);
    }
    c.expect(agree == 50, fmt("g=%.0f concordance %.0f/50", g, agree));
    if (g == 1)
      c.expect(pass == 50, fmt("g=1 all pass: %.0f/50 (max %.2e)", pass, kmax));
    else
      c.expect(pass == 0, fmt("g=2 all fail: %.0f/50 pass (min %.2e)", pass, kmin));
  }
  return c.finish();
}

bool kp_separation() {
  Criterion c(4, "K-P probe separation", 1800);
  for (int g : {2, 3}) {
    for (std::uint64_t seed = 1; seed <= (g == 2 ? 5u : 3u); ++seed) {
      const RiemannMatrix tau = random_riemann_matrix(g, seed);
      const EvalPlan plan(tau);
      KPFitOptions opts;
      opts.seed = seed;
      const KPFit fit = kp_fit(tau, plan, opts);
      const KPObjective fresh(plan, sample_points(tau, default_kp_samples(g), mix_seed(seed + 0x5eed)));
      const double fr = fresh.normalized_residual(fit.data);
      c.expect(fit.residual <= 1e-7, fmt("g=%.0f seed %.0f", g, double(seed)) +
                                         fmt(": train %.2e <= 1e-7", fit.residual));
      c.expect(fr <= 10.0 * std::max(fit.residual, 1e-14),
               fmt("       fresh %.2e <= 10 x max(train, 1e-14)", fr));
    }
  }
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const RiemannMatrix tau = random_riemann_matrix(4, seed);
    const EvalPlan plan(tau);
    KPFitOptions opts;
    opts.seed = seed;
    const KPFit fit = kp_fit(tau, plan, opts);
    c.expect(fit.residual >= 1e-3, fmt("g=4 seed %.0f: best %.3e >= 1e-3", double(seed), fit.residual));
  }
  {
    const RiemannMatrix tau = random_riemann_matrix(3, 2);
    const EvalPlan plan(tau);
    std::mt19937_64 rng(2);
    const KPData kp{oracle::random_cvector(3, rng), oracle::random_cvector(3, rng), oracle::random_cvector(3, rng),
                    Complex(0.7, -0.2)};
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const CVector z = oracle::random_domain_point(tau, rng);
      const Complex base = kp_residual(z, plan, kp);
      for (Complex lambda : {Complex(0.5), Complex(2.0), Complex(1.0, 1.0)}) {
        const Complex want = std::pow(lambda, 4) * base;
        worst = std::max(worst, std::abs(kp_residual(z, plan, kp.regauged(lambda)) - want) / std::abs(want));
      }
    }
    c.expect(worst <= 1e-12, fmt("weight-4 gauge homogeneity: %.2e <= 1e-12", worst));
  }
  return c.finish();
}

struct FittedG2 {
  RiemannMatrix tau;
  DegenerateConfig cfg;
  Continuation cont;
};

bool degenerate_probe(std::vector<FittedG2>& fitted) {
  Criterion c(5, "degenerate trisecant probe", 1800);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const RiemannMatrix tau = random_riemann_matrix(2, seed);
    const EvalPlan plan(tau);
    SearchOptions opts;
    opts.seed = seed;
    const SearchResult r = degenerate_search(tau, opts);
    const std::string tag = fmt("g=2 seed %.0f", double(seed));
    c.expect(r.best.residual <= 1e-7, tag + fmt(": P1 residual %.2e <= 1e-7", r.best.residual));
    try {
      Continuation cont = extend_to_order(r.best.cfg, 3, plan, sample_points(tau, 6 * default_fit_samples(2), seed));
      c.expect(cont.residuals[1] <= 1e-5, fmt("       order 2 %.2e <= 1e-5", cont.residuals[1]));
      c.expect(cont.residuals[2] <= 1e-5, fmt("       order 3 %.2e <= 1e-5", cont.residuals[2]));
      fitted.push_back({tau, r.best.cfg, std::move(cont)});
    } catch (const Error& e) {
      c.expect(false, "       continuation: " + std::string(e.what()));
    }
  }
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const RiemannMatrix tau = random_riemann_matrix(4, seed);
    SearchOptions opts;
    opts.seed = seed;
    const SearchResult r = degenerate_search(tau, opts);
    c.expect(r.tangency >= 1e-3, fmt("g=4 seed %.0f: floor %.3e >= 1e-3", double(seed), r.tangency));
    c.info(fmt("raw P1 residual %.2e at Kummer separation %.3f", r.best.residual, r.separation));
  }
  return c.finish();
}

bool identity_suite(const std::vector<FittedG2>& fitted) {
  Criterion c(6, "divisor-restricted identities", 600);
  c.expect(fitted.size() == 3, fmt("fitted g=2 configurations: %.0f of 3", double(fitted.size())));
  for (std::size_t i = 0; i < fitted.size(); ++i) {
    const FittedG2& f = fitted[i];
    const EvalPlan plan(f.tau);
    const std::string tag = fmt("config %.0f", double(i + 1));
    std::size_t both = 0;
    try {
      both = find_intersection_points({f.cfg.u, -f.cfg.u}, plan, 8, 11, {.max_starts = 300}).size();
    } catch (const Error&) {
    }
    c.expect(both >= 8, tag + fmt(": points of Theta_u . Theta_-u: %.0f >= 8", double(both)));
    const auto pts = newton_on_intersection({f.cfg.u}, plan, 8, 4);
    DegenerateConfig neg = f.cfg;
    neg.D1 = -f.cfg.D1;
    FormalCurveData neg_data = f.cont.data;
    neg_data.dirs[0] = -neg_data.dirs[0];
    double r38 = 0.0, r39 = 0.0, l1 = 0.0, l2 = 0.0, bad = 0.0, bad_min = 1e300;
    for (const auto& p : pts) {
      const Residuals38 r = check_38_39(p.z, f.cfg, plan);
      r38 = std::max(r38, r.r38);
      r39 = std::max(r39, r.r39);
      l1 = std::max(l1, check_lemma_310(p.z, f.cont.data, f.cfg.u, f.cfg.v, plan, 1));
      l2 = std::max(l2, check_lemma_310(p.z, f.cont.data, f.cfg.u, f.cfg.v, plan, 2));
      const Residuals38 nb = check_38_39(p.z, neg, plan);
      const double worst = std::max({nb.r38, nb.r39, check_lemma_310(p.z, neg_data, f.cfg.u, f.cfg.v, plan, 2)});
      bad = std::max(bad, worst);
      bad_min = std::min(bad_min, worst);
    }
    c.info(fmt("identities on %.0f sliced points of Theta_u", double(pts.size())));
    c.expect(pts.size() >= 8 && std::max({r38, r39, l1, l2}) <= 1e-5,
             fmt("       tangency pair %.2e, ", std::max(r38, r39)) +
                 fmt("continuation orders 1-2 %.2e <= 1e-5", std::max(l1, l2)));
    c.expect(bad > 1e-2, fmt("       negated D1 control %.2e > 1e-2", bad));
    c.info(fmt("smallest pointwise control value %.2e", bad_min));

    const KummerMap km(f.tau);
    const TrisecantTriple t = locate_trisecant_triple(f.tau, plan, km, 2 + i);
    std::mt19937_64 rng(14 + i);
    TrisecantTriple wrong = t;
    wrong.c = oracle::random_domain_point(f.tau, rng);
    double l43 = 0.0, l43bad = 0.0, l43bad_min = 1e300;
    const auto pa = newton_on_intersection({t.a}, plan, 8, 3);
    for (const auto& p : pa) {
      l43 = std::max(l43, check_lemma_43(p.z, t, plan));
      const double w = check_lemma_43(p.z, wrong, plan);
      l43bad = std::max(l43bad, w);
      l43bad_min = std::min(l43bad_min, w);
    }
    const auto l49 = check_lemma_49_order1(t, plan, sample_points(f.tau, 120, 8));
    TrisecantTriple flipped = t;
    flipped.coeffs[1] = -t.coeffs[1];
    const double l49bad = check_lemma_49_order1(flipped, plan, sample_points(f.tau, 120, 8)).residual;
    c.expect(pa.size() >= 8 && l43 <= 1e-5, fmt("       located triple (residual %.1e): ", t.residual) +
                                                fmt("translated section %.2e <= 1e-5", l43));
    c.expect(l43bad > 1e-2, fmt("       random c control %.2e > 1e-2", l43bad));
    c.info(fmt("smallest pointwise control value %.2e", l43bad_min));
    c.expect(l49.residual <= 1e-5, fmt("       direction duality %.2e <= 1e-5", l49.residual));
    c.expect(l49bad > 1e-2, fmt("       flipped coefficient control %.2e > 1e-2", l49bad));
  }
  return c.finish();
}

bool step_one() {
  Criterion c(7, "step-1 identity", 300);
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    const RiemannMatrix tau = random_riemann_matrix(2, seed);
    const EvalPlan plan(tau);
    const EvalPlan plan5(tau, 1e-14, 5, true);
    KPFitOptions opts;
    opts.seed = seed;
    const KPFit fit = kp_fit(tau, plan, opts);
    std::vector<CVector> zs;
    for (const auto& p : newton_on_intersection({CVector::Zero(2)}, plan, 8, seed)) zs.push_back(p.z);
    const double r = step1_check(plan5, fit.data, zs).max_residual;
    c.expect(zs.size() >= 8 && r <= 1e-6,
             fmt("g=2 seed %.0f", double(seed)) + fmt(", %.0f points of Theta", double(zs.size())) +
                 fmt(": %.2e <= 1e-6", r));
  }
  return c.finish();
}

LeastSquaresProblem two_basin() {
  LeastSquaresProblem p;
  p.n_params = 1;
  p.residual = [](const RVector& x) {
    RVector r(2);
    r[0] = (x[0] * x[0] - 1.0) * (x[0] - 2.0);
    r[1] = 0.3 * (x[0] + 1.0) * (x[0] - 2.0) / (1.0 + x[0] * x[0]);
    return r;
  };
  return p;
}

bool solver_suite() {
  Criterion c(8, "solver unit suite", 10);
  {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n;
    RMatrix a(12, 4);
    RVector b(12);
    for (int i = 0; i < 12; ++i) {
      b[i] = n(rng);
      for (int j = 0; j < 4; ++j) a(i, j) = n(rng);
    }
    LeastSquaresProblem p;
    p.n_params = 4;
    p.residual = [&](const RVector& x) { return RVector(a * x + b); };
    const RVector exact = a.colPivHouseholderQr().solve(-b);
    const auto res = levenberg_marquardt(p, RVector::Zero(4));
    c.expect(res.iterations <= 3 && (res.x - exact).norm() <= 1e-6,
             fmt("LM on a linear problem: %.0f iterations, error %.1e", res.iterations, (res.x - exact).norm()));
    CMatrix ca(10, 3);
    CVector x0(3);
    std::normal_distribution<double> m;
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 3; ++j) ca(i, j) = Complex(m(rng), m(rng));
    x0 << Complex(1, 2), Complex(-0.5, 0), Complex(0, 3);
    const LinearLsqResult l = linear_lsq(ca, ca * x0);
    c.expect((l.x + x0).norm() <= 1e-12 && l.residual_ratio <= 1e-13,
             fmt("linear_lsq on consistent data: error %.1e, residual %.1e", (l.x + x0).norm(), l.residual_ratio));
  }
  {
    LeastSquaresProblem p;
    p.n_params = 2;
    p.residual = [](const RVector& x) {
      RVector r(2);
      r << 10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0];
      return r;
    };
    const auto res = levenberg_marquardt(p, (RVector(2) << -1.2, 1.0).finished());
    c.expect(res.final_norm <= 1e-8, fmt("Rosenbrock from (-1.2, 1): residual %.1e", res.final_norm));
  }
  {
    auto sampler = [](std::uint64_t s) {
      std::mt19937_64 rng(s);
      std::uniform_real_distribution<double> u(-3.0, 3.0);
      return RVector{{u(rng)}};
    };
    const auto ms = multi_start(two_basin, sampler, 8, 4);
    c.expect(ms.best.final_norm <= 1e-8 && std::abs(ms.best.x[0] - 2.0) <= 1e-6,
             fmt("two-basin multi-start: root %.8f, residual %.1e", ms.best.x[0], ms.best.final_norm));
    const auto again = multi_start(two_basin, sampler, 8, 4);
    const auto threaded = multi_start(two_basin, sampler, 8, 4, {}, 3);
    bool same = true;
    for (std::size_t i = 0; i < 8; ++i)
      same = same && ms.all[i]->x == again.all[i]->x && ms.all[i]->x == threaded.all[i]->x;
    c.expect(same, "determinism across runs and thread counts");
  }
  return c.finish();
}

}  // namespace

int main() {
  int failed = 0;
  failed += !theta_engine();
  failed += !addition_formula();
  failed += !collinearity();
  failed += !kp_separation();
  std::vector<FittedG2> fitted;
  failed += !degenerate_probe(fitted);
  failed += !identity_suite(fitted);
  failed += !step_one();
  failed += !solver_suite();
  std::printf("%d of 8 criteria failed\n", failed);
  return failed ? 1 : 0;
}
