// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance             run everything
//   acceptance --only X    run a single criterion
//   acceptance --list      list criterion names

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include "hybridctl/borrowing.hpp"
#include "hybridctl/dataset.hpp"
#include "hybridctl/decision.hpp"
#include "hybridctl/inference.hpp"
#include "hybridctl/numerics.hpp"
#include "hybridctl/simlab.hpp"
#include "oracles.hpp"

using namespace hybridctl;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " MISS[" << what << "]";
    }
  }
};

std::string f(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

BootstrapConfig case_study_config() {
  BootstrapConfig c;
  c.b_reps = 10000;
  c.seed = 20240601;
  c.sidedness = Sidedness::kLower;
  c.alpha = 0.05;
  return c;
}

const WeightMethod kCaseMethods[] = {method::DbT{}, method::DbL{kDbL1}, method::DbL{kDbL2}};

void case_study_determinism(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  const HybridData data = case_study_data();
  const double want_stat[] = {-1.81, -1.85, -1.82};
  v.detail << "weights/statistics:";
  for (int k = 0; k < 3; ++k) {
    const double w = borrowing_weight(kCaseMethods[k], data);
    const double t = pooled_statistic(data, w);
    v.detail << " " << method_name(kCaseMethods[k]) << "=(" << f(w) << ", " << f(t) << ")";
    if (k == 0) {
      v.require(std::abs(w - 0.81) <= 0.005, "DB-T weight 0.81 +/- 0.005");
    } else {
      v.require(w >= 0.985, method_name(kCaseMethods[k]) + " weight >= 0.985");
    }
    v.require(std::abs(t - want_stat[k]) <= 0.01,
              method_name(kCaseMethods[k]) + " statistic " + f(want_stat[k], 2) + " +/- 0.01");
  }
  const double secs = seconds_since(t0);
  v.detail << " time=" << f(secs, 3) << "s";
  v.require(secs < 1.0, "runtime < 1 s");
}

void case_study_bootstrap(Verdict& v) {
  const HybridData data = case_study_data();
  const double want_p[] = {0.0408, 0.0378, 0.0364};
  const double want_crit[] = {-1.73, -1.72, -1.70};
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < 3; ++k) {
    const auto o = bootstrap_test(data, kCaseMethods[k], case_study_config());
    v.detail << " " << method_name(kCaseMethods[k]) << ": p=" << f(o.p_value)
             << " crit=" << f(o.critical_value);
    v.require(std::abs(o.p_value - want_p[k]) <= 0.010, method_name(kCaseMethods[k]) + " p");
    v.require(std::abs(o.critical_value - want_crit[k]) <= 0.03,
              method_name(kCaseMethods[k]) + " critical value");
  }
  const double secs = seconds_since(t0);
  v.detail << " time=" << f(secs, 2) << "s";
  v.require(secs < 10.0, "runtime < 10 s");
}

void no_borrow_baseline(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto o = normal_test(case_study_data(), 0.0, 0.05, Sidedness::kLower);
  const double secs = seconds_since(t0);
  v.detail << " statistic=" << f(o.statistic) << " p=" << f(o.p_value, 5)
           << " time=" << f(secs, 4) << "s";
  v.require(std::abs(o.p_value - 0.0947) <= 5e-4, "p 0.0947 +/- 5e-4");
  v.require(secs < 1.0, "runtime < 1 s");
}

void weight_anchors(Verdict& v) {
  const double q = numerics::t_quantile(0.95, 98);
  const double at = weight_t(q, 98);
  const double l0 = weight_logistic(0.0, kDbL1);
  const double l196 = weight_logistic(1.96, kDbL1);
  const double t196 = weight_t(1.96, 50 + 50 - 2);
  v.detail << " A_t(t95,98)=" << f(at) << " A_l1(0)=" << f(l0) << " A_l1(1.96)=" << f(l196)
           << " DB-T(1.96; n=50/50)=" << f(t196);
  v.require(std::abs(at - 0.25) <= 0.005, "A_t at t_0.95,98");
  v.require(std::abs(l0 - 0.9994) <= 1e-4, "A_l1(0)");
  v.require(std::abs(l196 - 0.20) <= 0.01, "A_l1(1.96)");
  v.require(std::abs(t196 - 0.14) <= 0.01, "DB-T at 1.96");
}

void eq_boundaries(Verdict& v) {
  const double sd = std::sqrt(5.0);
  const EqConfig cfg{1.5, 0.05};
  const double b50 = eq_pool_bound({50, 0, sd}, {50, 0, sd}, cfg);
  const double b100 = eq_pool_bound({100, 0, sd}, {100, 0, sd}, cfg);
  v.detail << " n=50: +/-" << f(b50) << " n=100: +/-" << f(b100);
  v.require(std::abs(b50 - 1.71) <= 0.01, "n = 50 endpoint 1.71");
  v.require(std::abs(b100 - 3.10) <= 0.01, "n = 100 endpoint 3.10");
}

void alpha_oracle(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  const DesignParams design = scenario_by_id(2).design();
  struct Case {
    const char* label;
    oracle::PoolRule rule;
  };
  const Case cases[] = {{"TTP1", {false, 0.05, 1.5}},
                        {"TTP2", {false, 0.10, 1.5}},
                        {"EQ1", {true, 0.05, 1.5}},
                        {"EQ2", {true, 0.10, 1.5}}};
  std::uint64_t seed = 2024;
  for (const auto& c : cases) {
    const double a_star =
        c.rule.equivalence
            ? adjusted_alpha_eq(design, 0.05, {c.rule.delta, c.rule.alpha_h}).alpha_star
            : adjusted_alpha_ttp(design, 0.05, c.rule.alpha_h).alpha_star;
    const auto mc = oracle::ttp_procedure_mc(design, a_star, c.rule, 1000000, seed++);
    v.detail << " " << c.label << ": a*=" << f(a_star, 6) << " rate=" << f(100 * mc.p, 3)
             << "%";
    v.require(std::abs(mc.p - 0.05) <= 0.0007, std::string(c.label) + " 5.0% +/- 0.07%");
  }
  const double secs = seconds_since(t0);
  v.detail << " time=" << f(secs, 1) << "s";
  v.require(secs < 120.0, "runtime < 2 min");
}

void trivial_alpha(Verdict& v) {
  const DesignParams design = DesignParams::with_variance(50, 50, 50, 5.0);
  const double ttp = adjusted_alpha_ttp(design, 0.05, 1.0 - 1e-9).alpha_star;
  const double eq = adjusted_alpha_eq(design, 0.05, {0.0001, 0.05}).alpha_star;
  v.detail << " TTP(alpha_h1 -> 1): " << f(ttp, 10) << " EQ(empty): " << f(eq, 10);
  v.require(std::abs(ttp - 0.05) <= 1e-6, "TTP identity");
  v.require(std::abs(eq - 0.05) <= 1e-6, "EQ identity");
}

SimConfig desk_config(int n_sims, int b) {
  SimConfig c;
  c.n_sims = n_sims;
  c.b_reps = b;
  c.seed = 20240601;
  c.alpha = 0.025;
  c.sidedness = Sidedness::kUpper;
  c.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return c;
}

void type1_error(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_scenario(scenario_by_id(2), desk_config(10000, 1000));
  for (const auto& m : r.methods) {
    const bool db = m.method.rfind("DB", 0) == 0;
    const double hi = db ? 0.031 : 0.034;
    v.detail << " " << m.method << "=" << f(100 * m.rejection_rate, 2) << "%";
    v.require(m.rejection_rate >= 0.020 && m.rejection_rate <= hi,
              m.method + " in [2.0%, " + f(100 * hi, 1) + "%]");
  }
  const double secs = seconds_since(t0);
  v.detail << " time=" << f(secs, 1) << "s";
  v.require(secs < 900.0, "runtime < 15 min");
}

void power_ranking(Verdict& v) {
  const auto r = run_scenario(scenario_by_id(6), desk_config(20000, 1000));
  const auto* l2 = r.find("DB-L2");
  v.detail << " DB-L2=" << f(100 * l2->rejection_rate, 2) << "%";
  for (const char* other : {"TTP1", "TTP2", "EQ1", "EQ2"}) {
    const auto* o = r.find(other);
    const double se = std::hypot(l2->mc_standard_error, o->mc_standard_error);
    v.detail << " " << other << "=" << f(100 * o->rejection_rate, 2) << "%";
    v.require(l2->rejection_rate >= o->rejection_rate - 2 * se,
              std::string("DB-L2 vs ") + other);
  }
}

void bvn_engine(Verdict& v) {
  using numerics::bvn_rect_prob;
  using numerics::BvnSpec;
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(-3, 3);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double m1 = u(gen), m2 = u(gen);
    const double v1 = 0.2 + std::abs(u(gen)), v2 = 0.2 + std::abs(u(gen));
    double a = u(gen), b = u(gen), c = u(gen), d = u(gen);
    if (a > b) std::swap(a, b);
    if (c > d) std::swap(c, d);
    const BvnSpec spec{m1, m2, v1, v2, 0.0};
    const double joint = bvn_rect_prob(spec, a, b, c, d);
    const double p1 = numerics::std_normal_cdf((b - m1) / std::sqrt(v1)) -
                      numerics::std_normal_cdf((a - m1) / std::sqrt(v1));
    const double p2 = numerics::std_normal_cdf((d - m2) / std::sqrt(v2)) -
                      numerics::std_normal_cdf((c - m2) / std::sqrt(v2));
    worst = std::max(worst, std::abs(joint - p1 * p2));
  }
  v.detail << " factorization max err=" << worst;
  v.require(worst <= 1e-12, "rho = 0 factorization 1e-12");

  const double orthant = bvn_rect_prob({0, 0, 1, 1, 0.5}, 0, numerics::kInf, 0, numerics::kInf);
  const double exact = 0.25 + std::asin(0.5) / (2 * std::numbers::pi);
  v.detail << " orthant err=" << std::abs(orthant - exact);
  v.require(std::abs(orthant - exact) <= 1e-4, "orthant at rho = 0.5");

  std::uniform_real_distribution<double> r(-0.95, 0.95);
  double worst_z = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double m1 = u(gen) / 3, m2 = u(gen) / 3;
    const double v1 = 0.3 + std::abs(u(gen)) / 2, v2 = 0.3 + std::abs(u(gen)) / 2;
    const double rho = r(gen);
    double a = u(gen) / 1.5, b = u(gen) / 1.5, c = u(gen) / 1.5, d = u(gen) / 1.5;
    if (a > b) std::swap(a, b);
    if (c > d) std::swap(c, d);
    if (i % 5 == 0) b = numerics::kInf;
    if (i % 7 == 0) c = -numerics::kInf;
    const double p = bvn_rect_prob({m1, m2, v1, v2, rho}, a, b, c, d);
    const auto mc = oracle::bvn_rect_mc(m1, m2, v1, v2, rho, a, b, c, d, 10000000, 900 + i);
    const double z = std::abs(p - mc.p) / std::max(mc.se, 1e-9);
    worst_z = std::max(worst_z, z);
    v.require(z <= 4.0, "rectangle " + std::to_string(i) + " within 4 MC SE");
  }
  v.detail << " 20 rectangles worst |z|=" << f(worst_z, 2);
}

void determinism(Verdict& v) {
  const HybridData data = case_study_data();
  auto cfg = case_study_config();
  cfg.b_reps = 4000;
  const auto base = bootstrap_test(data, method::DbL{kDbL2}, cfg);
  bool boot_same = true;
  for (int w : {1, 2, 3, 8}) {
    cfg.workers = w;
    const auto o = bootstrap_test(data, method::DbL{kDbL2}, cfg);
    boot_same = boot_same && o.p_value == base.p_value &&
                o.critical_value == base.critical_value && o.statistic == base.statistic;
  }
  v.require(boot_same, "bootstrap identical across runs and worker counts");

  auto sim = desk_config(1000, 200);
  sim.workers = 1;
  const auto a = run_scenario(scenario_by_id(10), sim);
  bool sim_same = true;
  for (int w : {1, 2, 5}) {
    sim.workers = w;
    const auto b = run_scenario(scenario_by_id(10), sim);
    for (std::size_t m = 0; m < a.methods.size(); ++m) {
      sim_same = sim_same && a.methods[m].rejections == b.methods[m].rejections &&
                 a.methods[m].mean_weight == b.methods[m].mean_weight;
    }
  }
  v.require(sim_same, "simulation identical across runs and worker counts");
  const std::vector<SimResult> one{a};
  sim.workers = 3;
  const std::vector<SimResult> two{run_scenario(scenario_by_id(10), sim)};
  v.require(export_results(one, ExportFormat::kCsv) == export_results(two, ExportFormat::kCsv),
            "CSV export byte-identical");
  v.detail << " bootstrap p=" << f(base.p_value) << " (workers 1,2,3,8)"
           << "; simulation rejections identical (workers 1,2,3,5)";
}

struct Criterion {
  const char* name;
  std::function<void(Verdict&)> run;
};

const std::vector<Criterion> kCriteria = {
    {"case_study_determinism", case_study_determinism},
    {"case_study_bootstrap", case_study_bootstrap},
    {"no_borrow_baseline", no_borrow_baseline},
    {"weight_anchors", weight_anchors},
    {"eq_boundaries", eq_boundaries},
    {"alpha_oracle", alpha_oracle},
    {"trivial_alpha", trivial_alpha},
    {"type1_error", type1_error},
    {"power_ranking", power_ranking},
    {"bvn_engine", bvn_engine},
    {"determinism", determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::string only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--list") {
      for (const auto& c : kCriteria) std::cout << c.name << "\n";
      return 0;
    }
    if (arg == "--only" && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--list] [--only NAME]\n";
      return 2;
    }
  }
  int failures = 0, ran = 0;
  for (const auto& c : kCriteria) {
    if (!only.empty() && only != c.name) continue;
    ++ran;
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " EXCEPTION " << e.what();
    }
    std::cout << (v.pass ? "PASS " : "FAIL ") << c.name << " |" << v.detail.str() << " ["
              << f(seconds_since(t0), 1) << "s]\n"
              << std::flush;
    if (!v.pass) ++failures;
  }
  if (ran == 0) {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
