#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "api.hpp"
#include "service.hpp"

namespace hybridctl::frontend {

namespace {

std::string fixed(double x, int digits = 4) {
  if (std::isnan(x)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

std::string csv_number(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) return v.get<std::string>();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v.get<double>());
  return buf;
}

struct Globals {
  std::uint64_t seed = kDefaultSeed;
  std::string format = "table";
  bool quiet = false;
};

struct ArmFlags {
  std::optional<int> nt, nc, nh;
  std::optional<double> mt, mc, mh, st, sc, sh;
};

struct MethodFlags {
  std::string method;
  std::optional<double> a, beta0, beta1, alpha_h1, alpha_h2, delta;

  json params() const {
    json p = json::object();
    if (a) p["a"] = *a;
    if (beta0) p["beta0"] = *beta0;
    if (beta1) p["beta1"] = *beta1;
    if (alpha_h1) p["alpha_h1"] = *alpha_h1;
    if (alpha_h2) p["alpha_h2"] = *alpha_h2;
    if (delta) p["delta"] = *delta;
    return p;
  }
};

void add_method_flags(CLI::App* cmd, MethodFlags& m, bool required) {
  auto* opt = cmd->add_option("--method", m.method,
                              "fixed, db-t, db-l, db-l1, db-l2, ttp, ttp1, ttp2, eq, eq1, eq2");
  if (required) opt->required();
  cmd->add_option("--a", m.a, "fixed borrowing weight in [0, 1]");
  cmd->add_option("--beta0", m.beta0, "logistic intercept (db-l)");
  cmd->add_option("--beta1", m.beta1, "logistic slope (db-l)");
  cmd->add_option("--alpha-h1", m.alpha_h1, "TTP pooling test level");
  cmd->add_option("--alpha-h2", m.alpha_h2, "EQ pooling test level");
  cmd->add_option("--delta", m.delta, "EQ equivalence margin");
}

void print_outcome_table(const json& r, std::ostream& out) {
  const json& o = r["outcome"];
  const auto row = [&](const std::string& k, const std::string& v) {
    out << pad(k, 18) << v << "\n";
  };
  row("method", r["method"].get<std::string>());
  std::string ref = r["reference"].get<std::string>();
  if (r.contains("b_reps")) {
    ref += " (B = " + std::to_string(r["b_reps"].get<int>()) +
           ", seed = " + std::to_string(r["seed"].get<std::uint64_t>()) + ")";
  }
  row("reference", ref);
  row("sidedness", r["sidedness"].get<std::string>() + ", alpha = " +
                       csv_number(r["alpha"]));
  row("T1", fixed(o["t1"].get<double>()));
  row("borrowing weight", fixed(o["weight"].get<double>()));
  if (!o["pooled"].is_null()) row("pooled", o["pooled"].get<bool>() ? "yes" : "no");
  row("statistic", fixed(o["statistic"].get<double>()));
  row("critical value", fixed(o["critical_value"].get<double>()));
  row("p-value", fixed(o["p_value"].get<double>()));
  row("alpha used", fixed(o["alpha_used"].get<double>(), 6));
  row("decision", o["reject"].get<bool>() ? "reject H0" : "do not reject H0");
}

const char* kOutcomeCsvHeader =
    "method,reference,sidedness,alpha,seed,b_reps,t1,weight,pooled,statistic,critical_value,"
    "p_value,alpha_used,reject";

void print_outcome_csv_row(const json& r, std::ostream& out) {
  const json& o = r["outcome"];
  out << csv_number(r["method"]) << ',' << csv_number(r["reference"]) << ','
      << csv_number(r["sidedness"]) << ',' << csv_number(r["alpha"]) << ','
      << (r.contains("seed") ? std::to_string(r["seed"].get<std::uint64_t>()) : "") << ','
      << (r.contains("b_reps") ? csv_number(r["b_reps"]) : "") << ',' << csv_number(o["t1"])
      << ',' << csv_number(o["weight"]) << ',' << csv_number(o["pooled"]) << ','
      << csv_number(o["statistic"]) << ',' << csv_number(o["critical_value"]) << ','
      << csv_number(o["p_value"]) << ',' << csv_number(o["alpha_used"]) << ','
      << csv_number(o["reject"]) << "\n";
}

void write_outcome(const json& r, const Globals& g, std::ostream& out) {
  if (g.format == "json") {
    out << r.dump(2) << "\n";
  } else if (g.format == "csv") {
    out << kOutcomeCsvHeader << "\n";
    print_outcome_csv_row(r, out);
  } else {
    print_outcome_table(r, out);
  }
}

void write_case_study(const json& r, const Globals& g, std::ostream& out) {
  if (g.format == "json") {
    out << r.dump(2) << "\n";
    return;
  }
  const json& methods = r["methods"];
  if (g.format == "csv") {
    out << "method,weight,statistic,critical_value,p_value,reject\n";
    const auto line = [&](const json& m) {
      const json& o = m["outcome"];
      out << csv_number(m["method"]) << ',' << csv_number(o["weight"]) << ','
          << csv_number(o["statistic"]) << ',' << csv_number(o["critical_value"]) << ','
          << csv_number(o["p_value"]) << ',' << csv_number(o["reject"]) << "\n";
    };
    for (const auto& m : methods) line(m);
    line(r["no_borrowing"]);
    return;
  }
  const json& d = r["data"];
  const auto arm = [&](const char* name, const json& s) {
    out << pad(name, 12) << "n = " << s["n"].get<int>() << ", mean = " << s["mean"].get<double>()
        << ", sd = " << s["sd"].get<double>() << "\n";
  };
  arm("treatment", d["treatment"]);
  arm("control", d["control"]);
  arm("historical", d["historical"]);
  out << "\n" << pad("", 18);
  for (const auto& m : methods) out << pad(m["method"].get<std::string>(), 10);
  out << "\n";
  const auto row = [&](const char* label, const char* key) {
    out << pad(label, 18);
    for (const auto& m : methods) out << pad(fixed(m["outcome"][key].get<double>()), 10);
    out << "\n";
  };
  row("Borrowing level", "weight");
  row("Statistic", "statistic");
  row("Critical value", "critical_value");
  row("p-value", "p_value");
  const json& nb = r["no_borrowing"]["outcome"];
  out << "\nNo borrowing (a = 0): statistic " << fixed(nb["statistic"].get<double>())
      << ", normal p = " << fixed(nb["p_value"].get<double>()) << "\n";
  out << "one-sided lower, alpha = " << csv_number(r["alpha"]) << ", B = "
      << r["b_reps"].get<int>() << ", seed = " << r["seed"].get<std::uint64_t>() << "\n";
}

void write_simulation_table(const hctl_results* results, std::ostream& out) {
  out << pad("scenario", 10) << pad("method", 14) << pad("rate", 10) << pad("mc_se", 10)
      << pad("weight", 10) << "alpha*\n";
  const std::size_t n = hctl_results_row_count(results);
  for (std::size_t i = 0; i < n; ++i) {
    hctl_result_row row{};
    check(hctl_results_row(results, i, &row));
    out << pad(std::to_string(row.scenario), 10) << pad(row.method, 14)
        << pad(fixed(100.0 * row.rejection_rate, 2) + "%", 10)
        << pad(fixed(100.0 * row.mc_se, 2) + "%", 10) << pad(fixed(row.mean_weight, 3), 10)
        << (std::isnan(row.alpha_star) ? std::string("-") : fixed(row.alpha_star, 6)) << "\n";
  }
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid control arm analysis: dynamic borrowing tests, alpha adjustment and "
               "simulation.",
               "hybridctl"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "random seed for bootstrap and simulation")
      ->capture_default_str();
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"table", "json", "csv"}))
      ->capture_default_str();
  app.add_flag("--quiet,-q", g.quiet, "suppress progress and summary output");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "test one dataset with a borrowing method");
  ArmFlags arms;
  MethodFlags am;
  double a_alpha = 0.05;
  std::string a_side;
  int a_b = 10000;
  int a_workers = 0;
  std::string a_data, a_reference;
  bool a_case = false;
  std::optional<double> a_mu_diff;
  add_method_flags(analyze, am, true);
  analyze->add_option("--nt", arms.nt, "treatment size");
  analyze->add_option("--mt", arms.mt, "treatment mean");
  analyze->add_option("--st", arms.st, "treatment sd");
  analyze->add_option("--nc", arms.nc, "current control size");
  analyze->add_option("--mc", arms.mc, "current control mean");
  analyze->add_option("--sc", arms.sc, "current control sd");
  analyze->add_option("--nh", arms.nh, "historical control size");
  analyze->add_option("--mh", arms.mh, "historical control mean");
  analyze->add_option("--sh", arms.sh, "historical control sd");
  analyze->add_option("--data", a_data, "arm,value CSV with arms treatment/control/historical")
      ->check(CLI::ExistingFile);
  analyze->add_flag("--case-study", a_case, "use the built-in case-study data");
  analyze->add_option("--alpha", a_alpha, "test level (per side when one-sided)")
      ->capture_default_str();
  analyze->add_option("--one-sided", a_side, "lower or upper; two-sided when omitted")
      ->check(CLI::IsMember({"lower", "upper"}));
  analyze->add_option("--b", a_b, "bootstrap replicates")->capture_default_str();
  analyze->add_option("--workers", a_workers, "bootstrap threads (results do not depend on it)");
  analyze->add_option("--reference", a_reference, "normal or bootstrap (fixed weights only)")
      ->check(CLI::IsMember({"normal", "bootstrap"}));
  analyze->add_option("--mu-diff", a_mu_diff, "control drift assumed when calibrating TTP/EQ");

  // case-study
  auto* case_study = app.add_subcommand("case-study", "reanalyse the built-in case study");
  int cs_b = 10000;
  double cs_alpha = 0.05;
  case_study->add_option("--b", cs_b, "bootstrap replicates")->capture_default_str();
  case_study->add_option("--alpha", cs_alpha, "one-sided level")->capture_default_str();

  // adjust-alpha
  auto* adjust = app.add_subcommand("adjust-alpha", "nominal-level adjustment for TTP and EQ");
  MethodFlags jm;
  double j_alpha = 0.05;
  std::optional<int> j_scenario, j_nt, j_nc, j_nh;
  std::optional<double> j_var, j_st, j_sc, j_sh, j_mu_diff;
  add_method_flags(adjust, jm, true);
  adjust->add_option("--alpha", j_alpha, "two-sided nominal level")->capture_default_str();
  adjust->add_option("--scenario", j_scenario, "take sizes and variance from a scenario");
  adjust->add_option("--nt", j_nt, "treatment size");
  adjust->add_option("--nc", j_nc, "current control size");
  adjust->add_option("--nh", j_nh, "historical control size");
  adjust->add_option("--variance", j_var, "common variance of all arms");
  adjust->add_option("--st", j_st, "treatment sd");
  adjust->add_option("--sc", j_sc, "current control sd");
  adjust->add_option("--sh", j_sh, "historical control sd");
  adjust->add_option("--mu-diff", j_mu_diff, "control drift mu_c - mu_h");

  // weight-curve
  auto* curve = app.add_subcommand("weight-curve", "borrowing weight as a function of T1");
  MethodFlags cm;
  int w_nc = 50, w_nh = 50;
  double w_sc = std::sqrt(5.0), w_sh = std::sqrt(5.0);
  double w_from = -2.5, w_to = 2.5, w_step = 0.05;
  std::vector<double> w_points;
  add_method_flags(curve, cm, true);
  curve->add_option("--nc", w_nc, "current control size")->capture_default_str();
  curve->add_option("--nh", w_nh, "historical control size")->capture_default_str();
  curve->add_option("--sc", w_sc, "current control sd")->capture_default_str();
  curve->add_option("--sh", w_sh, "historical control sd")->capture_default_str();
  curve->add_option("--from", w_from, "grid start")->capture_default_str();
  curve->add_option("--to", w_to, "grid end")->capture_default_str();
  curve->add_option("--step", w_step, "grid step")->capture_default_str();
  curve->add_option("--t1", w_points, "explicit T1 values (replaces the grid)")->delimiter(',');

  // simulate
  auto* simulate = app.add_subcommand("simulate", "operating characteristics by simulation");
  std::string s_scenarios, s_methods, s_out, s_side = "upper";
  int s_nsims = 100000, s_b = 10000, s_workers = 0;
  double s_alpha = 0.025, s_delta = 1.5;
  std::optional<int> s_nt, s_nc, s_nh;
  std::optional<double> s_mt, s_mc, s_mh;
  double s_var = 5.0;
  simulate->add_option("--scenarios", s_scenarios, "scenario ids, e.g. 1-4,6");
  simulate->add_option("--methods", s_methods, "comma-separated presets (default: all seven)");
  simulate->add_option("--n-sims", s_nsims, "simulated trials per scenario")->capture_default_str();
  simulate->add_option("--b", s_b, "bootstrap replicates per trial")->capture_default_str();
  simulate->add_option("--alpha", s_alpha, "level per side")->capture_default_str();
  simulate->add_option("--side", s_side, "tested side")
      ->check(CLI::IsMember({"upper", "lower", "two-sided"}))
      ->capture_default_str();
  simulate->add_option("--delta", s_delta, "EQ margin for eq1/eq2")->capture_default_str();
  simulate->add_option("--workers", s_workers, "threads (results do not depend on it)");
  simulate->add_option("--out", s_out, "results file (.json for JSON, otherwise CSV)");
  simulate->add_option("--nt", s_nt, "custom scenario treatment size");
  simulate->add_option("--nc", s_nc, "custom scenario control size");
  simulate->add_option("--nh", s_nh, "custom scenario historical size");
  simulate->add_option("--mt", s_mt, "custom scenario treatment mean");
  simulate->add_option("--mc", s_mc, "custom scenario control mean");
  simulate->add_option("--mh", s_mh, "custom scenario historical mean");
  simulate->add_option("--variance", s_var, "custom scenario variance")->capture_default_str();

  // serve
  auto* serve = app.add_subcommand("serve", "run the HTTP/JSON service");
  ServiceOptions serve_opts = options_from_env();
  serve->add_option("--port", serve_opts.port, "listen port (HYBRIDCTL_PORT)")
      ->capture_default_str();
  serve->add_option("--bind", serve_opts.bind, "bind address (HYBRIDCTL_BIND)")
      ->capture_default_str();
  serve->add_option("--workers", serve_opts.workers, "worker hint (HYBRIDCTL_WORKERS)")
      ->capture_default_str();

  std::vector<std::string> argv_store{"hybridctl"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());

  const auto usage = [&](const std::string& message, const CLI::App* cmd) {
    err << "error: " << message << "\n\n" << cmd->help();
    return kExitUsage;
  };

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    const CLI::App* cmd = &app;
    for (auto* sub : {analyze, case_study, adjust, curve, simulate, serve}) {
      if (sub->parsed()) cmd = sub;
    }
    return usage(e.what(), cmd);
  }

  try {
    if (analyze->parsed()) {
      json req = {{"method", am.method},
                  {"params", am.params()},
                  {"alpha", a_alpha},
                  {"sidedness", a_side.empty() ? "two-sided" : a_side},
                  {"seed", g.seed},
                  {"bootstrap", {{"b_reps", a_b}}}};
      if (a_workers > 0) req["bootstrap"]["workers"] = a_workers;
      if (!a_reference.empty()) req["reference"] = a_reference;
      if (a_mu_diff) req["design"] = {{"mu_diff", *a_mu_diff}};
      if (a_case) {
        req["case_study"] = true;
      } else if (!a_data.empty()) {
        hctl_hybrid_data d{};
        check(hctl_summarize_csv(a_data.c_str(), &d));
        req["data"] = data_to_json(d);
      } else {
        if (!(arms.nt && arms.mt && arms.st && arms.nc && arms.mc && arms.sc && arms.nh &&
              arms.mh && arms.sh)) {
          return usage("give all of --nt --mt --st --nc --mc --sc --nh --mh --sh, or --data",
                       analyze);
        }
        req["data"] = {{"treatment", {{"n", *arms.nt}, {"mean", *arms.mt}, {"sd", *arms.st}}},
                       {"control", {{"n", *arms.nc}, {"mean", *arms.mc}, {"sd", *arms.sc}}},
                       {"historical", {{"n", *arms.nh}, {"mean", *arms.mh}, {"sd", *arms.sh}}}};
      }
      write_outcome(run_analyze(req), g, out);
    } else if (case_study->parsed()) {
      write_case_study(
          run_case_study({{"seed", g.seed}, {"b_reps", cs_b}, {"alpha", cs_alpha}}), g, out);
    } else if (adjust->parsed()) {
      json req = {{"method", jm.method}, {"params", jm.params()}, {"alpha", j_alpha}};
      json design = json::object();
      if (j_nt) design["n_t"] = *j_nt;
      if (j_nc) design["n_c"] = *j_nc;
      if (j_nh) design["n_h"] = *j_nh;
      if (j_var) design["variance"] = *j_var;
      if (j_st) design["sigma_t"] = *j_st;
      if (j_sc) design["sigma_c"] = *j_sc;
      if (j_sh) design["sigma_h"] = *j_sh;
      if (j_mu_diff) design["mu_diff"] = *j_mu_diff;
      if (j_scenario) req["scenario"] = *j_scenario;
      req["design"] = design;
      const json r = run_adjust_alpha(req);
      if (g.format == "json") {
        out << r.dump(2) << "\n";
      } else if (g.format == "csv") {
        out << "method,alpha,alpha_star,residual\n"
            << csv_number(r["method"]) << ',' << csv_number(r["alpha"]) << ','
            << csv_number(r["alpha_star"]) << ',' << csv_number(r["residual"]) << "\n";
      } else {
        char buf[64];
        out << pad("method", 12) << r["method"].get<std::string>() << "\n";
        out << pad("alpha", 12) << csv_number(r["alpha"]) << "\n";
        std::snprintf(buf, sizeof buf, "%.10f", r["alpha_star"].get<double>());
        out << pad("alpha*", 12) << buf << "\n";
        std::snprintf(buf, sizeof buf, "%.3e", r["residual"].get<double>());
        out << pad("residual", 12) << buf << "\n";
      }
    } else if (curve->parsed()) {
      json req = {{"method", cm.method}, {"params", cm.params()}, {"n_c", w_nc},
                  {"n_h", w_nh},         {"s_c", w_sc},           {"s_h", w_sh}};
      if (!w_points.empty()) {
        req["t1_grid"] = w_points;
      } else {
        req["t1_grid"] = {{"from", w_from}, {"to", w_to}, {"step", w_step}};
      }
      const json r = run_weight_curve(req);
      if (g.format == "json") {
        out << r.dump(2) << "\n";
      } else {
        const bool csv = g.format == "csv";
        out << (csv ? "t1,weight\n" : pad("t1", 10) + "weight\n");
        for (std::size_t i = 0; i < r["t1"].size(); ++i) {
          if (csv) {
            out << csv_number(r["t1"][i]) << ',' << csv_number(r["weight"][i]) << "\n";
          } else {
            out << pad(fixed(r["t1"][i].get<double>(), 3), 10)
                << fixed(r["weight"][i].get<double>(), 6) << "\n";
          }
        }
      }
    } else if (simulate->parsed()) {
      json req = {{"n_sims", s_nsims}, {"b_reps", s_b},       {"seed", g.seed},
                  {"alpha", s_alpha},  {"sidedness", s_side}, {"delta", s_delta}};
      if (s_workers > 0) req["workers"] = s_workers;
      if (!s_methods.empty()) req["methods"] = s_methods;
      if (!s_scenarios.empty()) req["scenarios"] = s_scenarios;
      const bool custom = s_nt || s_nc || s_nh || s_mt || s_mc || s_mh;
      if (custom) {
        if (!(s_nt && s_nc && s_nh && s_mt && s_mc && s_mh)) {
          return usage("a custom scenario needs --nt --nc --nh --mt --mc --mh", simulate);
        }
        req["custom_scenarios"] = json::array({{{"id", 0},
                                                {"n_t", *s_nt},
                                                {"n_c", *s_nc},
                                                {"n_h", *s_nh},
                                                {"mu_t", *s_mt},
                                                {"mu_c", *s_mc},
                                                {"mu_h", *s_mh},
                                                {"variance", s_var}}});
      }
      if (s_scenarios.empty() && !custom) {
        return usage("give --scenarios or a custom scenario", simulate);
      }
      int last_decile = -1;
      const bool show_progress = !g.quiet;
      const Progress progress = [&](std::int64_t done, std::int64_t total) {
        const int decile = total > 0 ? static_cast<int>(10 * done / total) : 10;
        if (show_progress && decile > last_decile) {
          err << "progress " << 10 * decile << "% (" << done << "/" << total << ")\n";
          last_decile = decile;
        }
        return true;
      };
      // Validate before the (possibly long) run so usage errors surface first.
      validate_simulate(req);
      const ResultsPtr results = run_simulate(req, progress);
      if (!s_out.empty()) {
        const hctl_format fmt = ends_with(s_out, ".json") ? HCTL_FORMAT_JSON : HCTL_FORMAT_CSV;
        std::ofstream file(s_out, std::ios::binary);
        file << export_results(results.get(), fmt);
        if (!file) {
          err << "error: cannot write " << s_out << "\n";
          return kExitFailure;
        }
      }
      if (g.format == "json") {
        out << export_results(results.get(), HCTL_FORMAT_JSON);
      } else if (g.format == "csv") {
        out << export_results(results.get(), HCTL_FORMAT_CSV);
      } else if (!(g.quiet && !s_out.empty())) {
        write_simulation_table(results.get(), out);
      }
    } else if (serve->parsed()) {
      return serve_until_signal(serve_opts, err) == 0 ? kExitOk : kExitFailure;
    }
  } catch (const ApiError& e) {
    err << "error (" << hctl_status_name(e.status()) << "): " << e.what() << "\n";
    if (e.status() == HCTL_E_USAGE || e.status() == HCTL_E_INVALID_ARGUMENT) return kExitUsage;
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace hybridctl::frontend
