#include "api.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <optional>
#include <sstream>

namespace hybridctl::frontend {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

const json& object_or_empty(const json& j, const char* key) {
  static const json empty = json::object();
  if (!j.contains(key) || j.at(key).is_null()) return empty;
  const json& v = j.at(key);
  if (!v.is_object()) usage_error(std::string("field '") + key + "' must be an object");
  return v;
}

std::optional<double> opt_number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const json& v = j.at(key);
  if (!v.is_number()) usage_error(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double number(const json& j, const char* key, std::optional<double> fallback = std::nullopt) {
  if (auto v = opt_number(j, key)) return *v;
  if (fallback) return *fallback;
  usage_error(std::string("missing field '") + key + "'");
}

std::int64_t integer(const json& j, const char* key, std::optional<std::int64_t> fallback = {}) {
  if (!j.contains(key) || j.at(key).is_null()) {
    if (fallback) return *fallback;
    usage_error(std::string("missing field '") + key + "'");
  }
  const json& v = j.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    usage_error(std::string("field '") + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

std::int32_t int32(const json& j, const char* key, std::optional<std::int64_t> fallback = {}) {
  const auto v = integer(j, key, fallback);
  if (v < std::numeric_limits<std::int32_t>::min() ||
      v > std::numeric_limits<std::int32_t>::max()) {
    usage_error(std::string("field '") + key + "' is out of range");
  }
  return static_cast<std::int32_t>(v);
}

std::uint64_t seed_of(const json& j) {
  if (!j.contains("seed") || j.at("seed").is_null()) return kDefaultSeed;
  const json& v = j.at("seed");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  usage_error("field 'seed' must be a non-negative integer");
}

std::string text(const json& j, const char* key, std::optional<std::string> fallback = {}) {
  if (!j.contains(key) || j.at(key).is_null()) {
    if (fallback) return *fallback;
    usage_error(std::string("missing field '") + key + "'");
  }
  if (!j.at(key).is_string()) usage_error(std::string("field '") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

hctl_summary summary_from_json(const json& j, const char* arm) {
  if (!j.is_object()) usage_error(std::string("arm '") + arm + "' must be an object");
  return {int32(j, "n"), number(j, "mean"), number(j, "sd")};
}

hctl_hybrid_data data_from_request(const json& req) {
  hctl_hybrid_data d{};
  const bool case_study = req.contains("case_study") && req.at("case_study").is_boolean() &&
                          req.at("case_study").get<bool>();
  if (case_study) {
    check(hctl_case_study_data(&d));
    return d;
  }
  if (!req.contains("data")) usage_error("missing field 'data'");
  const json& data = req.at("data");
  if (!data.is_object()) usage_error("field 'data' must be an object");
  for (const char* arm : {"treatment", "control", "historical"}) {
    if (!data.contains(arm)) usage_error(std::string("missing arm 'data.") + arm + "'");
  }
  d.treatment = summary_from_json(data.at("treatment"), "treatment");
  d.control = summary_from_json(data.at("control"), "control");
  d.historical = summary_from_json(data.at("historical"), "historical");
  return d;
}

/// Design fields default to `base` where given.
hctl_design design_from_json(const json& j, const std::optional<hctl_design>& base) {
  hctl_design d{};
  const auto fb_int = [&](std::int32_t hctl_design::*f) -> std::optional<std::int64_t> {
    if (base) return (*base).*f;
    return std::nullopt;
  };
  d.n_t = int32(j, "n_t", fb_int(&hctl_design::n_t));
  d.n_c = int32(j, "n_c", fb_int(&hctl_design::n_c));
  d.n_h = int32(j, "n_h", fb_int(&hctl_design::n_h));
  if (auto var = opt_number(j, "variance")) {
    if (!(*var > 0)) usage_error("field 'variance' must be positive");
    d.sigma_t = d.sigma_c = d.sigma_h = std::sqrt(*var);
  } else {
    const auto fb = [&](double hctl_design::*f) -> std::optional<double> {
      if (base) return (*base).*f;
      return std::nullopt;
    };
    d.sigma_t = number(j, "sigma_t", fb(&hctl_design::sigma_t));
    d.sigma_c = number(j, "sigma_c", fb(&hctl_design::sigma_c));
    d.sigma_h = number(j, "sigma_h", fb(&hctl_design::sigma_h));
  }
  d.mu_diff = number(j, "mu_diff", 0.0);
  return d;
}

hctl_design observed_design(const hctl_hybrid_data& d) {
  return {d.treatment.n, d.control.n, d.historical.n, d.treatment.sd, d.control.sd,
          d.historical.sd, 0.0};
}

bool is_ttp_eq(const hctl_method& m) {
  return m.kind == HCTL_METHOD_TTP || m.kind == HCTL_METHOD_EQ;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

MethodSpec method_from_value(const json& v, double delta) {
  if (v.is_string()) {
    json params = json::object();
    params["delta"] = delta;
    return parse_method(v.get<std::string>(), params);
  }
  if (!v.is_object()) usage_error("each method must be a name or an object");
  json params = object_or_empty(v, "params");
  if (!params.contains("delta")) params["delta"] = delta;
  MethodSpec spec = parse_method(text(v, "method"), params);
  if (v.contains("label")) spec.label = text(v, "label");
  return spec;
}

std::vector<hctl_scenario> scenarios_from_request(const json& req) {
  std::vector<hctl_scenario> out;
  if (req.contains("scenarios") && !req.at("scenarios").is_null()) {
    const json& s = req.at("scenarios");
    std::vector<int> ids;
    if (s.is_string()) {
      ids = parse_id_list(s.get<std::string>());
    } else if (s.is_array()) {
      for (const auto& id : s) {
        if (!id.is_number_integer()) usage_error("scenario ids must be integers");
        ids.push_back(id.get<int>());
      }
    } else {
      usage_error("field 'scenarios' must be an array or a range string");
    }
    for (int id : ids) {
      hctl_scenario sc{};
      check(hctl_scenario_get(id, &sc));
      out.push_back(sc);
    }
  }
  if (req.contains("custom_scenarios") && !req.at("custom_scenarios").is_null()) {
    const json& list = req.at("custom_scenarios");
    if (!list.is_array()) usage_error("field 'custom_scenarios' must be an array");
    for (const auto& c : list) {
      if (!c.is_object()) usage_error("custom scenarios must be objects");
      out.push_back({int32(c, "id", 0), int32(c, "n_t"), int32(c, "n_c"), int32(c, "n_h"),
                     number(c, "mu_t"), number(c, "mu_c"), number(c, "mu_h"),
                     number(c, "variance", 5.0)});
    }
  }
  if (out.empty()) usage_error("no scenarios selected");
  return out;
}

struct SimConfigDeleter {
  void operator()(hctl_sim_config* c) const { hctl_sim_config_destroy(c); }
};
using SimConfigPtr = std::unique_ptr<hctl_sim_config, SimConfigDeleter>;

SimConfigPtr config_from_request(const json& req) {
  hctl_sim_config* raw = nullptr;
  check(hctl_sim_config_create(&raw));
  SimConfigPtr cfg(raw);
  check(hctl_sim_config_set_n_sims(cfg.get(), int32(req, "n_sims", 100000)));
  check(hctl_sim_config_set_b_reps(cfg.get(), int32(req, "b_reps", 10000)));
  check(hctl_sim_config_set_seed(cfg.get(), seed_of(req)));
  check(hctl_sim_config_set_alpha(cfg.get(), number(req, "alpha", 0.025),
                                  parse_sidedness(text(req, "sidedness", "upper"))));
  check(hctl_sim_config_set_workers(cfg.get(), int32(req, "workers", default_workers())));
  const double delta = number(req, "delta", 1.5);
  std::vector<MethodSpec> methods;
  if (req.contains("methods") && !req.at("methods").is_null()) {
    const json& m = req.at("methods");
    if (m.is_string()) {
      std::stringstream in(m.get<std::string>());
      std::string item;
      while (std::getline(in, item, ',')) {
        if (!item.empty()) methods.push_back(method_from_value(json(item), delta));
      }
    } else if (m.is_array()) {
      for (const auto& v : m) methods.push_back(method_from_value(v, delta));
    } else {
      usage_error("field 'methods' must be an array or a comma-separated string");
    }
    if (methods.empty()) usage_error("no methods selected");
  } else {
    for (const char* label : {"DB-T", "DB-L1", "DB-L2", "TTP1", "TTP2", "EQ1", "EQ2"}) {
      methods.push_back(method_from_value(json(label), delta));
    }
  }
  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (lower(methods[i].label) == lower(methods[k].label)) {
        usage_error("duplicate method label '" + methods[i].label + "'");
      }
    }
  }
  check(hctl_sim_config_clear_methods(cfg.get()));
  for (const auto& m : methods) {
    check(hctl_sim_config_add_method(cfg.get(), m.label.c_str(), &m.method));
  }
  return cfg;
}

int progress_trampoline(std::int64_t done, std::int64_t total, void* user) {
  const auto* fn = static_cast<const Progress*>(user);
  return (*fn)(done, total) ? 0 : 1;
}

}  // namespace

void check(hctl_status s) {
  if (s != HCTL_OK) throw ApiError(s, hctl_last_error());
}

void usage_error(const std::string& message) { throw ApiError(HCTL_E_USAGE, message); }

bool is_request_error(hctl_status s) {
  return s == HCTL_E_INVALID_ARGUMENT || s == HCTL_E_USAGE || s == HCTL_E_IO;
}

json error_body(hctl_status s, const std::string& message) {
  return {{"schema_version", kSchemaVersion},
          {"error", {{"code", hctl_status_name(s)}, {"message", message}}}};
}

MethodSpec parse_method(const std::string& name, const json& params) {
  if (!params.is_object()) usage_error("method parameters must be an object");
  const std::string key = lower(name);
  const double delta = number(params, "delta", 1.5);
  MethodSpec spec{};
  hctl_method& m = spec.method;
  if (key == "db-l1" || key == "db-l2" || key == "ttp1" || key == "ttp2" || key == "eq1" ||
      key == "eq2" || key == "db-t") {
    check(hctl_method_preset(key.c_str(), delta, &m));
    spec.label = key == "db-t" ? "DB-T" : [&] {
      std::string up = key;
      std::transform(up.begin(), up.end(), up.begin(),
                     [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
      return up;
    }();
    return spec;
  }
  if (key == "fixed") {
    m.kind = HCTL_METHOD_FIXED;
    m.a = number(params, "a", 0.0);
    spec.label = "FIXED(a=" + fmt(m.a) + ")";
  } else if (key == "db-l") {
    m.kind = HCTL_METHOD_DB_L;
    if (params.contains("anchors")) {
      const json& a = params.at("anchors");
      if (!a.is_array() || a.size() != 2 || !a[0].is_array() || !a[1].is_array() ||
          a[0].size() != 2 || a[1].size() != 2) {
        usage_error("field 'anchors' must be [[t_a, w_a], [t_b, w_b]]");
      }
      std::int32_t monotone = 0;
      check(hctl_fit_logistic(a[0][0].get<double>(), a[0][1].get<double>(),
                              a[1][0].get<double>(), a[1][1].get<double>(), &m.beta0,
                              &m.beta1, &monotone));
      if (!monotone) usage_error("anchors give a weight that increases with |t1|");
    } else {
      m.beta0 = number(params, "beta0");
      m.beta1 = number(params, "beta1");
    }
    spec.label = "DB-L(" + fmt(m.beta0) + "," + fmt(m.beta1) + ")";
  } else if (key == "ttp") {
    m.kind = HCTL_METHOD_TTP;
    m.alpha_h = number(params, "alpha_h1", number(params, "alpha_h", 0.05));
    spec.label = "TTP(" + fmt(m.alpha_h) + ")";
  } else if (key == "eq") {
    m.kind = HCTL_METHOD_EQ;
    m.alpha_h = number(params, "alpha_h2", number(params, "alpha_h", 0.05));
    m.delta = delta;
    spec.label = "EQ(" + fmt(m.delta) + "," + fmt(m.alpha_h) + ")";
  } else {
    usage_error("unknown method '" + name +
                "' (fixed, db-t, db-l, db-l1, db-l2, ttp, ttp1, ttp2, eq, eq1, eq2)");
  }
  // Range checks live in the library; a zero-width curve makes it report them.
  double probe = 0.0;
  check(hctl_weight_curve(&m, 10, 1.0, 10, 1.0, nullptr, 0, &probe));
  return spec;
}

hctl_sidedness parse_sidedness(const std::string& s) {
  const std::string k = lower(s);
  if (k == "lower") return HCTL_LOWER;
  if (k == "upper") return HCTL_UPPER;
  if (k == "two-sided" || k == "two_sided" || k == "both") return HCTL_TWO_SIDED;
  usage_error("unknown sidedness '" + s + "' (lower, upper, two-sided)");
}

const char* sidedness_label(hctl_sidedness s) {
  switch (s) {
    case HCTL_LOWER:
      return "lower";
    case HCTL_UPPER:
      return "upper";
    default:
      return "two-sided";
  }
}

std::vector<int> parse_id_list(const std::string& spec) {
  std::vector<int> ids;
  std::stringstream in(spec);
  std::string part;
  const auto to_int = [&](const std::string& s) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0') usage_error("bad scenario list '" + spec + "'");
    return static_cast<int>(v);
  };
  while (std::getline(in, part, ',')) {
    if (part.empty()) continue;
    const auto dash = part.find('-', 1);
    if (dash == std::string::npos) {
      ids.push_back(to_int(part));
    } else {
      const int a = to_int(part.substr(0, dash));
      const int b = to_int(part.substr(dash + 1));
      if (b < a) usage_error("bad scenario range '" + part + "'");
      for (int i = a; i <= b; ++i) ids.push_back(i);
    }
  }
  if (ids.empty()) usage_error("empty scenario list");
  return ids;
}

std::vector<double> make_grid(double from, double to, double step) {
  if (!std::isfinite(from) || !std::isfinite(to) || !(step > 0) || to < from) {
    usage_error("grid needs finite from <= to and step > 0");
  }
  const double span = (to - from) / step;
  if (span > 1e6) usage_error("grid has too many points");
  const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = std::round((from + static_cast<double>(i) * step) * 1e12) / 1e12;
  }
  return grid;
}

json summary_to_json(const hctl_summary& s) {
  return {{"n", s.n}, {"mean", s.mean}, {"sd", s.sd}};
}

json data_to_json(const hctl_hybrid_data& d) {
  return {{"treatment", summary_to_json(d.treatment)},
          {"control", summary_to_json(d.control)},
          {"historical", summary_to_json(d.historical)}};
}

json design_to_json(const hctl_design& d) {
  return {{"n_t", d.n_t},         {"n_c", d.n_c},         {"n_h", d.n_h},
          {"sigma_t", d.sigma_t}, {"sigma_c", d.sigma_c}, {"sigma_h", d.sigma_h},
          {"mu_diff", d.mu_diff}};
}

json scenario_to_json(const hctl_scenario& s) {
  return {{"id", s.id},     {"n_t", s.n_t},   {"n_c", s.n_c},   {"n_h", s.n_h},
          {"mu_t", s.mu_t}, {"mu_c", s.mu_c}, {"mu_h", s.mu_h}, {"variance", s.variance}};
}

json outcome_to_json(const hctl_outcome& o) {
  return {{"weight", o.weight},
          {"statistic", o.statistic},
          {"critical_value", o.critical_value},
          {"p_value", o.p_value},
          {"pooled", o.pooled < 0 ? json(nullptr) : json(o.pooled == 1)},
          {"alpha_used", o.alpha_used},
          {"t1", o.t1},
          {"reject", o.reject != 0}};
}

int default_workers() {
  if (const char* env = std::getenv("HYBRIDCTL_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1 && w <= 256) return w;
  }
  return 1;
}

json run_analyze(const json& req) {
  if (!req.is_object()) usage_error("request body must be a JSON object");
  const hctl_hybrid_data data = data_from_request(req);
  const MethodSpec spec = parse_method(text(req, "method"), object_or_empty(req, "params"));
  const double alpha = number(req, "alpha", 0.05);
  const hctl_sidedness side = parse_sidedness(text(req, "sidedness", "two-sided"));
  const json& boot_json = object_or_empty(req, "bootstrap");

  json resp = {{"schema_version", kSchemaVersion},
               {"method", spec.label},
               {"alpha", alpha},
               {"sidedness", sidedness_label(side)},
               {"data", data_to_json(data)}};
  hctl_outcome out{};
  if (is_ttp_eq(spec.method)) {
    // alpha is the level on the tested side(s); the adjustment works on the
    // two-sided scale.
    const double two_sided = side == HCTL_TWO_SIDED ? alpha : 2.0 * alpha;
    const hctl_design design =
        design_from_json(object_or_empty(req, "design"), observed_design(data));
    check(hctl_analyze(&data, &spec.method, nullptr, &design, two_sided, side, &out));
    resp["reference"] = "normal";
    resp["design"] = design_to_json(design);
  } else {
    const std::string reference =
        text(req, "reference", spec.method.kind == HCTL_METHOD_FIXED ? "normal" : "bootstrap");
    if (reference == "normal") {
      if (spec.method.kind != HCTL_METHOD_FIXED) {
        usage_error("dynamic borrowing needs the bootstrap reference");
      }
      check(hctl_analyze(&data, &spec.method, nullptr, nullptr, alpha, side, &out));
    } else if (reference == "bootstrap") {
      hctl_bootstrap_config boot{};
      boot.b_reps = int32(boot_json, "b_reps", 10000);
      boot.seed = req.contains("seed") ? seed_of(req) : seed_of(boot_json);
      boot.mu_hat = number(boot_json, "mu_hat", 0.0);
      boot.sidedness = side;
      boot.alpha = alpha;
      boot.workers = int32(boot_json, "workers", default_workers());
      check(hctl_analyze(&data, &spec.method, &boot, nullptr, alpha, side, &out));
      resp["seed"] = boot.seed;
      resp["b_reps"] = boot.b_reps;
    } else {
      usage_error("field 'reference' must be 'normal' or 'bootstrap'");
    }
    resp["reference"] = reference;
  }
  resp["outcome"] = outcome_to_json(out);
  return resp;
}

json run_case_study(const json& req) {
  hctl_hybrid_data data{};
  check(hctl_case_study_data(&data));
  const std::uint64_t seed = seed_of(req);
  const std::int32_t b = int32(req, "b_reps", 10000);
  const double alpha = number(req, "alpha", 0.05);
  json methods = json::array();
  for (const char* name : {"db-t", "db-l1", "db-l2"}) {
    json r = run_analyze({{"case_study", true},
                          {"method", name},
                          {"alpha", alpha},
                          {"sidedness", "lower"},
                          {"seed", seed},
                          {"bootstrap", {{"b_reps", b}, {"workers", int32(req, "workers", default_workers())}}}});
    methods.push_back({{"method", r["method"]}, {"outcome", r["outcome"]}});
  }
  json base = run_analyze({{"case_study", true},
                           {"method", "fixed"},
                           {"params", {{"a", 0.0}}},
                           {"alpha", alpha},
                           {"sidedness", "lower"}});
  return {{"schema_version", kSchemaVersion},
          {"seed", seed},
          {"b_reps", b},
          {"alpha", alpha},
          {"sidedness", "lower"},
          {"data", data_to_json(data)},
          {"methods", methods},
          {"no_borrowing", {{"method", base["method"]}, {"outcome", base["outcome"]}}}};
}

json run_adjust_alpha(const json& req) {
  if (!req.is_object()) usage_error("request body must be a JSON object");
  const MethodSpec spec = parse_method(text(req, "method"), object_or_empty(req, "params"));
  if (!is_ttp_eq(spec.method)) usage_error("alpha adjustment applies to ttp and eq methods");
  hctl_design design{};
  if (req.contains("scenario") && !req.at("scenario").is_null()) {
    hctl_scenario sc{};
    check(hctl_scenario_get(int32(req, "scenario"), &sc));
    const double sd = std::sqrt(sc.variance);
    design = {sc.n_t, sc.n_c, sc.n_h, sd, sd, sd, 0.0};
    design = design_from_json(object_or_empty(req, "design"), design);
  } else {
    if (!req.contains("design")) usage_error("missing field 'design' (or 'scenario')");
    design = design_from_json(object_or_empty(req, "design"), std::nullopt);
  }
  const double alpha = number(req, "alpha", 0.05);
  double alpha_star = 0.0, residual = 0.0;
  check(hctl_adjust_alpha(&design, &spec.method, alpha, &alpha_star, &residual));
  return {{"schema_version", kSchemaVersion}, {"method", spec.label},
          {"alpha", alpha},                   {"alpha_star", alpha_star},
          {"residual", residual},             {"design", design_to_json(design)}};
}

json run_weight_curve(const json& req) {
  if (!req.is_object()) usage_error("request body must be a JSON object");
  const MethodSpec spec = parse_method(text(req, "method"), object_or_empty(req, "params"));
  std::vector<double> grid;
  if (!req.contains("t1_grid")) {
    grid = make_grid(-2.5, 2.5, 0.05);
  } else if (req.at("t1_grid").is_array()) {
    for (const auto& v : req.at("t1_grid")) {
      if (!v.is_number()) usage_error("t1_grid values must be numbers");
      grid.push_back(v.get<double>());
    }
  } else if (req.at("t1_grid").is_object()) {
    const json& g = req.at("t1_grid");
    grid = make_grid(number(g, "from"), number(g, "to"), number(g, "step"));
  } else {
    usage_error("field 't1_grid' must be an array or {from, to, step}");
  }
  const std::int32_t n_c = int32(req, "n_c", 50);
  const std::int32_t n_h = int32(req, "n_h", 50);
  const double s_c = number(req, "s_c", std::sqrt(5.0));
  const double s_h = number(req, "s_h", std::sqrt(5.0));
  std::vector<double> w(grid.size());
  check(hctl_weight_curve(&spec.method, n_c, s_c, n_h, s_h, grid.data(), grid.size(), w.data()));
  return {{"schema_version", kSchemaVersion},
          {"method", spec.label},
          {"n_c", n_c},
          {"n_h", n_h},
          {"s_c", s_c},
          {"s_h", s_h},
          {"t1", grid},
          {"weight", w}};
}

json list_scenarios() {
  json rows = json::array();
  const auto n = static_cast<std::int32_t>(hctl_scenario_count());
  for (std::int32_t id = 1; id <= n; ++id) {
    hctl_scenario s{};
    check(hctl_scenario_get(id, &s));
    rows.push_back(scenario_to_json(s));
  }
  return {{"schema_version", kSchemaVersion}, {"scenarios", rows}};
}

void validate_simulate(const json& req) {
  if (!req.is_object()) usage_error("request body must be a JSON object");
  scenarios_from_request(req);
  config_from_request(req);
}

ResultsPtr run_simulate(const json& req, const Progress& progress) {
  if (!req.is_object()) usage_error("request body must be a JSON object");
  const auto scenarios = scenarios_from_request(req);
  const auto cfg = config_from_request(req);
  hctl_results* raw = nullptr;
  check(hctl_simulate(cfg.get(), scenarios.data(), scenarios.size(),
                      progress ? progress_trampoline : nullptr,
                      progress ? const_cast<Progress*>(&progress) : nullptr, &raw));
  return ResultsPtr(raw);
}

std::string export_results(const hctl_results* results, hctl_format format) {
  char* text_out = nullptr;
  check(hctl_results_export(results, format, &text_out));
  std::string s(text_out);
  hctl_string_free(text_out);
  return s;
}

json results_to_json(const hctl_results* results) {
  return json::parse(export_results(results, HCTL_FORMAT_JSON));
}

}  // namespace hybridctl::frontend
