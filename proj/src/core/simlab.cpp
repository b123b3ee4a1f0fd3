#include "hybridctl/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "hybridctl/error.hpp"
#include "json.hpp"

namespace hybridctl {

using nlohmann::json;

DesignParams Scenario::design() const {
  return DesignParams::with_variance(n_t, n_c, n_h, variance, 0.0);
}

void Scenario::validate() const {
  if (n_t < 2 || n_c < 2 || n_h < 2) fail(ErrorCode::kDomain, "scenario sizes must be >= 2");
  if (!(variance > 0.0)) fail(ErrorCode::kDomain, "scenario variance must be positive");
  if (!std::isfinite(mu_t) || !std::isfinite(mu_c) || !std::isfinite(mu_h)) {
    fail(ErrorCode::kDomain, "scenario means must be finite");
  }
}

std::vector<Scenario> build_scenario_table() {
  struct Sizes {
    int n_t, n_c, n_h;
  };
  struct Means {
    double mu_t, mu_c, mu_h;
  };
  constexpr Sizes sizes[] = {{50, 25, 25}, {50, 50, 50}, {100, 50, 50}, {100, 100, 100}};
  constexpr Means blocks[] = {{0, 0, 0}, {2, 0, 0},  {2, 0, 1},
                              {2, 0, -1}, {2, 1, 0}, {2, -1, 0}};
  std::vector<Scenario> table;
  int id = 1;
  for (const Means& m : blocks) {
    for (const Sizes& s : sizes) {
      table.push_back({id++, s.n_t, s.n_c, s.n_h, m.mu_t, m.mu_c, m.mu_h, 5.0});
    }
  }
  return table;
}

Scenario scenario_by_id(int id) {
  if (id < 1 || id > 24) {
    fail(ErrorCode::kUsage, "unknown scenario id " + std::to_string(id) + " (valid: 1-24)");
  }
  return build_scenario_table()[static_cast<std::size_t>(id - 1)];
}

std::vector<NamedMethod> standard_methods(double delta) {
  return {
      {"DB-T", method::DbT{}},
      {"DB-L1", method::DbL{kDbL1}},
      {"DB-L2", method::DbL{kDbL2}},
      {"TTP1", method::Ttp{0.05}},
      {"TTP2", method::Ttp{0.10}},
      {"EQ1", method::Eq{delta, 0.05}},
      {"EQ2", method::Eq{delta, 0.10}},
  };
}

std::optional<NamedMethod> standard_method(std::string_view label, double delta) {
  const auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
  };
  const std::string wanted = lower(label);
  for (auto& m : standard_methods(delta)) {
    if (lower(m.label) == wanted) return m;
  }
  return std::nullopt;
}

void SimConfig::validate() const {
  if (n_sims < 100) fail(ErrorCode::kDomain, "n_sims must be >= 100");
  if (b_reps < 100) fail(ErrorCode::kDomain, "b_reps must be >= 100");
  if (!(alpha > 0.0 && alpha < 0.5)) fail(ErrorCode::kDomain, "alpha must lie in (0, 0.5)");
  if (methods.empty()) fail(ErrorCode::kUsage, "no methods configured");
  for (const auto& m : methods) validate_method(m.method);
}

const MethodResult* SimResult::find(std::string_view label) const {
  for (const auto& m : methods) {
    if (m.method == label) return &m;
  }
  return nullptr;
}

SimResult run_scenario(const Scenario& scenario, const SimConfig& config,
                       const ProgressFn& progress) {
  scenario.validate();
  config.validate();
  const auto started = std::chrono::steady_clock::now();

  const std::size_t n_methods = config.methods.size();
  // Two-sided nominal level whose half is the configured one-sided level.
  const double two_sided_alpha =
      config.sidedness == Sidedness::kTwoSided ? config.alpha : 2.0 * config.alpha;

  std::vector<std::optional<double>> alpha_star(n_methods);
  std::vector<std::size_t> boot_index;
  std::vector<WeightMethod> boot_methods;
  const DesignParams design = scenario.design();
  for (std::size_t m = 0; m < n_methods; ++m) {
    const WeightMethod& wm = config.methods[m].method;
    if (const auto* t = std::get_if<method::Ttp>(&wm)) {
      alpha_star[m] = adjusted_alpha_ttp(design, two_sided_alpha, t->alpha_h1).alpha_star;
    } else if (const auto* e = std::get_if<method::Eq>(&wm)) {
      alpha_star[m] =
          adjusted_alpha_eq(design, two_sided_alpha, EqConfig{e->delta, e->alpha_h2})
              .alpha_star;
    } else {
      boot_index.push_back(m);
      boot_methods.push_back(wm);
    }
  }

  BootstrapConfig boot;
  boot.b_reps = config.b_reps;
  boot.seed = config.seed;
  boot.mu_hat = 0.0;
  boot.sidedness = config.sidedness;
  boot.alpha = config.alpha;

  const auto n_sims = static_cast<std::size_t>(config.n_sims);
  std::vector<unsigned char> rejected(n_sims * n_methods, 0);
  std::vector<double> weights(n_sims * n_methods, 0.0);

  const double sd = std::sqrt(scenario.variance);
  const auto run_replicate = [&](std::size_t i) {
    StreamRng rng(config.seed, StreamRng::Domain::kData, i);
    HybridData data;
    data.treatment = draw_summary(scenario.n_t, scenario.mu_t, sd, rng);
    data.current_control = draw_summary(scenario.n_c, scenario.mu_c, sd, rng);
    data.historical_control = draw_summary(scenario.n_h, scenario.mu_h, sd, rng);

    std::vector<double> observed(boot_methods.size());
    for (std::size_t k = 0; k < boot_methods.size(); ++k) {
      const double w = borrowing_weight(boot_methods[k], data);
      weights[i * n_methods + boot_index[k]] = w;
      observed[k] = pooled_statistic(data, w);
    }
    if (!boot_methods.empty()) {
      const auto p = bootstrap_p_values(data, boot_methods, observed, boot, i);
      for (std::size_t k = 0; k < boot_methods.size(); ++k) {
        rejected[i * n_methods + boot_index[k]] = p[k] <= config.alpha ? 1 : 0;
      }
    }
    for (std::size_t m = 0; m < n_methods; ++m) {
      if (!alpha_star[m]) continue;
      const TestOutcome o =
          ttp_eq_test_at(data, config.methods[m].method, *alpha_star[m], config.sidedness);
      rejected[i * n_methods + m] = o.reject ? 1 : 0;
      weights[i * n_methods + m] = o.weight;
    }
  };

  std::atomic<std::size_t> next{0};
  std::atomic<long> done{0};
  std::atomic<bool> stop{false};
  std::atomic<int> running{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  constexpr std::size_t kChunk = 16;

  const auto worker = [&] {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::size_t begin = next.fetch_add(kChunk);
      if (begin >= n_sims) break;
      const std::size_t end = std::min(n_sims, begin + kChunk);
      try {
        for (std::size_t i = begin; i < end; ++i) run_replicate(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
      done.fetch_add(static_cast<long>(end - begin));
    }
    running.fetch_sub(1);
  };

  bool cancelled = false;
  {
    const int n_workers = std::clamp(config.workers, 1, 256);
    running = n_workers;
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    if (progress) {
      while (running.load() > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(25));
        if (!progress(done.load(), static_cast<long>(n_sims))) {
          cancelled = true;
          stop = true;
        }
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  if (cancelled) fail(ErrorCode::kCancelled, "simulation cancelled");
  if (progress) progress(static_cast<long>(n_sims), static_cast<long>(n_sims));

  SimResult result;
  result.scenario_id = scenario.id;
  result.n_sims = config.n_sims;
  result.b_reps = config.b_reps;
  result.seed = config.seed;
  result.alpha = config.alpha;
  result.sidedness = config.sidedness;
  for (std::size_t m = 0; m < n_methods; ++m) {
    long hits = 0;
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < n_sims; ++i) {
      hits += rejected[i * n_methods + m];
      weight_sum += weights[i * n_methods + m];
    }
    MethodResult r;
    r.method = config.methods[m].label;
    r.rejections = hits;
    r.rejection_rate = static_cast<double>(hits) / config.n_sims;
    r.mc_standard_error =
        std::sqrt(r.rejection_rate * (1.0 - r.rejection_rate) / config.n_sims);
    r.mean_weight = weight_sum / config.n_sims;
    r.alpha_star = alpha_star[m];
    result.methods.push_back(std::move(r));
  }
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

double round_sig10(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return std::strtod(buf, nullptr);
}

namespace {

std::string fmt10(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

Sidedness parse_sidedness(const std::string& s) {
  if (s == "lower") return Sidedness::kLower;
  if (s == "upper") return Sidedness::kUpper;
  if (s == "two-sided") return Sidedness::kTwoSided;
  fail(ErrorCode::kUsage, "unknown sidedness '" + s + "'");
}

json to_json(const SimResult& r) {
  json methods = json::array();
  for (const auto& m : r.methods) {
    methods.push_back({
        {"method", m.method},
        {"rejection_rate", round_sig10(m.rejection_rate)},
        {"mc_se", round_sig10(m.mc_standard_error)},
        {"mean_weight", round_sig10(m.mean_weight)},
        {"alpha_star", m.alpha_star ? json(round_sig10(*m.alpha_star)) : json(nullptr)},
        {"rejections", m.rejections},
    });
  }
  return {
      {"scenario", r.scenario_id},
      {"n_sims", r.n_sims},
      {"b_reps", r.b_reps},
      {"seed", r.seed},
      {"alpha", round_sig10(r.alpha)},
      {"sidedness", sidedness_name(r.sidedness)},
      {"elapsed_seconds", round_sig10(r.elapsed_seconds)},
      {"conventions",
       {{"bootstrap_rejection", "p_value <= alpha"},
        {"bootstrap_quantile", "order statistic ceil(q*B)"},
        {"ttp_eq_threshold", "z_{1-alpha*/2} on the tested side; alpha* from two-sided level 2*alpha"},
        {"ttp_eq_calibration_shift", 0.0}}},
      {"methods", methods},
  };
}

SimResult from_json(const json& j) {
  SimResult r;
  r.scenario_id = j.at("scenario").get<int>();
  r.n_sims = j.value("n_sims", 0);
  r.b_reps = j.value("b_reps", 0);
  r.seed = j.value("seed", std::uint64_t{0});
  r.alpha = j.value("alpha", 0.0);
  r.sidedness = parse_sidedness(j.value("sidedness", std::string("upper")));
  r.elapsed_seconds = j.value("elapsed_seconds", 0.0);
  for (const auto& m : j.at("methods")) {
    MethodResult mr;
    mr.method = m.at("method").get<std::string>();
    mr.rejection_rate = m.at("rejection_rate").get<double>();
    mr.mc_standard_error = m.at("mc_se").get<double>();
    mr.mean_weight = m.at("mean_weight").get<double>();
    if (!m.at("alpha_star").is_null()) mr.alpha_star = m.at("alpha_star").get<double>();
    mr.rejections = m.value("rejections", 0L);
    r.methods.push_back(std::move(mr));
  }
  return r;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::string export_results(std::span<const SimResult> results, ExportFormat format) {
  if (results.empty()) fail(ErrorCode::kUsage, "no results to export");
  if (format == ExportFormat::kJson) {
    json doc = {{"schema_version", 1}, {"results", json::array()}};
    for (const auto& r : results) doc["results"].push_back(to_json(r));
    return doc.dump(2) + "\n";
  }
  if (format != ExportFormat::kCsv) fail(ErrorCode::kUsage, "unsupported export format");
  std::ostringstream out;
  out << "scenario,method,rejection_rate,mc_se,mean_weight,alpha_star\n";
  for (const auto& r : results) {
    for (const auto& m : r.methods) {
      out << r.scenario_id << ',' << m.method << ',' << fmt10(m.rejection_rate) << ','
          << fmt10(m.mc_standard_error) << ',' << fmt10(m.mean_weight) << ','
          << (m.alpha_star ? fmt10(*m.alpha_star) : std::string()) << '\n';
    }
  }
  return out.str();
}

std::vector<SimResult> parse_results(std::string_view text, ExportFormat format) {
  std::vector<SimResult> results;
  if (format == ExportFormat::kJson) {
    json doc;
    try {
      doc = json::parse(text);
      for (const auto& r : doc.at("results")) results.push_back(from_json(r));
    } catch (const json::exception& e) {
      fail(ErrorCode::kUsage, std::string("malformed results JSON: ") + e.what());
    }
    return results;
  }
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) ||
      line != "scenario,method,rejection_rate,mc_se,mean_weight,alpha_star") {
    fail(ErrorCode::kUsage, "results CSV header mismatch");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) fail(ErrorCode::kUsage, "results CSV row needs 6 fields: " + line);
    const int id = std::atoi(f[0].c_str());
    if (results.empty() || results.back().scenario_id != id) {
      results.emplace_back();
      results.back().scenario_id = id;
    }
    MethodResult m;
    m.method = f[1];
    m.rejection_rate = std::strtod(f[2].c_str(), nullptr);
    m.mc_standard_error = std::strtod(f[3].c_str(), nullptr);
    m.mean_weight = std::strtod(f[4].c_str(), nullptr);
    if (!f[5].empty()) m.alpha_star = std::strtod(f[5].c_str(), nullptr);
    results.back().methods.push_back(std::move(m));
  }
  return results;
}

}  // namespace hybridctl
