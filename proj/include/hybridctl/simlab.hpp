#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hybridctl/borrowing.hpp"
#include "hybridctl/decision.hpp"
#include "hybridctl/inference.hpp"

namespace hybridctl {

/// True parameters of one simulated trial configuration. `variance` is
/// shared by all three arms.
struct Scenario {
  int id = 0;
  int n_t = 0;
  int n_c = 0;
  int n_h = 0;
  double mu_t = 0.0;
  double mu_c = 0.0;
  double mu_h = 0.0;
  double variance = 5.0;

  /// Calibration design for TTP/EQ: true sizes and sds, zero control shift.
  DesignParams design() const;
  void validate() const;
};

/// The 24 reference scenarios (1-4 null, 5-24 alternatives).
std::vector<Scenario> build_scenario_table();

/// Throws kUsage for ids outside 1..24.
Scenario scenario_by_id(int id);

struct NamedMethod {
  std::string label;
  WeightMethod method;
};

/// DB-T, DB-L1, DB-L2, TTP1, TTP2, EQ1, EQ2 with the given EQ margin.
std::vector<NamedMethod> standard_methods(double delta = 1.5);

/// Case-insensitive lookup of a preset label ("db-l2", "TTP1", ...).
std::optional<NamedMethod> standard_method(std::string_view label, double delta = 1.5);

struct SimConfig {
  int n_sims = 100000;
  int b_reps = 10000;
  std::uint64_t seed = 20240601;
  double alpha = 0.025;  // per-side level for one-sided testing
  Sidedness sidedness = Sidedness::kUpper;
  std::vector<NamedMethod> methods = standard_methods();
  double delta = 1.5;
  int workers = 1;

  void validate() const;
};

struct MethodResult {
  std::string method;
  double rejection_rate = 0.0;
  double mc_standard_error = 0.0;
  double mean_weight = 0.0;
  std::optional<double> alpha_star;  // two-sided adjusted level, TTP/EQ only
  long rejections = 0;
};

struct SimResult {
  int scenario_id = 0;
  std::vector<MethodResult> methods;
  double elapsed_seconds = 0.0;
  int n_sims = 0;
  int b_reps = 0;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  Sidedness sidedness = Sidedness::kUpper;

  const MethodResult* find(std::string_view label) const;
};

/// Called with (completed, total) replicates; return false to cancel.
using ProgressFn = std::function<bool(long, long)>;

/// Monte Carlo operating characteristics of every configured method on one
/// scenario. All methods see the same simulated datasets. Dynamic and fixed
/// weights reject when the bootstrap p-value is <= alpha; TTP/EQ use the
/// adjusted level computed once from the scenario's design, with the
/// one-sided threshold z_{1-alpha*/2} on the configured tail.
SimResult run_scenario(const Scenario& scenario, const SimConfig& config,
                       const ProgressFn& progress = {});

enum class ExportFormat { kCsv, kJson };

/// Throws kUsage on an empty result list.
std::string export_results(std::span<const SimResult> results, ExportFormat format);

std::vector<SimResult> parse_results(std::string_view text, ExportFormat format);

/// Round to 10 significant decimal digits, as written by export_results.
double round_sig10(double x);

}  // namespace hybridctl
