#pragma once
// JSON request/response layer shared by the CLI and the HTTP service. Both
// front ends build a request document and hand it to the same run_* call,
// so identical inputs give identical numbers whichever way they arrive.

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybridctl/hybridctl.h"
#include "json.hpp"

namespace hybridctl::frontend {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr std::uint64_t kDefaultSeed = 20240601;

/// Failure carrying a library status code.
class ApiError : public std::runtime_error {
 public:
  ApiError(hctl_status status, const std::string& message)
      : std::runtime_error(message), status_(status) {}
  hctl_status status() const { return status_; }

 private:
  hctl_status status_;
};

/// Throws ApiError with the library's last message when `s` is not OK.
void check(hctl_status s);

[[noreturn]] void usage_error(const std::string& message);

/// True for statuses caused by the request itself rather than the numerics.
bool is_request_error(hctl_status s);

/// {"schema_version": 1, "error": {"code": ..., "message": ...}}
json error_body(hctl_status s, const std::string& message);

struct MethodSpec {
  std::string label;
  hctl_method method;
};

/// Resolves a method name (fixed, db-t, db-l, db-l1, db-l2, ttp, ttp1, ttp2,
/// eq, eq1, eq2) with its optional parameter object.
MethodSpec parse_method(const std::string& name, const json& params);

hctl_sidedness parse_sidedness(const std::string& s);
const char* sidedness_label(hctl_sidedness s);

/// "1-4,6" -> {1, 2, 3, 4, 6}
std::vector<int> parse_id_list(const std::string& spec);

/// from, from + step, ... up to `to` inclusive (within rounding).
std::vector<double> make_grid(double from, double to, double step);

json summary_to_json(const hctl_summary& s);
json data_to_json(const hctl_hybrid_data& d);
json design_to_json(const hctl_design& d);
json scenario_to_json(const hctl_scenario& s);
json outcome_to_json(const hctl_outcome& o);

/// Fills the worker hint from HYBRIDCTL_WORKERS when a request omits it.
int default_workers();

json run_analyze(const json& request);
json run_case_study(const json& request);
json run_adjust_alpha(const json& request);
json run_weight_curve(const json& request);
json list_scenarios();

struct ResultsDeleter {
  void operator()(hctl_results* r) const { hctl_results_destroy(r); }
};
using ResultsPtr = std::unique_ptr<hctl_results, ResultsDeleter>;

/// Return false to cancel.
using Progress = std::function<bool(std::int64_t done, std::int64_t total)>;

/// Validates a simulate request without running it.
void validate_simulate(const json& request);

ResultsPtr run_simulate(const json& request, const Progress& progress = {});

std::string export_results(const hctl_results* results, hctl_format format);

/// The JSON export document (schema_version + results).
json results_to_json(const hctl_results* results);

}  // namespace hybridctl::frontend
