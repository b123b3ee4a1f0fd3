#include "hybridctl/dataset.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "hybridctl/error.hpp"

namespace hybridctl {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

}  // namespace

HybridData case_study_data() {
  return {{137, -9.9, 7.9}, {140, -8.7, 7.3}, {149, -8.1, 8.3}};
}

SummaryStat summarize(std::span<const double> values) {
  if (values.size() < 2) fail(ErrorCode::kDomain, "an arm needs at least two observations");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {static_cast<int>(values.size()), mean,
          std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

HybridData summarize_csv(std::istream& in) {
  std::vector<double> arms[3];
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      fail(ErrorCode::kUsage, "line " + std::to_string(line_no) + ": expected arm,value");
    }
    const std::string arm = trim(line.substr(0, comma));
    const std::string value = trim(line.substr(comma + 1));
    if (line_no == 1 && arm == "arm") continue;
    char* end = nullptr;
    const double x = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0' || !std::isfinite(x)) {
      fail(ErrorCode::kUsage, "line " + std::to_string(line_no) + ": bad value '" + value + "'");
    }
    if (arm == "treatment") {
      arms[0].push_back(x);
    } else if (arm == "control") {
      arms[1].push_back(x);
    } else if (arm == "historical") {
      arms[2].push_back(x);
    } else {
      fail(ErrorCode::kUsage, "line " + std::to_string(line_no) + ": unknown arm '" + arm +
                                  "' (expected treatment, control or historical)");
    }
  }
  HybridData data{summarize(arms[0]), summarize(arms[1]), summarize(arms[2])};
  data.validate();
  return data;
}

}  // namespace hybridctl
