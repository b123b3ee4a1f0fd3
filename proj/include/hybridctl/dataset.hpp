#pragma once

#include <istream>
#include <span>

#include "hybridctl/borrowing.hpp"

namespace hybridctl {

/// Paroxetine vs placebo HAM-A change scores at week 8 (current study) and
/// the placebo arm of the earlier study used as historical control.
HybridData case_study_data();

/// Sample mean and (n - 1) standard deviation.
SummaryStat summarize(std::span<const double> values);

/// Reads a two-column `arm,value` CSV (optional header) with arms
/// treatment, control and historical, and reduces each arm to a SummaryStat.
HybridData summarize_csv(std::istream& in);

}  // namespace hybridctl
