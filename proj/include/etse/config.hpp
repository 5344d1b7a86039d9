#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "etse/harness.hpp"

namespace etse {

/// Parses an experiment description:
///
///   {
///     "model": {"A": [[..]], "C": [[..]], "Q": [[..]], "R": [[..]],
///               "Sigma0": [[..]]},
///     "trigger": {"kind": "open-loop" | "closed-loop",
///                 "weight_matrix": [[..]]},
///     "drop_rates": [..], "horizon": 9, "runs": 1000,
///     "estimators": [{"kind": "exact"}, {"kind": "gpb", "N": 2}, ...],
///     "master_seed": 42
///   }
///
/// Matrices are row-major nested arrays; a bare number is a 1x1 matrix.
/// Omitted keys keep the default_experiment() values. Optional extras:
/// "threads", "horizon_cap", "output" and
/// "weighting": "predictive-density" | "transmit-probability" (how mixture
/// estimators reweight hypotheses on an arrived packet).
ExperimentConfig parse_config(std::string_view json_text);

/// Throws kIo naming the path when the file cannot be read.
ExperimentConfig load_config(const std::string& path);

/// "0,0.25,0.5" -> {0, 0.25, 0.5}.
std::vector<double> parse_number_list(std::string_view text);

/// "oracle,exact,gpb:2" -> kinds.
std::vector<EstimatorKind> parse_estimator_list(std::string_view text);

}  // namespace etse
