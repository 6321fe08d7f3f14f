#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "debugta/simulator.hpp"

namespace debugta::metrics {

inline constexpr std::string_view kCurveConvention = "best_so_far";

struct RunReport {
    std::string dataset_id;
    std::string strategy_id;
    int n_problems = 0;  // sessions evaluated
    double ac_rate_mean = 0.0;
    double ac_all_rate = 0.0;
    double plag_rate = 0.0;
    long long tokens_total = 0;
    std::vector<std::pair<int, double>> per_round_curve;  // (round, mean best-so-far ac_rate)
    std::string config_fingerprint;
    std::string curve_convention{kCurveConvention};
};

json to_json(const RunReport& r);
RunReport report_from_json(const json& j);

/// Rounds half away from zero to two decimals.
double round2(double v);

/// Throws PreconditionError for an empty input. Rates use the final
/// (plagiarism-zeroed) judge result; the curve uses the raw judged scores,
/// best-so-far from round 0 (the initial program) to the largest max_rounds.
RunReport aggregate(std::span<const sim::SessionTranscript> transcripts, const std::string& dataset_id = {});

struct Table {
    std::string markdown;
    json data;
};

/// One row per strategy, three columns (AC Rate, AC@all, Plag.) per dataset.
Table render_table(std::span<const RunReport> reports);

/// sha256 over the canonical dump of `params`.
std::string config_fingerprint(const json& params);

}  // namespace debugta::metrics
