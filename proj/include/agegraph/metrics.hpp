#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace agegraph {

struct EvalRecord {
    double predicted = 0.0;
    double actual = 0.0;
    std::optional<double> sigma;  // annotation std, needed only for epsilon
};

// (1/N) sum |actual - predicted|
double mae(std::span<const EvalRecord> records);

// 100 * #{|actual - predicted| <= j} / N
double cumulative_score(std::span<const EvalRecord> records, double j);

// mean over samples of 1 - exp(-(err^2) / (2 sigma^2)); always in [0,1].
// Every record must carry sigma > 0.
double epsilon_error(std::span<const EvalRecord> records);

// The unnormalized variant, 1 - sum exp(...). Unbounded below; kept only so
// reports can show it side by side for audit when asked.
double epsilon_error_raw(std::span<const EvalRecord> records);

struct MetricsReport {
    long sample_count = 0;
    double mae_value = 0.0;
    std::vector<std::pair<double, double>> cs_curve;  // (threshold, percentage)
    std::optional<double> epsilon;
    std::optional<double> epsilon_raw;
    std::array<double, 10> group_mae{};  // meaningful only where group_count > 0
    std::array<long, 10> group_count{};
    // free-form key/value lines carried verbatim into both renderings
    std::vector<std::pair<std::string, std::string>> diagnostics;
};

// CS curve swept over integer thresholds 0..max_threshold; epsilon filled
// when every record has sigma, the raw variant only when also requested.
MetricsReport build_metrics_report(std::span<const EvalRecord> records,
                                   int max_threshold = 10,
                                   bool include_raw_epsilon = false);

std::string render_report_text(const MetricsReport& report);
std::string render_report_json(const MetricsReport& report);
// Plot-ready two-column table: threshold <tab> percentage.
std::string render_cs_table(const MetricsReport& report);

}  // namespace agegraph
