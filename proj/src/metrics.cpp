#include "agegraph/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "agegraph/errors.hpp"
#include "json.hpp"

namespace agegraph {

namespace {

void require_nonempty(std::span<const EvalRecord> records, const char* op) {
    if (records.empty())
        throw DomainError(std::string(op) + ": no records to evaluate");
}

double gaussian_miss(const EvalRecord& r, const char* op) {
    if (!r.sigma || *r.sigma <= 0.0)
        throw DomainError(std::string(op) + ": record lacks a positive sigma");
    double err = r.actual - r.predicted;
    return std::exp(-(err * err) / (2.0 * *r.sigma * *r.sigma));
}

std::string fmt(double v, const char* spec = "%.6f") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

}  // namespace

double mae(std::span<const EvalRecord> records) {
    require_nonempty(records, "mae");
    double total = 0.0;
    for (const EvalRecord& r : records) total += std::fabs(r.actual - r.predicted);
    return total / static_cast<double>(records.size());
}

double cumulative_score(std::span<const EvalRecord> records, double j) {
    require_nonempty(records, "cumulative_score");
    if (j < 0.0) throw DomainError("cumulative_score: negative threshold");
    long hits = 0;
    for (const EvalRecord& r : records)
        if (std::fabs(r.actual - r.predicted) <= j) ++hits;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(records.size());
}

double epsilon_error(std::span<const EvalRecord> records) {
    require_nonempty(records, "epsilon_error");
    double total = 0.0;
    for (const EvalRecord& r : records) total += 1.0 - gaussian_miss(r, "epsilon_error");
    return total / static_cast<double>(records.size());
}

double epsilon_error_raw(std::span<const EvalRecord> records) {
    require_nonempty(records, "epsilon_error_raw");
    double total = 0.0;
    for (const EvalRecord& r : records) total += gaussian_miss(r, "epsilon_error_raw");
    return 1.0 - total;
}

MetricsReport build_metrics_report(std::span<const EvalRecord> records,
                                   int max_threshold, bool include_raw_epsilon) {
    require_nonempty(records, "build_metrics_report");
    if (max_threshold < 0)
        throw DomainError("build_metrics_report: negative threshold sweep");

    MetricsReport rep;
    rep.sample_count = static_cast<long>(records.size());
    rep.mae_value = mae(records);
    for (int j = 0; j <= max_threshold; ++j)
        rep.cs_curve.emplace_back(j, cumulative_score(records, j));

    bool have_sigma = true;
    for (const EvalRecord& r : records)
        if (!r.sigma || *r.sigma <= 0.0) have_sigma = false;
    if (have_sigma) {
        rep.epsilon = epsilon_error(records);
        if (include_raw_epsilon) rep.epsilon_raw = epsilon_error_raw(records);
    }

    std::array<double, 10> err_sum{};
    for (const EvalRecord& r : records) {
        int g = static_cast<int>(r.actual / 10.0);
        if (g < 0) g = 0;
        if (g > 9) g = 9;
        err_sum[g] += std::fabs(r.actual - r.predicted);
        ++rep.group_count[g];
    }
    for (int g = 0; g < 10; ++g)
        rep.group_mae[g] = rep.group_count[g] > 0
                               ? err_sum[g] / static_cast<double>(rep.group_count[g])
                               : 0.0;
    return rep;
}

std::string render_report_text(const MetricsReport& report) {
    std::string out;
    out += "samples " + std::to_string(report.sample_count) + "\n";
    out += "mae " + fmt(report.mae_value) + "\n";
    if (report.epsilon) out += "epsilon_error " + fmt(*report.epsilon) + "\n";
    if (report.epsilon_raw)
        out += "epsilon_error_raw " + fmt(*report.epsilon_raw) + "\n";
    out += "cs_curve\n";
    for (auto [j, pct] : report.cs_curve)
        out += "  j=" + fmt(j, "%.0f") + " " + fmt(pct, "%.2f") + "%\n";
    out += "group_mae\n";
    for (int g = 0; g < 10; ++g) {
        out += "  group " + std::to_string(g) + " ";
        out += report.group_count[g] > 0 ? fmt(report.group_mae[g]) : "n/a";
        out += " (" + std::to_string(report.group_count[g]) + " samples)\n";
    }
    if (!report.diagnostics.empty()) {
        out += "diagnostics\n";
        for (const auto& [k, v] : report.diagnostics) out += "  " + k + " " + v + "\n";
    }
    return out;
}

std::string render_report_json(const MetricsReport& report) {
    nlohmann::json j;
    j["samples"] = report.sample_count;
    j["mae"] = report.mae_value;
    if (report.epsilon)
        j["epsilon_error"] = *report.epsilon;
    else
        j["epsilon_error"] = nullptr;
    if (report.epsilon_raw) j["epsilon_error_raw"] = *report.epsilon_raw;
    nlohmann::json curve = nlohmann::json::array();
    for (auto [thr, pct] : report.cs_curve)
        curve.push_back({{"threshold", thr}, {"percentage", pct}});
    j["cs_curve"] = curve;
    nlohmann::json groups = nlohmann::json::array();
    for (int g = 0; g < 10; ++g) {
        nlohmann::json row;
        row["group"] = g;
        row["count"] = report.group_count[g];
        if (report.group_count[g] > 0)
            row["mae"] = report.group_mae[g];
        else
            row["mae"] = nullptr;
        groups.push_back(row);
    }
    j["group_mae"] = groups;
    nlohmann::json diag = nlohmann::json::object();
    for (const auto& [k, v] : report.diagnostics) diag[k] = v;
    j["diagnostics"] = diag;
    return j.dump(2) + "\n";
}

std::string render_cs_table(const MetricsReport& report) {
    std::string out = "threshold\tpercentage\n";
    for (auto [j, pct] : report.cs_curve)
        out += fmt(j, "%.0f") + "\t" + fmt(pct, "%.4f") + "\n";
    return out;
}

}  // namespace agegraph
