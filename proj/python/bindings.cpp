// Python surface over the C++ core: the five pipeline verbs plus the small
// operations that are handy for notebook-side checks. Configs travel as the
// same key = value text the CLI consumes.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "agegraph/config.hpp"
#include "agegraph/errors.hpp"
#include "agegraph/graph.hpp"
#include "agegraph/matrix.hpp"
#include "agegraph/metrics.hpp"
#include "agegraph/pipeline.hpp"
#include "agegraph/rl.hpp"
#include "agegraph/walk.hpp"

namespace py = pybind11;
using namespace agegraph;

namespace {

using Rows = std::vector<std::vector<double>>;

Matrix to_matrix(const Rows& rows) {
    if (rows.empty()) throw DomainError("matrix argument must not be empty");
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols())
            throw DimensionError("ragged matrix argument at row " + std::to_string(i));
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

Rows to_rows(const Matrix& m) {
    Rows out(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

std::vector<EvalRecord> to_records(const std::vector<double>& predicted,
                                   const std::vector<double>& actual,
                                   const std::vector<double>& sigma) {
    if (predicted.size() != actual.size())
        throw DimensionError("predicted and actual lengths differ");
    if (!sigma.empty() && sigma.size() != actual.size())
        throw DimensionError("sigma length differs from the record count");
    std::vector<EvalRecord> rs(predicted.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
        rs[i].predicted = predicted[i];
        rs[i].actual = actual[i];
        if (!sigma.empty()) rs[i].sigma = sigma[i];
    }
    return rs;
}

py::dict report_dict(const MetricsReport& rep) {
    py::dict d;
    d["samples"] = rep.sample_count;
    d["mae"] = rep.mae_value;
    py::list curve;
    for (const auto& [threshold, percentage] : rep.cs_curve)
        curve.append(py::make_tuple(threshold, percentage));
    d["cs_curve"] = curve;
    d["epsilon_error"] = rep.epsilon ? py::cast(*rep.epsilon) : py::none();
    py::list groups;
    for (int g = 0; g < 10; ++g) {
        py::dict row;
        row["group"] = g;
        row["count"] = rep.group_count[static_cast<std::size_t>(g)];
        row["mae"] = rep.group_count[static_cast<std::size_t>(g)] > 0
                         ? py::cast(rep.group_mae[static_cast<std::size_t>(g)])
                         : py::none();
        groups.append(row);
    }
    d["group_mae"] = groups;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "graph-based age estimation laboratory";

    // translators run newest-first, so the base class goes in first and the
    // subclasses take precedence
    py::register_exception<Error>(m, "CoreError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<CompatibilityError>(m, "CompatibilityError",
                                               PyExc_ValueError);
    py::register_exception<IngestionError>(m, "IngestionError", PyExc_OSError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    m.def("default_config", [] { return render_config(default_config()); },
          "Canonical config text with every key at its default.");

    m.def(
        "synth",
        [](const std::string& config_text, const std::string& out_dir) {
            return run_synth(parse_config(config_text), out_dir);
        },
        py::arg("config_text"), py::arg("out_dir"),
        "Generate the configured synthetic dataset; returns the dataset path.");

    m.def(
        "train",
        [](const std::string& config_text, const std::string& dataset,
           const std::string& out_dir) {
            TrainResult r = run_train(parse_config(config_text), dataset, out_dir);
            py::dict d;
            d["checkpoint"] = r.checkpoint_path;
            d["train"] = report_dict(r.train_report);
            d["validation"] = report_dict(r.test_report);
            d["warm_loss"] = r.warm_loss;
            d["episode_reward"] = r.episode_reward;
            return d;
        },
        py::arg("config_text"), py::arg("dataset"), py::arg("out_dir"),
        "Full training run; returns checkpoint path, reports and traces.");

    m.def(
        "evaluate",
        [](const std::string& config_text, const std::string& checkpoint,
           const std::string& dataset, const std::string& out_dir) {
            return report_dict(
                run_eval(parse_config(config_text), checkpoint, dataset, out_dir));
        },
        py::arg("config_text"), py::arg("checkpoint"), py::arg("dataset"),
        py::arg("out_dir"), "Evaluate a checkpoint over a dataset.");

    m.def(
        "gradcheck",
        [](const std::string& config_text, const std::string& out_dir,
           double tolerance) {
            GradCheckResult r =
                run_gradcheck(parse_config(config_text), out_dir, tolerance);
            py::dict d;
            d["passed"] = r.passed;
            d["max_rel_error"] = r.max_rel_error;
            d["worst_param"] = r.worst_param;
            d["deterministic"] = r.deterministic;
            return d;
        },
        py::arg("config_text"), py::arg("out_dir"), py::arg("tolerance") = 1e-4,
        "Finite-difference check of the full model at the desk-scale preset.");

    m.def(
        "ablate",
        [](const std::string& config_text, const std::vector<std::string>& variants,
           const std::string& dataset, const std::string& out_dir) {
            py::list rows;
            for (const AblationRow& r :
                 run_ablation(parse_config(config_text), variants, dataset, out_dir)) {
                py::dict d;
                d["variant"] = r.name;
                d["mae"] = r.mae_value;
                d["cs5"] = r.cs5;
                rows.append(d);
            }
            return rows;
        },
        py::arg("config_text"), py::arg("variants"), py::arg("dataset"),
        py::arg("out_dir"), "Train the baseline plus each named variant.");

    m.def("variant_names", [] { return ablation_variant_names(); });

    m.def(
        "build_graph",
        [](const Rows& features, double threshold) {
            return to_rows(build_initial_graph(to_matrix(features), threshold).adjacency);
        },
        py::arg("features"), py::arg("threshold") = 0.936,
        "Cosine-threshold adjacency over node feature rows.");

    m.def(
        "update_adjacency",
        [](const Rows& adjacency, const Rows& profiles, double tau) {
            return to_rows(update_adjacency(to_matrix(adjacency), to_matrix(profiles), tau));
        },
        py::arg("adjacency"), py::arg("profiles"), py::arg("tau") = 0.824,
        "Profile-cosine edge enrichment; never removes an edge.");

    m.def(
        "transition_weight",
        [](std::size_t prev, std::size_t next, const Rows& adjacency, double p,
           double q) {
            WalkConfig cfg;
            cfg.p = p;
            cfg.q = q;
            return transition_weight(prev, next, to_matrix(adjacency), cfg);
        },
        py::arg("prev"), py::arg("next"), py::arg("adjacency"), py::arg("p") = 1.0,
        py::arg("q") = 1.0, "Second-order walk bias for a candidate step.");

    m.def(
        "encode_age",
        [](int age) {
            GridPosition p = encode_age(age);
            return py::make_tuple(p.row, p.col);
        },
        py::arg("age"));
    m.def(
        "decode_position",
        [](int row, int col) { return decode_position(GridPosition{row, col}); },
        py::arg("row"), py::arg("col"));

    m.def(
        "reward",
        [](std::pair<int, int> pos, std::pair<int, int> target,
           const std::vector<double>& ratios, bool use_imbalance, bool use_distance) {
            if (ratios.size() != 10)
                throw DomainError("reward wants 10 group ratios");
            ImbalanceTable table;
            for (std::size_t g = 0; g < 10; ++g) table.ratio[g] = ratios[g];
            RewardConfig cfg;
            cfg.use_imbalance = use_imbalance;
            cfg.use_distance = use_distance;
            return reward(GridPosition{pos.first, pos.second},
                          GridPosition{target.first, target.second}, table, cfg);
        },
        py::arg("pos"), py::arg("target"),
        py::arg("ratios") = std::vector<double>(10, 1.0),
        py::arg("use_imbalance") = true, py::arg("use_distance") = true,
        "Placement reward for an agent position against the label position.");

    m.def(
        "focal_loss",
        [](const std::vector<double>& probabilities, int group, double tau) {
            Matrix p(1, probabilities.size());
            for (std::size_t j = 0; j < probabilities.size(); ++j)
                p(0, j) = probabilities[j];
            return focal_loss(p, group, tau);
        },
        py::arg("probabilities"), py::arg("group"), py::arg("tau") = 1.3);

    m.def(
        "mae",
        [](const std::vector<double>& predicted, const std::vector<double>& actual) {
            return mae(to_records(predicted, actual, {}));
        },
        py::arg("predicted"), py::arg("actual"));
    m.def(
        "cumulative_score",
        [](const std::vector<double>& predicted, const std::vector<double>& actual,
           double j) { return cumulative_score(to_records(predicted, actual, {}), j); },
        py::arg("predicted"), py::arg("actual"), py::arg("j"));
    m.def(
        "epsilon_error",
        [](const std::vector<double>& predicted, const std::vector<double>& actual,
           const std::vector<double>& sigma) {
            return epsilon_error(to_records(predicted, actual, sigma));
        },
        py::arg("predicted"), py::arg("actual"), py::arg("sigma"));
}
