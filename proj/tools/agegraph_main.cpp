// Command-line front end: synth | train | eval | gradcheck | ablate.
// Exit codes: 0 ok, 2 config, 3 ingestion, 4 numeric, 5 failed check.
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "agegraph/config.hpp"
#include "agegraph/errors.hpp"
#include "agegraph/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIngestion = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitCheckFailed = 5;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    long seed = -1;  // -1: keep the config's seed
};

void add_common(CLI::App* cmd, CommonArgs& args, const std::string& default_out) {
    cmd->add_option("--config", args.config_path, "config file (key = value lines)");
    cmd->add_option("--seed", args.seed, "override the config seed")
        ->check(CLI::NonNegativeNumber);
    args.out_dir = default_out;
    cmd->add_option("--out", args.out_dir, "output directory");
}

agegraph::PipelineConfig make_config(const CommonArgs& args) {
    agegraph::PipelineConfig cfg = args.config_path.empty()
                                       ? agegraph::default_config()
                                       : agegraph::load_config(args.config_path);
    if (args.seed >= 0)
        agegraph::override_seed(cfg, static_cast<uint64_t>(args.seed));
    return cfg;
}

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(csv);
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph-based age estimation laboratory"};
    app.require_subcommand(1);

    CommonArgs synth_args, train_args, eval_args, grad_args, ablate_args;
    std::string train_data, eval_data, ablate_data, eval_ckpt, variants_csv;
    double grad_tol = 1e-4;

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    add_common(synth, synth_args, "runs/synth");

    CLI::App* train = app.add_subcommand("train", "train and checkpoint a model");
    add_common(train, train_args, "runs/train");
    train->add_option("--data", train_data, "dataset file")->required();

    CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    add_common(eval, eval_args, "runs/eval");
    eval->add_option("--data", eval_data, "dataset file")->required();
    eval->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required();

    CLI::App* grad = app.add_subcommand("gradcheck", "finite-difference model check");
    add_common(grad, grad_args, "runs/gradcheck");
    grad->add_option("--tol", grad_tol, "relative error tolerance");

    CLI::App* ablate = app.add_subcommand("ablate", "train component-ablated variants");
    add_common(ablate, ablate_args, "runs/ablate");
    ablate->add_option("--data", ablate_data, "dataset file")->required();
    ablate->add_option("--variants", variants_csv,
                       "comma-separated variant names (default: all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (synth->parsed()) {
            std::string path = agegraph::run_synth(make_config(synth_args),
                                                   synth_args.out_dir);
            std::printf("dataset written to %s\n", path.c_str());
        } else if (train->parsed()) {
            agegraph::TrainResult r = agegraph::run_train(make_config(train_args),
                                                          train_data,
                                                          train_args.out_dir);
            std::printf("val mae %.4f, checkpoint %s\n", r.test_report.mae_value,
                        r.checkpoint_path.c_str());
        } else if (eval->parsed()) {
            agegraph::MetricsReport rep = agegraph::run_eval(
                make_config(eval_args), eval_ckpt, eval_data, eval_args.out_dir);
            std::printf("mae %.4f over %ld samples\n", rep.mae_value,
                        rep.sample_count);
        } else if (grad->parsed()) {
            agegraph::GradCheckResult res = agegraph::run_gradcheck(
                make_config(grad_args), grad_args.out_dir, grad_tol);
            std::printf("gradcheck %s: max rel error %.3e (tol %.1e)\n",
                        res.passed ? "passed" : "FAILED", res.max_rel_error,
                        grad_tol);
            if (!res.passed) return kExitCheckFailed;
        } else if (ablate->parsed()) {
            std::vector<std::string> variants =
                variants_csv.empty() ? agegraph::ablation_variant_names()
                                     : split_csv(variants_csv);
            auto rows = agegraph::run_ablation(make_config(ablate_args), variants,
                                               ablate_data, ablate_args.out_dir);
            for (const auto& row : rows)
                std::printf("%-14s mae %.4f cs5 %.2f\n", row.name.c_str(),
                            row.mae_value, row.cs5);
        }
    } catch (const agegraph::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const agegraph::CompatibilityError& e) {
        std::fprintf(stderr, "compatibility error: %s\n", e.what());
        return kExitConfig;
    } catch (const agegraph::IngestionError& e) {
        std::fprintf(stderr, "ingestion error: %s\n", e.what());
        return kExitIngestion;
    } catch (const agegraph::NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return kExitNumeric;
    } catch (const agegraph::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitOther;
    }
    return kExitOk;
}
