#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "agegraph/config.hpp"
#include "agegraph/dataset.hpp"
#include "agegraph/errors.hpp"
#include "agegraph/model.hpp"
#include "agegraph/pipeline.hpp"
#include "agegraph/rl.hpp"
#include "agegraph/rng.hpp"
#include "agegraph/tape.hpp"
#include "doctest.h"

using namespace agegraph;

namespace {

namespace fs = std::filesystem;

std::string fresh_dir(const char* name) {
    fs::path p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

// small but non-degenerate settings so runs stay fast
PipelineConfig tiny_config() {
    PipelineConfig c = default_config();
    c.graph_threshold = 0.2;
    c.walk.walks_per_node = 2;
    c.walk.walk_length = 6;
    c.heads = 2;
    c.stack.depth = 2;
    c.stack.width = 8;
    c.rl.qnet.hidden = 16;
    c.rl.episodes = 2;
    c.rl.horizon = 4;
    c.rl.batch = 8;
    c.rl.capacity = 64;
    c.rl.sync_interval = 5;
    c.epochs = 2;
    c.synth.n_samples = 16;
    c.synth.nodes = 5;
    c.synth.feat_width = 6;
    return c;
}

LabeledSample probe_sample(uint64_t seed) {
    Rng rng(seed);
    LabeledSample s;
    s.id = "probe" + std::to_string(seed);
    s.age = static_cast<int>(rng.uniform_int(100));
    s.node_features = Matrix::glorot(6, 6, rng);
    return s;
}

}  // namespace

TEST_CASE("walk seed is the fnv-1a hash of the id") {
    // reference values of the 64-bit fnv-1a
    CHECK(sample_walk_seed("") == 14695981039346656037ull);
    CHECK(sample_walk_seed("a") == 0xaf63dc4c8601ec8cull);
    CHECK(sample_walk_seed("foobar") == 0x85944171f73967e8ull);
    CHECK(sample_walk_seed("s00001") != sample_walk_seed("s00002"));
}

TEST_CASE("head dim falls back to width over heads with a floor of one") {
    PipelineConfig c = default_config();
    c.heads = 4;
    c.dk = 0;
    CHECK(head_dim(c, 32) == 8);
    CHECK(head_dim(c, 34) == 8);  // floored division
    CHECK(head_dim(c, 2) == 1);   // never zero
    c.dk = 5;
    CHECK(head_dim(c, 32) == 5);  // explicit value wins
}

TEST_CASE("graph enrichment is a pure function of the record") {
    PipelineConfig cfg = tiny_config();
    LabeledSample s = probe_sample(3);

    FaceGraph a = enrich_sample_graph(s, cfg);
    FaceGraph b = enrich_sample_graph(s, cfg);
    REQUIRE(a.node_count() == b.node_count());
    for (std::size_t i = 0; i < a.node_count(); ++i)
        for (std::size_t j = 0; j < a.node_count(); ++j)
            CHECK(a.adjacency(i, j) == b.adjacency(i, j));

    // the id seeds the walks, so renaming the sample can move weights
    LabeledSample renamed = s;
    renamed.id = "other";
    FaceGraph c = enrich_sample_graph(renamed, cfg);
    REQUIRE(c.node_count() == a.node_count());

    // with walks disabled enrichment reduces to the threshold graph
    PipelineConfig no_walk = cfg;
    no_walk.walk_enabled = false;
    FaceGraph base = build_initial_graph(s.node_features, cfg.graph_threshold);
    FaceGraph d = enrich_sample_graph(s, no_walk);
    for (std::size_t i = 0; i < d.node_count(); ++i)
        for (std::size_t j = 0; j < d.node_count(); ++j)
            CHECK(d.adjacency(i, j) == base.adjacency(i, j));

    // walk enrichment never removes an edge
    for (std::size_t i = 0; i < a.node_count(); ++i)
        for (std::size_t j = 0; j < a.node_count(); ++j)
            if (base.adjacency(i, j) > 0.0) CHECK(a.adjacency(i, j) > 0.0);
}

TEST_CASE("model registry follows the attention switch") {
    PipelineConfig cfg = tiny_config();
    Rng rng(5);
    ParamStore with;
    init_model_params(with, cfg, 6, rng);
    CHECK(with.has("attn.h0.wq"));
    CHECK(with.has("attn.h1.wk"));
    CHECK_FALSE(with.has("attn.h2.wq"));  // only cfg.heads heads
    CHECK(with.has("stack.win"));
    CHECK(with.has("q.head_q.w"));
    // projections are feat_width x head_dim
    CHECK(with.value("attn.h0.wq").rows() == 6);
    CHECK(with.value("attn.h0.wq").cols() == head_dim(cfg, 6));

    PipelineConfig off = cfg;
    off.attention_enabled = false;
    Rng rng2(5);
    ParamStore without;
    init_model_params(without, off, 6, rng2);
    CHECK_FALSE(without.has("attn.h0.wq"));
    CHECK(without.has("stack.win"));
}

TEST_CASE("taped embedding and losses agree with the plain forward") {
    PipelineConfig cfg = tiny_config();
    LabeledSample s = probe_sample(7);
    FaceGraph g = enrich_sample_graph(s, cfg);

    Rng rng(11);
    ParamStore store;
    init_model_params(store, cfg, 6, rng);

    Matrix plain = compute_embedding(store, g, cfg);
    REQUIRE(plain.rows() == 1);
    REQUIRE(plain.cols() == cfg.stack.width);

    Tape tape;
    auto emb = embedding_tape(tape, store, g, cfg);
    const Matrix& taped = tape.value(emb);
    REQUIRE(taped.rows() == 1);
    REQUIRE(taped.cols() == cfg.stack.width);
    for (std::size_t k = 0; k < plain.cols(); ++k)
        CHECK(taped(0, k) == doctest::Approx(plain(0, k)).epsilon(1e-12));

    // the full loss adds exactly a 0.1 tap on the summed action values
    GridPosition probe{4, 4};
    Tape t_warm, t_full;
    double warm = t_warm.scalar(warm_loss_tape(t_warm, store, g, cfg, s.age, probe));
    double full = t_full.scalar(full_loss_tape(t_full, store, g, cfg, s.age, probe));
    QOutput q = q_forward(store, plain, probe);
    double qsum = 0.0;
    for (std::size_t a = 0; a < q.q.cols(); ++a) qsum += q.q(0, a);
    CHECK(full - warm == doctest::Approx(0.1 * qsum).epsilon(1e-9));
    CHECK(std::isfinite(warm));
    CHECK(warm >= 0.0);  // focal and abs terms are both nonnegative
}

TEST_CASE("synth run writes a parseable dataset and census") {
    PipelineConfig cfg = tiny_config();
    cfg.synth.group_weights = {3.0, 1.0};
    std::string out = fresh_dir("agp_synth");
    std::string dataset = run_synth(cfg, out);

    CHECK(dataset == out + "/dataset.txt");
    auto samples = read_samples(dataset);
    CHECK(samples.size() == 16);
    for (const auto& s : samples) CHECK(s.age <= 19);

    std::string census = slurp(out + "/synth_report.txt");
    CHECK(census.find("samples 16") == 0);
    CHECK(census.find("group 0 count ") != std::string::npos);
    // the config echo lands beside the dataset
    CHECK(slurp(out + "/config_used.txt") == config_echo(cfg));
}

TEST_CASE("training is deterministic in config and seed") {
    PipelineConfig cfg = tiny_config();
    std::string data_dir = fresh_dir("agp_data");
    std::string dataset = run_synth(cfg, data_dir);

    std::string out1 = fresh_dir("agp_train1");
    std::string out2 = fresh_dir("agp_train2");
    TrainResult r1 = run_train(cfg, dataset, out1);
    TrainResult r2 = run_train(cfg, dataset, out2);

    CHECK(r1.warm_loss.size() == cfg.epochs);
    CHECK(r1.episode_reward.size() == cfg.rl.episodes);
    for (double v : r1.warm_loss) CHECK(std::isfinite(v));

    // byte-identical artifacts run to run
    CHECK(slurp(out1 + "/checkpoint.agc") == slurp(out2 + "/checkpoint.agc"));
    CHECK(slurp(out1 + "/train_report.txt") == slurp(out2 + "/train_report.txt"));
    CHECK(slurp(out1 + "/val_report.txt") == slurp(out2 + "/val_report.txt"));
    CHECK(slurp(out1 + "/val_metrics.json") == slurp(out2 + "/val_metrics.json"));
    CHECK(slurp(out1 + "/loss_trace.tsv") == slurp(out2 + "/loss_trace.tsv"));

    // a different seed moves the artifacts
    PipelineConfig other = cfg;
    other.seed = cfg.seed + 1;
    std::string out3 = fresh_dir("agp_train3");
    run_train(other, dataset, out3);
    CHECK(slurp(out1 + "/checkpoint.agc") != slurp(out3 + "/checkpoint.agc"));

    // predictions stay in the representable age range
    for (auto [j, pct] : r1.test_report.cs_curve) {
        CHECK(pct >= 0.0);
        CHECK(pct <= 100.0);
    }
}

TEST_CASE("zero epochs skips both phases and checkpoints the raw init") {
    PipelineConfig cfg = tiny_config();
    cfg.epochs = 0;
    std::string data_dir = fresh_dir("agp_data0");
    std::string dataset = run_synth(cfg, data_dir);

    std::string out1 = fresh_dir("agp_zero1");
    TrainResult r = run_train(cfg, dataset, out1);
    CHECK(r.warm_loss.empty());
    CHECK(r.episode_reward.empty());

    // the checkpoint equals the trained one only at epochs 0; training moves it
    std::string out2 = fresh_dir("agp_zero2");
    run_train(cfg, dataset, out2);
    CHECK(slurp(out1 + "/checkpoint.agc") == slurp(out2 + "/checkpoint.agc"));

    PipelineConfig trained = cfg;
    trained.epochs = 1;
    std::string out3 = fresh_dir("agp_zero3");
    run_train(trained, dataset, out3);
    CHECK(slurp(out1 + "/checkpoint.agc") != slurp(out3 + "/checkpoint.agc"));
}

TEST_CASE("degenerate split validates on the training set") {
    PipelineConfig cfg = tiny_config();
    cfg.train_fraction = 1.0;
    cfg.synth.n_samples = 8;
    std::string data_dir = fresh_dir("agp_data1");
    std::string dataset = run_synth(cfg, data_dir);
    std::string out = fresh_dir("agp_full_split");
    TrainResult r = run_train(cfg, dataset, out);
    CHECK(r.test_report.sample_count == r.train_report.sample_count);
    CHECK(r.test_report.mae_value == doctest::Approx(r.train_report.mae_value));
}

TEST_CASE("eval reproduces the training-time validation verdict") {
    PipelineConfig cfg = tiny_config();
    std::string data_dir = fresh_dir("agp_data2");
    std::string dataset = run_synth(cfg, data_dir);
    std::string train_out = fresh_dir("agp_train_eval");
    TrainResult r = run_train(cfg, dataset, train_out);

    // evaluating the full dataset twice gives byte-identical reports
    std::string eval1 = fresh_dir("agp_eval1");
    std::string eval2 = fresh_dir("agp_eval2");
    MetricsReport m1 = run_eval(cfg, r.checkpoint_path, dataset, eval1);
    MetricsReport m2 = run_eval(cfg, r.checkpoint_path, dataset, eval2);
    CHECK(m1.sample_count == 16);
    CHECK(m1.mae_value == doctest::Approx(m2.mae_value));
    CHECK(slurp(eval1 + "/eval_report.txt") == slurp(eval2 + "/eval_report.txt"));
    CHECK(slurp(eval1 + "/eval_metrics.json") == slurp(eval2 + "/eval_metrics.json"));

    // a structurally different model cannot consume the checkpoint
    PipelineConfig wider = cfg;
    wider.stack.width = 12;
    std::string eval3 = fresh_dir("agp_eval3");
    CHECK_THROWS_AS(run_eval(wider, r.checkpoint_path, dataset, eval3),
                    CompatibilityError);
}

TEST_CASE("mixed feature widths are rejected with the sample named") {
    PipelineConfig cfg = tiny_config();
    std::string dir = fresh_dir("agp_mixed");
    std::string dataset = dir + "/mixed.txt";
    {
        std::ofstream out(dataset);
        out << "sample ok\nage 30\nnodes 2 3\n0 1 2\n3 4 5\nend\n";
        out << "sample narrow\nage 40\nnodes 2 2\n0 1\n2 3\nend\n";
    }
    try {
        run_train(cfg, dataset, fresh_dir("agp_mixed_out"));
        FAIL_CHECK("expected IngestionError");
    } catch (const IngestionError& e) {
        CHECK(std::string(e.what()).find("narrow") != std::string::npos);
    }
}

TEST_CASE("model gradcheck passes at the preset") {
    PipelineConfig cfg = default_config();
    std::string out = fresh_dir("agp_gradcheck");
    GradCheckResult res = run_gradcheck(cfg, out, 1e-4);
    CHECK(res.passed);
    CHECK(res.kink_safe);
    CHECK(res.deterministic);
    CHECK(res.max_rel_error < 1e-4);
    std::string report = slurp(out + "/gradcheck_report.txt");
    CHECK(report.find("passed yes") != std::string::npos);
    CHECK(report.find("tolerance 1.0e-04") != std::string::npos);
}

TEST_CASE("variants adjust exactly the advertised knob") {
    PipelineConfig cfg = tiny_config();
    CHECK(ablation_variant_names().size() == 9);

    CHECK_FALSE(apply_variant(cfg, "no-LRC").attention_enabled);
    CHECK(apply_variant(cfg, "no-DFE").stack.mode == StackMode::Vanilla);
    CHECK(apply_variant(cfg, "ResGCN").stack.mode == StackMode::ResGcn);
    CHECK_FALSE(apply_variant(cfg, "no-RW").walk_enabled);
    CHECK(apply_variant(cfg, "BFS-only").walk.p == doctest::Approx(0.25));
    CHECK(apply_variant(cfg, "BFS-only").walk.q == doctest::Approx(4.0));
    CHECK(apply_variant(cfg, "DFS-only").walk.p == doctest::Approx(4.0));
    CHECK(apply_variant(cfg, "DFS-only").walk.q == doctest::Approx(0.25));
    CHECK_FALSE(apply_variant(cfg, "no-imbalance").rl.reward.use_imbalance);
    CHECK_FALSE(apply_variant(cfg, "no-distance").rl.reward.use_distance);
    CHECK(apply_variant(cfg, "one_shot").rl.one_shot);
    // untouched knobs survive
    CHECK(apply_variant(cfg, "no-LRC").stack.depth == cfg.stack.depth);

    CHECK_THROWS_AS(apply_variant(cfg, "no-such"), ConfigError);
}

TEST_CASE("ablation trains the baseline plus each requested variant") {
    PipelineConfig cfg = tiny_config();
    cfg.epochs = 1;
    cfg.rl.episodes = 1;
    cfg.synth.n_samples = 8;
    std::string data_dir = fresh_dir("agp_data3");
    std::string dataset = run_synth(cfg, data_dir);

    std::string out = fresh_dir("agp_ablate");
    auto rows = run_ablation(cfg, {"no-RW", "one_shot"}, dataset, out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].name == "full");
    CHECK(rows[1].name == "no-RW");
    CHECK(rows[2].name == "one_shot");
    for (const auto& row : rows) {
        CHECK(std::isfinite(row.mae_value));
        CHECK(fs::exists(fs::path(out) / row.name / "checkpoint.agc"));
    }
    std::string table = slurp(out + "/ablation_report.txt");
    CHECK(table.find("variant\tmae\tcs5") == 0);
    CHECK(table.find("no-RW") != std::string::npos);

    // unknown names fail before any training happens
    std::string out2 = fresh_dir("agp_ablate_bad");
    CHECK_THROWS_AS(run_ablation(cfg, {"no-RW", "bogus"}, dataset, out2),
                    ConfigError);
    CHECK_FALSE(fs::exists(fs::path(out2) / "full"));
}
