#include "agegraph/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "agegraph/errors.hpp"
#include "agegraph/rng.hpp"

namespace agegraph {

namespace {

[[noreturn]] void bad_record(const std::string& id, const std::string& what) {
    throw IngestionError("sample '" + (id.empty() ? "<unnamed>" : id) + "': " + what);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool next_content_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;  // blank
        if (line[start] == '#') continue;          // comment
        return true;
    }
    return false;
}

}  // namespace

std::vector<LabeledSample> read_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open dataset file: " + path);

    std::vector<LabeledSample> out;
    std::string line;
    while (next_content_line(in, line)) {
        std::istringstream head(line);
        std::string key, id;
        head >> key >> id;
        if (key != "sample" || id.empty())
            throw IngestionError("expected 'sample <id>', got: " + line);

        LabeledSample s;
        s.id = id;

        if (!next_content_line(in, line)) bad_record(id, "truncated before age");
        {
            std::istringstream ls(line);
            std::string k;
            long age = 0;
            ls >> k >> age;
            if (k != "age" || ls.fail()) bad_record(id, "expected 'age <int>'");
            if (age < 0) bad_record(id, "negative age " + std::to_string(age));
            s.age = age > 99 ? 99 : static_cast<int>(age);
        }

        if (!next_content_line(in, line)) bad_record(id, "truncated before nodes");
        {
            std::istringstream ls(line);
            std::string k;
            ls >> k;
            if (k == "sigma") {
                double sig = 0.0;
                ls >> sig;
                if (ls.fail() || sig <= 0.0)
                    bad_record(id, "sigma must be a positive float");
                s.sigma = sig;
                if (!next_content_line(in, line)) bad_record(id, "truncated before nodes");
                ls = std::istringstream(line);
                ls >> k;
            }
            long n = 0, m = 0;
            ls >> n >> m;
            if (k != "nodes" || ls.fail() || n < 1 || m < 1)
                bad_record(id, "expected 'nodes <N> <M>' with positive counts");
            s.node_features = Matrix(static_cast<std::size_t>(n),
                                     static_cast<std::size_t>(m));
            for (long i = 0; i < n; ++i) {
                if (!next_content_line(in, line))
                    bad_record(id, "truncated inside feature rows");
                std::istringstream row(line);
                for (long j = 0; j < m; ++j) {
                    double v = 0.0;
                    row >> v;
                    if (row.fail())
                        bad_record(id, "feature row " + std::to_string(i) +
                                           " is short or non-numeric");
                    s.node_features(static_cast<std::size_t>(i),
                                    static_cast<std::size_t>(j)) = v;
                }
                double extra;
                if (row >> extra)
                    bad_record(id, "feature row " + std::to_string(i) + " too long");
            }
            if (!s.node_features.all_finite())
                bad_record(id, "non-finite feature value");
        }

        if (!next_content_line(in, line) || line.find("end") == std::string::npos)
            bad_record(id, "missing 'end' terminator");
        for (const LabeledSample& prev : out)
            if (prev.id == id) bad_record(id, "duplicate sample id");
        out.push_back(std::move(s));
    }
    if (out.empty()) throw IngestionError("dataset file has no samples: " + path);
    return out;
}

void write_samples(const std::string& path, std::span<const LabeledSample> samples) {
    std::ofstream out(path);
    if (!out) throw IngestionError("cannot write dataset file: " + path);
    for (const LabeledSample& s : samples) {
        out << "sample " << s.id << "\n";
        out << "age " << s.age << "\n";
        if (s.sigma) out << "sigma " << fmt_double(*s.sigma) << "\n";
        out << "nodes " << s.node_features.rows() << " " << s.node_features.cols()
            << "\n";
        for (std::size_t i = 0; i < s.node_features.rows(); ++i) {
            for (std::size_t j = 0; j < s.node_features.cols(); ++j) {
                if (j) out << " ";
                out << fmt_double(s.node_features(i, j));
            }
            out << "\n";
        }
        out << "end\n";
    }
    if (!out) throw IngestionError("short write to dataset file: " + path);
}

std::vector<LabeledSample> generate_synthetic(const SyntheticSpec& spec,
                                              uint64_t seed) {
    if (spec.n_samples < 1) throw ConfigError("synth: n_samples must be >= 1");
    if (spec.nodes < 1 || spec.feat_width < 1)
        throw ConfigError("synth: nodes and feature width must be >= 1");
    if (spec.group_weights.size() > 10)
        throw ConfigError("synth: at most 10 group weights");
    std::vector<double> weights = spec.group_weights;
    if (weights.empty()) weights.assign(10, 1.0);
    double wsum = 0.0;
    for (double w : weights) {
        if (w < 0.0 || !std::isfinite(w))
            throw ConfigError("synth: group weights must be finite and >= 0");
        wsum += w;
    }
    if (wsum <= 0.0) throw ConfigError("synth: group weights sum to zero");
    if (spec.noise < 0.0) throw ConfigError("synth: negative noise scale");

    Rng rng(seed);
    // per-dataset basis, drawn before any sample so that equal ages give
    // equal noiseless features
    std::size_t n = spec.nodes, f = spec.feat_width;
    Matrix freq(n, f), phase(n, f);
    std::vector<double> slope(f);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < f; ++k) {
            freq(i, k) = rng.uniform(0.5, 3.0);
            phase(i, k) = rng.uniform(0.0, 2.0 * std::numbers::pi);
        }
    for (std::size_t k = 0; k < f; ++k) slope[k] = rng.uniform(0.5, 1.5);

    std::vector<LabeledSample> out;
    out.reserve(spec.n_samples);
    for (std::size_t s = 0; s < spec.n_samples; ++s) {
        double u = rng.uniform() * wsum;
        std::size_t group = weights.size() - 1;
        double acc = 0.0;
        for (std::size_t g = 0; g < weights.size(); ++g) {
            acc += weights[g];
            if (u < acc) {
                group = g;
                break;
            }
        }
        int age = static_cast<int>(10 * group + rng.uniform_int(10));
        double t = static_cast<double>(age) / 99.0;

        LabeledSample sample;
        char idbuf[24];
        std::snprintf(idbuf, sizeof(idbuf), "s%05zu", s);
        sample.id = idbuf;
        sample.age = age;
        if (spec.with_sigma) sample.sigma = rng.uniform(1.5, 3.0);
        sample.node_features = Matrix(n, f);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < f; ++k)
                sample.node_features(i, k) =
                    std::sin(2.0 * std::numbers::pi * freq(i, k) * t + phase(i, k)) +
                    slope[k] * t + spec.noise * rng.normal();
        out.push_back(std::move(sample));
    }
    return out;
}

std::pair<std::vector<LabeledSample>, std::vector<LabeledSample>> split_dataset(
    std::span<const LabeledSample> samples, double train_fraction, uint64_t seed) {
    if (train_fraction <= 0.0 || train_fraction > 1.0)
        throw ConfigError("split: train fraction must lie in (0,1]");
    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(Rng::mix(seed, 0x59717ull));
    rng.shuffle(order);
    std::size_t n_train = static_cast<std::size_t>(
        std::ceil(train_fraction * static_cast<double>(samples.size())));
    if (n_train > samples.size()) n_train = samples.size();
    std::pair<std::vector<LabeledSample>, std::vector<LabeledSample>> out;
    for (std::size_t i = 0; i < order.size(); ++i)
        (i < n_train ? out.first : out.second).push_back(samples[order[i]]);
    return out;
}

}  // namespace agegraph
