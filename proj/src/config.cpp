#include "agegraph/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "agegraph/errors.hpp"

namespace agegraph {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: " + key + " wants a number, got '" + v + "'");
    }
}

long parse_long(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        long n = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError("config: " + key + " wants an integer, got '" + v + "'");
    }
}

std::size_t parse_count(const std::string& key, const std::string& v, long min_val) {
    long n = parse_long(key, v);
    if (n < min_val)
        throw ConfigError("config: " + key + " must be >= " + std::to_string(min_val));
    return static_cast<std::size_t>(n);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    throw ConfigError("config: " + key + " wants true/false, got '" + v + "'");
}

std::vector<double> parse_weights(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError("config: " + key + " has an empty weight entry");
        out.push_back(parse_double(key, item));
    }
    return out;
}

void apply(PipelineConfig& c, const std::string& key, const std::string& value) {
    if (key == "seed") {
        long s = parse_long(key, value);
        if (s < 0) throw ConfigError("config: seed must be >= 0");
        c.seed = static_cast<uint64_t>(s);
    } else if (key == "graph.threshold") {
        c.graph_threshold = parse_double(key, value);
        if (c.graph_threshold < -1.0 || c.graph_threshold > 1.0)
            throw ConfigError("config: graph.threshold outside [-1,1]");
    } else if (key == "graph.patches_per_side") {
        c.patches_per_side = parse_count(key, value, 1);
    } else if (key == "walk.enabled") {
        c.walk_enabled = parse_bool(key, value);
    } else if (key == "walk.p") {
        c.walk.p = parse_double(key, value);
        if (c.walk.p <= 0.0) throw ConfigError("config: walk.p must be positive");
    } else if (key == "walk.q") {
        c.walk.q = parse_double(key, value);
        if (c.walk.q <= 0.0) throw ConfigError("config: walk.q must be positive");
    } else if (key == "walk.walks_per_node") {
        c.walk.walks_per_node = parse_count(key, value, 1);
    } else if (key == "walk.length") {
        c.walk.walk_length = parse_count(key, value, 2);
    } else if (key == "walk.window") {
        c.walk.window = parse_count(key, value, 1);
    } else if (key == "walk.tau") {
        c.walk_tau = parse_double(key, value);
        if (c.walk_tau < -1.0 || c.walk_tau > 1.0)
            throw ConfigError("config: walk.tau outside [-1,1]");
    } else if (key == "attention.enabled") {
        c.attention_enabled = parse_bool(key, value);
    } else if (key == "attention.heads") {
        c.heads = parse_count(key, value, 1);
    } else if (key == "attention.dk") {
        c.dk = parse_count(key, value, 0);
    } else if (key == "attention.hadamard") {
        c.hadamard = parse_bool(key, value);
    } else if (key == "gcn.depth") {
        c.stack.depth = parse_count(key, value, 1);
    } else if (key == "gcn.width") {
        c.stack.width = parse_count(key, value, 1);
    } else if (key == "gcn.beta_min") {
        c.stack.beta_min = parse_double(key, value);
        if (c.stack.beta_min < 0.0 || c.stack.beta_min > 1.0)
            throw ConfigError("config: gcn.beta_min outside [0,1]");
    } else if (key == "gcn.mode") {
        if (value == "full")
            c.stack.mode = StackMode::Full;
        else if (value == "vanilla")
            c.stack.mode = StackMode::Vanilla;
        else if (value == "resgcn")
            c.stack.mode = StackMode::ResGcn;
        else
            throw ConfigError("config: gcn.mode must be full, vanilla, or resgcn");
    } else if (key == "gcn.res_alpha") {
        c.stack.res_alpha = parse_double(key, value);
        if (c.stack.res_alpha < 0.0 || c.stack.res_alpha > 1.0)
            throw ConfigError("config: gcn.res_alpha outside [0,1]");
    } else if (key == "rl.gamma") {
        c.rl.gamma = parse_double(key, value);
        if (c.rl.gamma <= 0.0 || c.rl.gamma >= 1.0)
            throw ConfigError("config: rl.gamma must lie in (0,1)");
    } else if (key == "rl.eps_start") {
        c.rl.eps_start = parse_double(key, value);
        if (c.rl.eps_start < 0.0 || c.rl.eps_start > 1.0)
            throw ConfigError("config: rl.eps_start outside [0,1]");
    } else if (key == "rl.eps_end") {
        c.rl.eps_end = parse_double(key, value);
        if (c.rl.eps_end < 0.0 || c.rl.eps_end > 1.0)
            throw ConfigError("config: rl.eps_end outside [0,1]");
    } else if (key == "rl.horizon") {
        c.rl.horizon = parse_count(key, value, 1);
    } else if (key == "rl.sync_interval") {
        c.rl.sync_interval = parse_count(key, value, 1);
    } else if (key == "rl.capacity") {
        c.rl.capacity = parse_count(key, value, 1);
    } else if (key == "rl.batch") {
        c.rl.batch = parse_count(key, value, 1);
    } else if (key == "rl.lambda") {
        c.rl.lambda = parse_double(key, value);
        if (c.rl.lambda < 0.0) throw ConfigError("config: rl.lambda must be >= 0");
    } else if (key == "rl.eta") {
        c.rl.eta = parse_double(key, value);
        if (c.rl.eta < 0.0 || c.rl.eta > 1.0)
            throw ConfigError("config: rl.eta outside [0,1]");
    } else if (key == "rl.tau_focal") {
        c.rl.tau_focal = parse_double(key, value);
        if (c.rl.tau_focal < 0.0) throw ConfigError("config: rl.tau_focal must be >= 0");
    } else if (key == "rl.episodes") {
        c.rl.episodes = parse_count(key, value, 0);
    } else if (key == "rl.one_shot") {
        c.rl.one_shot = parse_bool(key, value);
    } else if (key == "rl.use_imbalance") {
        c.rl.reward.use_imbalance = parse_bool(key, value);
    } else if (key == "rl.use_distance") {
        c.rl.reward.use_distance = parse_bool(key, value);
    } else if (key == "rl.hidden") {
        c.rl.qnet.hidden = parse_count(key, value, 1);
    } else if (key == "optimizer.lr") {
        c.adam.lr = parse_double(key, value);
        if (c.adam.lr < 0.0) throw ConfigError("config: optimizer.lr must be >= 0");
    } else if (key == "optimizer.weight_decay") {
        c.adam.weight_decay = parse_double(key, value);
        if (c.adam.weight_decay < 0.0)
            throw ConfigError("config: optimizer.weight_decay must be >= 0");
    } else if (key == "optimizer.beta1") {
        c.adam.beta1 = parse_double(key, value);
        if (c.adam.beta1 < 0.0 || c.adam.beta1 >= 1.0)
            throw ConfigError("config: optimizer.beta1 outside [0,1)");
    } else if (key == "optimizer.beta2") {
        c.adam.beta2 = parse_double(key, value);
        if (c.adam.beta2 < 0.0 || c.adam.beta2 >= 1.0)
            throw ConfigError("config: optimizer.beta2 outside [0,1)");
    } else if (key == "optimizer.epochs") {
        c.epochs = parse_count(key, value, 0);
    } else if (key == "train.split") {
        c.train_fraction = parse_double(key, value);
        if (c.train_fraction <= 0.0 || c.train_fraction > 1.0)
            throw ConfigError("config: train.split must lie in (0,1]");
    } else if (key == "report.raw_epsilon") {
        c.raw_epsilon = parse_bool(key, value);
    } else if (key == "synth.samples") {
        c.synth.n_samples = parse_count(key, value, 1);
    } else if (key == "synth.nodes") {
        c.synth.nodes = parse_count(key, value, 1);
    } else if (key == "synth.features") {
        c.synth.feat_width = parse_count(key, value, 1);
    } else if (key == "synth.noise") {
        c.synth.noise = parse_double(key, value);
        if (c.synth.noise < 0.0) throw ConfigError("config: synth.noise must be >= 0");
    } else if (key == "synth.weights") {
        c.synth.group_weights = parse_weights(key, value);
    } else if (key == "synth.sigma") {
        c.synth.with_sigma = parse_bool(key, value);
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

PipelineConfig default_config() { return PipelineConfig{}; }

PipelineConfig parse_config(const std::string& text) {
    PipelineConfig cfg;
    cfg.source_text = text;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value', got '" + t + "'");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty key or value");
        apply(cfg, key, value);
    }
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void override_seed(PipelineConfig& cfg, uint64_t seed) {
    cfg.seed = seed;
    if (!cfg.source_text.empty() && cfg.source_text.back() != '\n')
        cfg.source_text += "\n";
    cfg.source_text += "# command-line override\nseed = " + std::to_string(seed) + "\n";
}

std::string render_config(const PipelineConfig& c) {
    std::ostringstream out;
    out << "seed = " << c.seed << "\n";
    out << "graph.threshold = " << fmt_double(c.graph_threshold) << "\n";
    out << "graph.patches_per_side = " << c.patches_per_side << "\n";
    out << "walk.enabled = " << (c.walk_enabled ? "true" : "false") << "\n";
    out << "walk.p = " << fmt_double(c.walk.p) << "\n";
    out << "walk.q = " << fmt_double(c.walk.q) << "\n";
    out << "walk.walks_per_node = " << c.walk.walks_per_node << "\n";
    out << "walk.length = " << c.walk.walk_length << "\n";
    out << "walk.window = " << c.walk.window << "\n";
    out << "walk.tau = " << fmt_double(c.walk_tau) << "\n";
    out << "attention.enabled = " << (c.attention_enabled ? "true" : "false") << "\n";
    out << "attention.heads = " << c.heads << "\n";
    out << "attention.dk = " << c.dk << "\n";
    out << "attention.hadamard = " << (c.hadamard ? "true" : "false") << "\n";
    out << "gcn.depth = " << c.stack.depth << "\n";
    out << "gcn.width = " << c.stack.width << "\n";
    out << "gcn.beta_min = " << fmt_double(c.stack.beta_min) << "\n";
    out << "gcn.mode = "
        << (c.stack.mode == StackMode::Full
                ? "full"
                : c.stack.mode == StackMode::Vanilla ? "vanilla" : "resgcn")
        << "\n";
    out << "gcn.res_alpha = " << fmt_double(c.stack.res_alpha) << "\n";
    out << "rl.gamma = " << fmt_double(c.rl.gamma) << "\n";
    out << "rl.eps_start = " << fmt_double(c.rl.eps_start) << "\n";
    out << "rl.eps_end = " << fmt_double(c.rl.eps_end) << "\n";
    out << "rl.horizon = " << c.rl.horizon << "\n";
    out << "rl.sync_interval = " << c.rl.sync_interval << "\n";
    out << "rl.capacity = " << c.rl.capacity << "\n";
    out << "rl.batch = " << c.rl.batch << "\n";
    out << "rl.lambda = " << fmt_double(c.rl.lambda) << "\n";
    out << "rl.eta = " << fmt_double(c.rl.eta) << "\n";
    out << "rl.tau_focal = " << fmt_double(c.rl.tau_focal) << "\n";
    out << "rl.episodes = " << c.rl.episodes << "\n";
    out << "rl.one_shot = " << (c.rl.one_shot ? "true" : "false") << "\n";
    out << "rl.use_imbalance = " << (c.rl.reward.use_imbalance ? "true" : "false")
        << "\n";
    out << "rl.use_distance = " << (c.rl.reward.use_distance ? "true" : "false")
        << "\n";
    out << "rl.hidden = " << c.rl.qnet.hidden << "\n";
    out << "optimizer.lr = " << fmt_double(c.adam.lr) << "\n";
    out << "optimizer.weight_decay = " << fmt_double(c.adam.weight_decay) << "\n";
    out << "optimizer.beta1 = " << fmt_double(c.adam.beta1) << "\n";
    out << "optimizer.beta2 = " << fmt_double(c.adam.beta2) << "\n";
    out << "optimizer.epochs = " << c.epochs << "\n";
    out << "train.split = " << fmt_double(c.train_fraction) << "\n";
    out << "report.raw_epsilon = " << (c.raw_epsilon ? "true" : "false") << "\n";
    out << "synth.samples = " << c.synth.n_samples << "\n";
    out << "synth.nodes = " << c.synth.nodes << "\n";
    out << "synth.features = " << c.synth.feat_width << "\n";
    out << "synth.noise = " << fmt_double(c.synth.noise) << "\n";
    if (!c.synth.group_weights.empty()) {
        out << "synth.weights = ";
        for (std::size_t i = 0; i < c.synth.group_weights.size(); ++i) {
            if (i) out << ",";
            out << fmt_double(c.synth.group_weights[i]);
        }
        out << "\n";
    }
    out << "synth.sigma = " << (c.synth.with_sigma ? "true" : "false") << "\n";
    return out.str();
}

std::string config_echo(const PipelineConfig& cfg) {
    return cfg.source_text.empty() ? render_config(cfg) : cfg.source_text;
}

}  // namespace agegraph
