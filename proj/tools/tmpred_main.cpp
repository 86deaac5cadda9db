// Command-line front end: synth, train, predict, evaluate, sweep, compare.
// Every output file is written together with a <file>.manifest.json that
// records the fully resolved configuration, input digests, and toolkit
// version, so any run can be reproduced from its manifest.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tmpred/dataio.hpp"
#include "tmpred/errors.hpp"
#include "tmpred/eval.hpp"
#include "tmpred/kernels.hpp"
#include "tmpred/lstm.hpp"
#include "tmpred/model_io.hpp"
#include "tmpred/tm.hpp"
#include "tmpred/version.hpp"

namespace {

using nlohmann::json;
using namespace tmpred;

// Exit codes, also listed under --help.
constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitDimension = 4;
constexpr int kExitData = 5;
constexpr int kExitDiverged = 6;
constexpr int kExitIo = 7;

int exit_code_for(const TmError& e) {
    switch (e.kind()) {
        case ErrorKind::config:
            return kExitUsage;
        case ErrorKind::parse:
            return kExitParse;
        case ErrorKind::dimension:
            return kExitDimension;
        case ErrorKind::training_diverged:
            return kExitDiverged;
        case ErrorKind::io:
            return kExitIo;
        default:
            return kExitData;
    }
}

constexpr const char* kExitCodeHelp =
    "Exit codes:\n"
    "  0 success\n"
    "  1 internal error\n"
    "  2 usage or configuration error\n"
    "  3 input parse error (message names the line)\n"
    "  4 dimension mismatch\n"
    "  5 data unusable (too short, degenerate, bad model)\n"
    "  6 training diverged (message names the epoch)\n"
    "  7 file I/O error\n";

std::string fnv1a64_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for digest");
    std::uint64_t h = 1469598103934665603ULL;
    char buf[65536];
    while (true) {
        in.read(buf, sizeof buf);
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (got < static_cast<std::streamsize>(sizeof buf)) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

// The fully resolved flag set of one run: every default made explicit, in
// both re-runnable argv form and as a key/value object for the manifest.
class ResolvedArgs {
public:
    explicit ResolvedArgs(const std::string& command) { argv_.push_back(command); }

    void add(const std::string& flag, long long v) { push(flag, std::to_string(v), json(v)); }
    void add(const std::string& flag, std::uint64_t v) { push(flag, std::to_string(v), json(v)); }
    void add(const std::string& flag, double v) { push(flag, format_double(v), json(v)); }
    void add(const std::string& flag, const std::string& v) { push(flag, v, json(v)); }
    void add_list(const std::string& flag, const std::vector<int>& vs) {
        std::string text;
        for (std::size_t i = 0; i < vs.size(); ++i) {
            if (i) text += ',';
            text += std::to_string(vs[i]);
        }
        push(flag, text, json(vs));
    }

    const std::vector<std::string>& argv() const { return argv_; }
    const json& config() const { return config_; }

private:
    void push(const std::string& flag, const std::string& text, json j) {
        argv_.push_back(flag);
        argv_.push_back(text);
        config_[flag.substr(2)] = std::move(j);
    }

    std::vector<std::string> argv_;
    json config_;
};

struct ManifestInput {
    std::string label;
    std::string path;
};

// One manifest next to every output file.
void write_manifests(const std::string& command, const ResolvedArgs& resolved,
                     const std::vector<ManifestInput>& inputs,
                     const std::vector<std::string>& outputs, const json& seed) {
    json in = json::object();
    for (const auto& i : inputs) {
        in[i.label] = {{"path", i.path}, {"fnv1a64", fnv1a64_hex(i.path)}};
    }
    const json manifest = {
        {"command", command},          {"version", kToolkitVersion},
        {"backend", kernels::backend_name()}, {"seed", seed},
        {"configuration", resolved.config()}, {"resolved_command", resolved.argv()},
        {"inputs", in},                {"outputs", outputs},
    };
    for (const auto& out : outputs) {
        const std::string path = out + ".manifest.json";
        std::ofstream f(path, std::ios::binary);
        if (!f) throw IoError("cannot open '" + path + "' for writing");
        f << manifest.dump(2) << '\n';
        if (!f) throw IoError("write failed for '" + path + "'");
    }
}

std::size_t resolve_train_len(std::size_t flag_value, std::size_t series_len) {
    return flag_value == 0 ? (series_len * 85) / 100 : flag_value;
}

// ---------------------------------------------------------------- synth ----

struct SynthFlags {
    std::string out;
    std::string config_file;
    SyntheticConfig cfg;  // flag targets; file values fill unset flags
    CLI::Option* o_nodes = nullptr;
    CLI::Option* o_slots = nullptr;
    CLI::Option* o_interval = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_diurnal = nullptr;
    CLI::Option* o_weekly = nullptr;
    CLI::Option* o_phi = nullptr;
    CLI::Option* o_sigma = nullptr;
    CLI::Option* o_spike = nullptr;
    CLI::Option* o_base_min = nullptr;
    CLI::Option* o_base_max = nullptr;
};

int run_synth(const SynthFlags& f) {
    SyntheticConfig cfg;
    std::vector<ManifestInput> inputs;
    if (!f.config_file.empty()) {
        cfg = parse_synthetic_config(f.config_file, cfg);
        inputs.push_back({"config", f.config_file});
    }
    // explicit flags win over the config file
    if (f.o_nodes->count()) cfg.n_nodes = f.cfg.n_nodes;
    if (f.o_slots->count()) cfg.n_slots = f.cfg.n_slots;
    if (f.o_interval->count()) cfg.interval_minutes = f.cfg.interval_minutes;
    if (f.o_seed->count()) cfg.seed = f.cfg.seed;
    if (f.o_diurnal->count()) cfg.diurnal_amplitude = f.cfg.diurnal_amplitude;
    if (f.o_weekly->count()) cfg.weekly_amplitude = f.cfg.weekly_amplitude;
    if (f.o_phi->count()) cfg.noise_phi = f.cfg.noise_phi;
    if (f.o_sigma->count()) cfg.noise_sigma = f.cfg.noise_sigma;
    if (f.o_spike->count()) cfg.spike_rate = f.cfg.spike_rate;
    if (f.o_base_min->count()) cfg.base_volume_range.first = f.cfg.base_volume_range.first;
    if (f.o_base_max->count()) cfg.base_volume_range.second = f.cfg.base_volume_range.second;
    cfg.validate();

    const TrafficSeries series = generate_synthetic(cfg);
    save_csv(series, f.out);

    ResolvedArgs r("synth");
    r.add("--nodes", static_cast<long long>(cfg.n_nodes));
    r.add("--slots", static_cast<long long>(cfg.n_slots));
    r.add("--interval", static_cast<long long>(cfg.interval_minutes));
    r.add("--seed", cfg.seed);
    r.add("--diurnal", cfg.diurnal_amplitude);
    r.add("--weekly", cfg.weekly_amplitude);
    r.add("--noise-phi", cfg.noise_phi);
    r.add("--noise-sigma", cfg.noise_sigma);
    r.add("--spike-rate", cfg.spike_rate);
    r.add("--base-min", cfg.base_volume_range.first);
    r.add("--base-max", cfg.base_volume_range.second);
    r.add("--out", f.out);
    write_manifests("synth", r, inputs, {f.out}, json(cfg.seed));

    std::cout << "wrote " << f.out << ": " << cfg.n_nodes << " nodes, " << cfg.n_slots
              << " slots\n";
    return kExitOk;
}

// ---------------------------------------------------------------- train ----

struct TrainFlags {
    std::string data;
    std::string out;
    std::string curve_out;  // default <out>.curve.csv
    int window = 6;
    std::vector<int> hidden = {100};
    int depth = 0;  // 0: take --hidden as given
    TrainConfig train;
    std::size_t train_len = 0;
};

int run_train(const TrainFlags& f) {
    std::vector<int> hidden = f.hidden;
    if (f.depth > 0) {
        if (hidden.size() == 1) {
            hidden.assign(static_cast<std::size_t>(f.depth), hidden[0]);
        } else if (hidden.size() != static_cast<std::size_t>(f.depth)) {
            throw ConfigError("--depth disagrees with the number of --hidden sizes");
        }
    }
    for (int h : hidden) {
        if (h <= 0) throw ConfigError("hidden sizes must be positive");
    }

    const TrafficSeries series = load_csv(f.data);
    const std::size_t train_len = resolve_train_len(f.train_len, series.size());
    if (train_len <= static_cast<std::size_t>(f.window) || train_len >= series.size()) {
        throw ConfigError("need window < train-len < series length (series has " +
                          std::to_string(series.size()) + " vectors)");
    }

    const Normalizer norm = fit_normalizer(series, 0, train_len);
    const WindowedDataset train_ds =
        build_windows(norm.normalize(series.subseries(0, train_len)), f.window);

    Network net = Network::create(static_cast<int>(series.n_flows()), hidden,
                                  static_cast<int>(series.n_flows()));
    const std::vector<double> curve = train(net, train_ds, f.train);

    const std::string curve_out = f.curve_out.empty() ? f.out + ".curve.csv" : f.curve_out;
    save_model(SavedModel{std::move(net), f.window, norm.scale()}, f.out);
    {
        std::ofstream c(curve_out, std::ios::binary);
        if (!c) throw IoError("cannot open '" + curve_out + "' for writing");
        c << "epoch,mse\n";
        for (std::size_t i = 0; i < curve.size(); ++i) {
            c << (i + 1) << ',' << format_double(curve[i]) << '\n';
        }
        if (!c) throw IoError("write failed for '" + curve_out + "'");
    }

    ResolvedArgs r("train");
    r.add("--data", f.data);
    r.add("--window", static_cast<long long>(f.window));
    r.add_list("--hidden", hidden);
    r.add("--epochs", static_cast<long long>(f.train.epochs));
    r.add("--lr", f.train.learning_rate);
    r.add("--clip", f.train.gradient_clip);
    r.add("--init-scale", f.train.init_scale);
    r.add("--seed", f.train.seed);
    r.add("--train-len", static_cast<long long>(train_len));
    r.add("--out", f.out);
    r.add("--curve-out", curve_out);
    write_manifests("train", r, {{"data", f.data}}, {f.out, curve_out}, json(f.train.seed));

    std::cout << "trained on " << train_len << " of " << series.size() << " vectors ("
              << series.n_flows() << " flows, window " << f.window << ")\n";
    std::cout << "final training mse " << format_double(curve.back()) << '\n';
    std::cout << "wrote " << f.out << '\n' << "wrote " << curve_out << '\n';
    return kExitOk;
}

// -------------------------------------------------------------- predict ----

struct PredictFlags {
    std::string model;
    std::string data;
    std::string out;
    int steps = 1;
};

int run_predict(const PredictFlags& f) {
    SavedModel sm = load_model(f.model);
    const TrafficSeries series = load_csv(f.data);
    const std::size_t k = series.n_flows();
    if (static_cast<std::size_t>(sm.net.n_inputs()) != k) {
        throw DimensionError("model expects " + std::to_string(sm.net.n_inputs()) +
                             " flows, data has " + std::to_string(k));
    }
    const int w = sm.window;
    if (series.size() < static_cast<std::size_t>(w)) {
        throw InsufficientDataError("need at least " + std::to_string(w) +
                                    " vectors to form a window");
    }

    const Normalizer norm(sm.normalizer_scale);
    std::vector<TrafficVector> window(series.vectors().end() - w, series.vectors().end());
    std::vector<TrafficVector> predicted;
    predicted.reserve(static_cast<std::size_t>(f.steps));
    std::vector<double> flat(static_cast<std::size_t>(w) * k);
    for (int step = 0; step < f.steps; ++step) {
        for (int t = 0; t < w; ++t) {
            for (std::size_t j = 0; j < k; ++j) {
                flat[static_cast<std::size_t>(t) * k + j] = norm.normalize(window[t].values[j]);
            }
        }
        const std::vector<double> out = network_forward(sm.net, flat, w);
        TrafficVector v;
        v.timestamp = window.back().timestamp + 1;
        v.values.resize(k);
        // volumes are nonnegative, so clamp before the value is emitted or
        // fed back for the next step
        for (std::size_t j = 0; j < k; ++j) {
            v.values[j] = std::max(0.0, norm.denormalize(out[j]));
        }
        predicted.push_back(v);
        window.erase(window.begin());
        window.push_back(std::move(v));
    }

    save_csv(TrafficSeries(series.n_nodes(), series.interval_minutes(), std::move(predicted)),
             f.out);

    ResolvedArgs r("predict");
    r.add("--model", f.model);
    r.add("--data", f.data);
    r.add("--steps", static_cast<long long>(f.steps));
    r.add("--out", f.out);
    write_manifests("predict", r, {{"model", f.model}, {"data", f.data}}, {f.out},
                    json(nullptr));

    std::cout << "wrote " << f.out << " (" << f.steps << " rows)\n";
    return kExitOk;
}

// ------------------------------------------------------------- evaluate ----

struct EvaluateFlags {
    std::string data;
    std::string out;
    std::string model;
    std::string method;
    std::string per_od_out;
    int window = 6;
    CLI::Option* o_window = nullptr;
    std::size_t train_len = 0;
    int arma_p = 1, arma_q = 0;
    int arima_p = 1, arima_d = 1, arima_q = 0;
    double hw_grid_step = 0.05;
};

int run_evaluate(const EvaluateFlags& f) {
    if (f.model.empty() == f.method.empty()) {
        throw ConfigError("give exactly one of --model and --method");
    }
    const TrafficSeries series = load_csv(f.data);
    const std::size_t size = series.size();

    Normalizer norm(1.0);
    int window = f.window;
    std::unique_ptr<OneStepPredictor> predictor;
    std::size_t train_len = resolve_train_len(f.train_len, size);
    std::vector<ManifestInput> inputs{{"data", f.data}};

    if (!f.model.empty()) {
        if (f.o_window->count()) {
            throw ConfigError("--window comes from the model; do not pass it with --model");
        }
        SavedModel sm = load_model(f.model);
        if (static_cast<std::size_t>(sm.net.n_inputs()) != series.n_flows()) {
            throw DimensionError("model expects " + std::to_string(sm.net.n_inputs()) +
                                 " flows, data has " + std::to_string(series.n_flows()));
        }
        window = sm.window;
        norm = Normalizer(sm.normalizer_scale);
        predictor = std::make_unique<NetworkPredictor>(std::move(sm.net), window);
        inputs.push_back({"model", f.model});
    }
    if (train_len <= static_cast<std::size_t>(window) || train_len >= size) {
        throw InsufficientDataError("split needs window < train_len < series length");
    }
    if (f.model.empty()) {
        norm = fit_normalizer(series, 0, train_len);
        const TrafficSeries normalized = norm.normalize(series);
        if (f.method == "naive") {
            predictor = std::make_unique<NaivePredictor>(series.n_flows());
        } else if (f.method == "holt_winters") {
            predictor = std::make_unique<TablePredictor>(
                make_hw_predictor(normalized, train_len, f.hw_grid_step));
        } else if (f.method == "arma") {
            predictor = std::make_unique<TablePredictor>(
                make_arma_predictor(normalized, train_len, f.arma_p, f.arma_q));
        } else if (f.method == "arar") {
            predictor = std::make_unique<TablePredictor>(make_arar_predictor(normalized, train_len));
        } else {
            predictor = std::make_unique<TablePredictor>(make_arima_predictor(
                normalized, train_len, f.arima_p, f.arima_d, f.arima_q));
        }
    }

    const TrafficSeries normalized = norm.normalize(series);
    const WindowedDataset test_ds =
        build_windows(normalized.subseries(train_len - window, size), window);
    const EvalReport rep = evaluate(*predictor, test_ds, norm);

    SweepResult res;
    res.axis_name = "method";
    SweepPoint pt;
    pt.label = rep.method_name;
    pt.mse_normalized = rep.overall_mse;
    pt.mse_raw = rep.overall_mse_raw;
    res.points.push_back(pt);
    write_sweep_csv(res, f.out);

    std::vector<std::string> outputs{f.out};
    if (!f.per_od_out.empty()) {
        std::ofstream po(f.per_od_out, std::ios::binary);
        if (!po) throw IoError("cannot open '" + f.per_od_out + "' for writing");
        po << "od,mse_normalized\n";
        for (std::size_t j = 0; j < rep.per_od_mse.size(); ++j) {
            po << j << ',' << format_double(rep.per_od_mse[j]) << '\n';
        }
        if (!po) throw IoError("write failed for '" + f.per_od_out + "'");
        outputs.push_back(f.per_od_out);
    }

    ResolvedArgs r("evaluate");
    r.add("--data", f.data);
    if (!f.model.empty()) {
        r.add("--model", f.model);
    } else {
        r.add("--method", f.method);
        r.add("--window", static_cast<long long>(window));
        if (f.method == "arma") {
            r.add("--arma-p", static_cast<long long>(f.arma_p));
            r.add("--arma-q", static_cast<long long>(f.arma_q));
        } else if (f.method == "arima") {
            r.add("--arima-p", static_cast<long long>(f.arima_p));
            r.add("--arima-d", static_cast<long long>(f.arima_d));
            r.add("--arima-q", static_cast<long long>(f.arima_q));
        } else if (f.method == "holt_winters") {
            r.add("--hw-grid-step", f.hw_grid_step);
        }
    }
    r.add("--train-len", static_cast<long long>(train_len));
    r.add("--out", f.out);
    if (!f.per_od_out.empty()) r.add("--per-od-out", f.per_od_out);
    write_manifests("evaluate", r, inputs, outputs, json(nullptr));

    std::cout << rep.method_name << ": normalized mse " << format_double(rep.overall_mse)
              << ", raw " << format_double(rep.overall_mse_raw) << ", " << rep.n_predictions
              << " windows\n";
    std::cout << "wrote " << f.out << '\n';
    return kExitOk;
}

// -------------------------------------------------------- sweep/compare ----

struct ExperimentFlags {
    std::string data;
    std::string out;
    std::string axis;  // sweep only: hidden | depth
    std::vector<int> values;
    int width = 100;  // depth axis: LSTM width per layer
    int window = 6;
    std::string timing = "off";
    SweepConfig cfg;
};

void print_points(const SweepResult& res) {
    for (const auto& pt : res.points) {
        if (pt.failed) {
            std::cout << res.axis_name << ' ' << pt.label << ": failed (" << pt.error << ")\n";
        } else {
            std::cout << res.axis_name << ' ' << pt.label << ": mse "
                      << format_double(pt.mse_normalized) << '\n';
        }
    }
}

void add_train_args(ResolvedArgs& r, const ExperimentFlags& f, std::size_t train_len) {
    r.add("--window", static_cast<long long>(f.window));
    r.add("--epochs", static_cast<long long>(f.cfg.train.epochs));
    r.add("--lr", f.cfg.train.learning_rate);
    r.add("--clip", f.cfg.train.gradient_clip);
    r.add("--init-scale", f.cfg.train.init_scale);
    r.add("--seed", f.cfg.train.seed);
    r.add("--train-len", static_cast<long long>(train_len));
    r.add("--timing", f.timing);
}

int run_sweep(ExperimentFlags& f) {
    f.cfg.record_timing = f.timing == "on";
    const TrafficSeries series = load_csv(f.data);
    const std::size_t train_len = resolve_train_len(f.cfg.train_len, series.size());

    const SweepResult res = f.axis == "hidden"
                                ? sweep_hidden_size(series, f.window, f.values, f.cfg)
                                : sweep_depth(series, f.window, f.values, f.width, f.cfg);
    write_sweep_csv(res, f.out);

    ResolvedArgs r("sweep");
    r.add("--data", f.data);
    r.add("--axis", f.axis);
    r.add_list("--values", f.values);
    if (f.axis == "depth") r.add("--width", static_cast<long long>(f.width));
    add_train_args(r, f, train_len);
    r.add("--out", f.out);
    write_manifests("sweep", r, {{"data", f.data}}, {f.out}, json(f.cfg.train.seed));

    print_points(res);
    std::cout << "wrote " << f.out << '\n';
    return kExitOk;
}

struct CompareFlags {
    ExperimentFlags ex;
};

int run_compare(CompareFlags& f) {
    f.ex.cfg.record_timing = f.ex.timing == "on";
    const TrafficSeries series = load_csv(f.ex.data);
    const std::size_t train_len = resolve_train_len(f.ex.cfg.train_len, series.size());

    const SweepResult res = compare_methods(series, f.ex.window, f.ex.cfg);
    write_sweep_csv(res, f.ex.out);

    ResolvedArgs r("compare");
    r.add("--data", f.ex.data);
    r.add("--lstm-hidden", static_cast<long long>(f.ex.cfg.lstm_hidden));
    r.add("--mlp-hidden", static_cast<long long>(f.ex.cfg.mlp_hidden));
    r.add("--arma-p", static_cast<long long>(f.ex.cfg.arma_p));
    r.add("--arma-q", static_cast<long long>(f.ex.cfg.arma_q));
    r.add("--arima-p", static_cast<long long>(f.ex.cfg.arima_p));
    r.add("--arima-d", static_cast<long long>(f.ex.cfg.arima_d));
    r.add("--arima-q", static_cast<long long>(f.ex.cfg.arima_q));
    r.add("--hw-grid-step", f.ex.cfg.hw_grid_step);
    add_train_args(r, f.ex, train_len);
    r.add("--out", f.ex.out);
    write_manifests("compare", r, {{"data", f.ex.data}}, {f.ex.out},
                    json(f.ex.cfg.train.seed));

    print_points(res);
    std::cout << "wrote " << f.ex.out << '\n';
    return kExitOk;
}

void add_training_options(CLI::App* cmd, TrainConfig& tc) {
    cmd->add_option("--epochs", tc.epochs, "Training epochs")
        ->check(CLI::Range(1, std::numeric_limits<int>::max()))
        ->capture_default_str();
    cmd->add_option("--lr", tc.learning_rate, "SGD learning rate")->capture_default_str();
    cmd->add_option("--clip", tc.gradient_clip, "Gradient norm clip, 0 disables")
        ->capture_default_str();
    cmd->add_option("--init-scale", tc.init_scale, "Uniform weight init half-range")
        ->capture_default_str();
    cmd->add_option("--seed", tc.seed, "Random seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Traffic-matrix prediction toolkit"};
    app.set_version_flag("--version", kToolkitVersion);
    app.footer(kExitCodeHelp);
    app.require_subcommand(1);

    SynthFlags sy;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic traffic-matrix CSV");
    synth->add_option("--out", sy.out, "Output CSV path")->required();
    synth->add_option("--config", sy.config_file, "key=value settings file; flags override");
    sy.o_nodes = synth->add_option("--nodes", sy.cfg.n_nodes, "Network nodes N (N*N flows)")
                     ->capture_default_str();
    sy.o_slots =
        synth->add_option("--slots", sy.cfg.n_slots, "Time slots T")->capture_default_str();
    sy.o_interval = synth->add_option("--interval", sy.cfg.interval_minutes, "Slot minutes")
                        ->capture_default_str();
    sy.o_seed = synth->add_option("--seed", sy.cfg.seed, "Random seed")->capture_default_str();
    sy.o_diurnal = synth->add_option("--diurnal", sy.cfg.diurnal_amplitude,
                                     "Daily cycle amplitude, relative")
                       ->capture_default_str();
    sy.o_weekly = synth->add_option("--weekly", sy.cfg.weekly_amplitude,
                                    "Weekly cycle amplitude, relative")
                      ->capture_default_str();
    sy.o_phi = synth->add_option("--noise-phi", sy.cfg.noise_phi, "AR(1) noise coefficient")
                   ->capture_default_str();
    sy.o_sigma = synth->add_option("--noise-sigma", sy.cfg.noise_sigma,
                                   "Noise innovation stddev, relative")
                     ->capture_default_str();
    sy.o_spike = synth->add_option("--spike-rate", sy.cfg.spike_rate,
                                   "Spike probability per slot per flow")
                     ->capture_default_str();
    sy.o_base_min = synth->add_option("--base-min", sy.cfg.base_volume_range.first,
                                      "Smallest per-flow base volume")
                        ->capture_default_str();
    sy.o_base_max = synth->add_option("--base-max", sy.cfg.base_volume_range.second,
                                      "Largest per-flow base volume")
                        ->capture_default_str();

    TrainFlags tr;
    auto* train = app.add_subcommand("train", "Train a forecasting model on a CSV series");
    train->add_option("--data", tr.data, "Input CSV path")->required();
    train->add_option("--out", tr.out, "Model output path")->required();
    train->add_option("--curve-out", tr.curve_out, "Loss curve CSV (default <out>.curve.csv)");
    train->add_option("--window", tr.window, "Learning window length W")
        ->check(CLI::Range(1, std::numeric_limits<int>::max()))
        ->capture_default_str();
    train->add_option("--hidden", tr.hidden, "Hidden layer sizes, comma separated")
        ->delimiter(',')
        ->capture_default_str();
    train->add_option("--depth", tr.depth,
                      "Hidden layer count; replicates a single --hidden size");
    train->add_option("--train-len", tr.train_len,
                      "Vectors used for fitting (0 = first 85%)")
        ->capture_default_str();
    add_training_options(train, tr.train);

    PredictFlags pr;
    auto* predict = app.add_subcommand("predict", "Forecast the next vector(s) from a model");
    predict->add_option("--model", pr.model, "Trained model path")->required();
    predict->add_option("--data", pr.data, "Input CSV path (trailing window is used)")
        ->required();
    predict->add_option("--out", pr.out, "Output CSV path")->required();
    predict->add_option("--steps", pr.steps, "Steps ahead; later steps feed on predictions")
        ->check(CLI::Range(1, std::numeric_limits<int>::max()))
        ->capture_default_str();

    EvaluateFlags ev;
    auto* evaluate = app.add_subcommand("evaluate", "Score one method on a held-out split");
    evaluate->add_option("--data", ev.data, "Input CSV path")->required();
    evaluate->add_option("--out", ev.out, "Report CSV path")->required();
    evaluate->add_option("--model", ev.model, "Trained model to score");
    evaluate
        ->add_option("--method", ev.method,
                     "Classical method: naive, holt_winters, arma, arar, arima")
        ->check(CLI::IsMember({"naive", "holt_winters", "arma", "arar", "arima"}));
    ev.o_window = evaluate->add_option("--window", ev.window, "Window length for --method")
                      ->check(CLI::Range(1, std::numeric_limits<int>::max()))
                      ->capture_default_str();
    evaluate->add_option("--train-len", ev.train_len, "Fitting range (0 = first 85%)")
        ->capture_default_str();
    evaluate->add_option("--per-od-out", ev.per_od_out, "Optional per-flow MSE CSV");
    evaluate->add_option("--arma-p", ev.arma_p, "AR order")->capture_default_str();
    evaluate->add_option("--arma-q", ev.arma_q, "MA order")->capture_default_str();
    evaluate->add_option("--arima-p", ev.arima_p, "AR order after differencing")
        ->capture_default_str();
    evaluate->add_option("--arima-d", ev.arima_d, "Differencing order")->capture_default_str();
    evaluate->add_option("--arima-q", ev.arima_q, "MA order after differencing")
        ->capture_default_str();
    evaluate->add_option("--hw-grid-step", ev.hw_grid_step, "Smoothing grid step")
        ->capture_default_str();

    ExperimentFlags sw;
    auto* sweep = app.add_subcommand("sweep", "Train and score one model per axis value");
    sweep->add_option("--data", sw.data, "Input CSV path")->required();
    sweep->add_option("--out", sw.out, "Report CSV path")->required();
    sweep->add_option("--axis", sw.axis, "Sweep axis: hidden or depth")
        ->required()
        ->check(CLI::IsMember({"hidden", "depth"}));
    sweep->add_option("--values", sw.values, "Axis values, comma separated")
        ->required()
        ->delimiter(',');
    sweep->add_option("--width", sw.width, "Layer width for the depth axis")
        ->capture_default_str();
    sweep->add_option("--window", sw.window, "Learning window length W")
        ->check(CLI::Range(1, std::numeric_limits<int>::max()))
        ->capture_default_str();
    sweep->add_option("--train-len", sw.cfg.train_len, "Fitting range (0 = first 85%)")
        ->capture_default_str();
    sweep->add_option("--timing", sw.timing, "on records wall time; off writes 0")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    add_training_options(sweep, sw.cfg.train);

    CompareFlags cp;
    auto* compare = app.add_subcommand("compare", "Score every method on one split");
    compare->add_option("--data", cp.ex.data, "Input CSV path")->required();
    compare->add_option("--out", cp.ex.out, "Report CSV path")->required();
    compare->add_option("--window", cp.ex.window, "Learning window length W")
        ->check(CLI::Range(1, std::numeric_limits<int>::max()))
        ->capture_default_str();
    compare->add_option("--train-len", cp.ex.cfg.train_len, "Fitting range (0 = first 85%)")
        ->capture_default_str();
    compare->add_option("--timing", cp.ex.timing, "on records wall time; off writes 0")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    compare->add_option("--lstm-hidden", cp.ex.cfg.lstm_hidden, "LSTM hidden units")
        ->check(CLI::Range(1, std::numeric_limits<int>::max()))
        ->capture_default_str();
    compare->add_option("--mlp-hidden", cp.ex.cfg.mlp_hidden, "Feedforward hidden units")
        ->check(CLI::Range(1, std::numeric_limits<int>::max()))
        ->capture_default_str();
    compare->add_option("--arma-p", cp.ex.cfg.arma_p, "AR order")->capture_default_str();
    compare->add_option("--arma-q", cp.ex.cfg.arma_q, "MA order")->capture_default_str();
    compare->add_option("--arima-p", cp.ex.cfg.arima_p, "AR order after differencing")
        ->capture_default_str();
    compare->add_option("--arima-d", cp.ex.cfg.arima_d, "Differencing order")
        ->capture_default_str();
    compare->add_option("--arima-q", cp.ex.cfg.arima_q, "MA order after differencing")
        ->capture_default_str();
    compare->add_option("--hw-grid-step", cp.ex.cfg.hw_grid_step, "Smoothing grid step")
        ->capture_default_str();
    add_training_options(compare, cp.ex.cfg.train);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help, --version
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (synth->parsed()) return run_synth(sy);
        if (train->parsed()) return run_train(tr);
        if (predict->parsed()) return run_predict(pr);
        if (evaluate->parsed()) return run_evaluate(ev);
        if (sweep->parsed()) return run_sweep(sw);
        if (compare->parsed()) return run_compare(cp);
        std::cerr << "error: no command\n";
        return kExitUsage;
    } catch (const TmError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}
