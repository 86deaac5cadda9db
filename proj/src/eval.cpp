#include "tmpred/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <utility>

#include "tmpred/dataio.hpp"

namespace tmpred {

double mse(std::span<const double> observed, std::span<const double> predicted) {
    if (observed.empty()) throw MetricError("cannot average over zero values");
    if (observed.size() != predicted.size())
        throw MetricError("observed and predicted lengths differ");
    double s = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double d = observed[i] - predicted[i];
        s += d * d;
    }
    return s / static_cast<double>(observed.size());
}

EvalReport evaluate(OneStepPredictor& predictor, const WindowedDataset& test,
                    const Normalizer& normalizer) {
    const std::size_t k = test.n_flows();
    if (predictor.n_flows() != k)
        throw DimensionError("predictor width does not match the dataset flow count");

    const std::size_t n = test.sample_count();
    EvalReport rep;
    rep.method_name = predictor.name();
    rep.per_od_mse.assign(k, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto pred = predictor.predict(test.input(i));
        if (pred.size() != k) throw DimensionError("prediction has the wrong number of flows");
        const auto& target = test.target(i).values;
        for (std::size_t j = 0; j < k; ++j) {
            const double d = pred[j] - target[j];
            rep.per_od_mse[j] += d * d;
            total += d * d;
        }
    }
    for (auto& v : rep.per_od_mse) v /= static_cast<double>(n);
    rep.overall_mse = total / (static_cast<double>(n) * static_cast<double>(k));
    rep.overall_mse_raw = rep.overall_mse * normalizer.scale() * normalizer.scale();
    rep.n_predictions = n;
    return rep;
}

std::vector<double> naive_last_value(std::span<const TrafficVector> window) {
    if (window.empty()) throw MetricError("window is empty");
    return window.back().values;
}

NaivePredictor::NaivePredictor(std::size_t n_flows) : n_flows_(n_flows) {
    if (n_flows == 0) throw ConfigError("flow count must be positive");
}

std::vector<double> NaivePredictor::predict(std::span<const TrafficVector> window) {
    auto v = naive_last_value(window);
    if (v.size() != n_flows_) throw DimensionError("window width does not match this predictor");
    return v;
}

NetworkPredictor::NetworkPredictor(Network net, int window)
    : net_(std::move(net)), window_(window) {
    if (window <= 0) throw ConfigError("window must be positive");
    if (net_.layers.empty()) throw ConfigError("network has no layers");
}

std::vector<double> NetworkPredictor::predict(std::span<const TrafficVector> window) {
    if (window.size() != static_cast<std::size_t>(window_))
        throw DimensionError("window length does not match the trained model");
    const std::size_t k = static_cast<std::size_t>(net_.n_inputs());
    std::vector<double> flat(k * window.size());
    for (std::size_t t = 0; t < window.size(); ++t) {
        if (window[t].values.size() != k)
            throw DimensionError("window width does not match the trained model");
        std::copy_n(window[t].values.data(), k, flat.data() + t * k);
    }
    return network_forward(net_, flat, window_);
}

MlpPredictor::MlpPredictor(MlpBaseline m, int window) : m_(std::move(m)), window_(window) {
    if (window <= 0) throw ConfigError("window must be positive");
    if (m_.n_inputs != window * m_.n_outputs)
        throw DimensionError("baseline input width must be window * flows");
}

std::vector<double> MlpPredictor::predict(std::span<const TrafficVector> window) {
    if (window.size() != static_cast<std::size_t>(window_))
        throw DimensionError("window length does not match the trained model");
    const std::size_t k = static_cast<std::size_t>(m_.n_outputs);
    std::vector<double> flat(k * window.size());
    for (std::size_t t = 0; t < window.size(); ++t) {
        if (window[t].values.size() != k)
            throw DimensionError("window width does not match the trained model");
        std::copy_n(window[t].values.data(), k, flat.data() + t * k);
    }
    return mlp_forward(m_, flat);
}

TablePredictor::TablePredictor(std::string name, std::size_t n_flows, std::int64_t first_target,
                               std::vector<std::vector<double>> forecasts)
    : name_(std::move(name)),
      n_flows_(n_flows),
      first_target_(first_target),
      forecasts_(std::move(forecasts)) {
    if (n_flows_ == 0) throw ConfigError("flow count must be positive");
    if (forecasts_.empty()) throw ConfigError("forecast table is empty");
    for (const auto& f : forecasts_)
        if (f.size() != n_flows_) throw DimensionError("forecast table row width mismatch");
}

std::vector<double> TablePredictor::predict(std::span<const TrafficVector> window) {
    if (window.empty()) throw MetricError("window is empty");
    const std::int64_t target = window.back().timestamp + 1;
    const std::int64_t idx = target - first_target_;
    if (idx < 0 || static_cast<std::size_t>(idx) >= forecasts_.size())
        throw ConfigError("window is outside the range this predictor was prepared for");
    return forecasts_[static_cast<std::size_t>(idx)];
}

namespace {

// forecasts for targets train_len..size-1 from one OD series, or a TmError
using OdForecastFn = std::function<std::vector<double>(std::span<const double>)>;

TablePredictor build_table(std::string name, const TrafficSeries& normalized,
                           std::size_t train_len, const OdForecastFn& od_forecasts) {
    const std::size_t size = normalized.size();
    const std::size_t k = normalized.n_flows();
    if (train_len < 2 || train_len >= size)
        throw InsufficientDataError("training range must hold at least 2 points and leave a test range");

    const std::size_t n_targets = size - train_len;
    std::vector<std::vector<double>> table(n_targets, std::vector<double>(k, 0.0));
    std::vector<double> x(size);
    for (std::size_t od = 0; od < k; ++od) {
        for (std::size_t t = 0; t < size; ++t) x[t] = normalized[t].values[od];
        std::vector<double> fc;
        try {
            fc = od_forecasts(x);
        } catch (const TmError&) {
            // degenerate fit for this pair: hold the last observed value
            fc.resize(n_targets);
            for (std::size_t i = 0; i < n_targets; ++i) fc[i] = x[train_len + i - 1];
        }
        if (fc.size() != n_targets) throw DimensionError("forecast count mismatch");
        for (std::size_t i = 0; i < n_targets; ++i) table[i][od] = fc[i];
    }
    return TablePredictor(std::move(name), k, normalized[train_len].timestamp, std::move(table));
}

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace

TablePredictor make_arma_predictor(const TrafficSeries& normalized, std::size_t train_len, int p,
                                   int q) {
    if (p < 0 || q < 0) throw ConfigError("orders must be nonnegative");
    if (p > 0 && q > 0)
        throw ConfigError("mixed ARMA estimation is not provided; set p or q to zero");
    const std::size_t size = normalized.size();
    auto fit_and_forecast = [=](std::span<const double> x) {
        std::span<const double> train = x.subspan(0, train_len);
        const double mean = mean_of(train);
        std::vector<double> centered(train.begin(), train.end());
        for (auto& v : centered) v -= mean;

        ArmaModel model;
        if (q == 0 && p == 0) {
            model = ArmaModel::create(0, 0, {}, {}, 1.0, mean);
        } else if (q == 0) {
            std::vector<int> lags(static_cast<std::size_t>(p));
            std::iota(lags.begin(), lags.end(), 1);
            auto [phi, var] = fit_ar_yule_walker(centered, lags);
            model = ArmaModel::create(p, 0, std::move(phi), {}, var, mean);
        } else {
            // pure MA: preliminary innovations estimate at a deep row
            const int m = std::min<int>(static_cast<int>(train_len) - 1, std::max(20, 2 * q));
            if (m < q) throw InsufficientDataError("training range too short for the MA order");
            const auto gamma = sample_acvf(centered, m);
            const auto st = innovations(gamma, m);
            std::vector<double> theta(st.theta.back().begin(),
                                      st.theta.back().begin() + q);
            model = ArmaModel::create(0, q, {}, std::move(theta), st.v.back(), mean);
        }

        std::vector<double> fc(size - train_len);
        ArmaForecaster f(model);
        for (std::size_t t = 0; t < train_len; ++t) f.push(x[t]);
        for (std::size_t t = train_len; t < size; ++t) {
            fc[t - train_len] = f.predict_next();
            f.push(x[t]);
        }
        return fc;
    };
    return build_table("arma", normalized, train_len, fit_and_forecast);
}

TablePredictor make_arima_predictor(const TrafficSeries& normalized, std::size_t train_len, int p,
                                    int d, int q) {
    if (p < 0 || q < 0 || d < 0) throw ConfigError("orders must be nonnegative");
    if (p > 0 && q > 0)
        throw ConfigError("mixed ARMA estimation is not provided; set p or q to zero");
    const std::size_t size = normalized.size();
    auto fit_and_forecast = [=](std::span<const double> x) {
        std::span<const double> train = x.subspan(0, train_len);
        auto [diffed, op] = apply_differencing(train, d);
        if (diffed.size() < 3) throw InsufficientDataError("too few points after differencing");
        const double mean = mean_of(diffed);
        std::vector<double> centered(diffed);
        for (auto& v : centered) v -= mean;

        ArmaModel model;
        if (q == 0 && p == 0) {
            model = ArmaModel::create(0, 0, {}, {}, 1.0, mean);
        } else if (q == 0) {
            std::vector<int> lags(static_cast<std::size_t>(p));
            std::iota(lags.begin(), lags.end(), 1);
            auto [phi, var] = fit_ar_yule_walker(centered, lags);
            model = ArmaModel::create(p, 0, std::move(phi), {}, var, mean);
        } else {
            const int m =
                std::min<int>(static_cast<int>(diffed.size()) - 1, std::max(20, 2 * q));
            if (m < q) throw InsufficientDataError("training range too short for the MA order");
            const auto gamma = sample_acvf(centered, m);
            const auto st = innovations(gamma, m);
            std::vector<double> theta(st.theta.back().begin(),
                                      st.theta.back().begin() + q);
            model = ArmaModel::create(0, q, {}, std::move(theta), st.v.back(), mean);
        }

        std::vector<double> fc(size - train_len);
        for (std::size_t t = train_len; t < size; ++t)
            fc[t - train_len] = arima_predict_one_step(model, op, x.subspan(0, t));
        return fc;
    };
    return build_table("arima", normalized, train_len, fit_and_forecast);
}

TablePredictor make_arar_predictor(const TrafficSeries& normalized, std::size_t train_len) {
    const std::size_t size = normalized.size();
    auto fit_and_forecast = [=](std::span<const double> x) {
        const ArarModel model = arar_fit(x.subspan(0, train_len));
        std::vector<double> fc(size - train_len);
        for (std::size_t t = train_len; t < size; ++t)
            fc[t - train_len] = arar_predict(model, x.subspan(0, t), 1)[0];
        return fc;
    };
    return build_table("arar", normalized, train_len, fit_and_forecast);
}

TablePredictor make_hw_predictor(const TrafficSeries& normalized, std::size_t train_len,
                                 double grid_step) {
    const std::size_t size = normalized.size();
    auto fit_and_forecast = [=](std::span<const double> x) {
        const auto [alpha, beta] = hw_fit(x.subspan(0, train_len), grid_step);
        HoltWintersState st = hw_init(x[0], x[1], alpha, beta);
        for (std::size_t t = 2; t < train_len; ++t) st = hw_update(st, x[t]);
        std::vector<double> fc(size - train_len);
        for (std::size_t t = train_len; t < size; ++t) {
            fc[t - train_len] = hw_forecast(st, 1);
            st = hw_update(st, x[t]);
        }
        return fc;
    };
    return build_table("holt_winters", normalized, train_len, fit_and_forecast);
}

namespace {

struct SplitData {
    Normalizer normalizer;
    TrafficSeries normalized;
    WindowedDataset train_ds;
    WindowedDataset test_ds;
    std::size_t train_len;
};

SplitData prepare_split(const TrafficSeries& series, int window, std::size_t cfg_train_len) {
    if (window <= 0) throw ConfigError("window must be positive");
    const std::size_t size = series.size();
    const std::size_t train_len = cfg_train_len == 0 ? (size * 85) / 100 : cfg_train_len;
    if (train_len <= static_cast<std::size_t>(window) || train_len >= size)
        throw InsufficientDataError("split needs window < train_len < series length");

    Normalizer normalizer = fit_normalizer(series, 0, train_len);
    TrafficSeries normalized = normalizer.normalize(series);
    WindowedDataset train_ds = build_windows(normalized.subseries(0, train_len), window);
    // test windows start inside the training tail so the first held-out target
    // is exactly the first vector after the training range
    WindowedDataset test_ds =
        build_windows(normalized.subseries(train_len - window, size), window);
    if (test_ds.target(0).timestamp != normalized[train_len].timestamp)
        throw DataError("evaluation targets overlap the training range");
    return SplitData{std::move(normalizer), std::move(normalized), std::move(train_ds),
                     std::move(test_ds), train_len};
}

void check_axis_values(const std::vector<int>& values, const char* what) {
    if (values.empty()) throw ConfigError(std::string(what) + " list must be nonempty");
    std::set<int> seen;
    for (int v : values) {
        if (v <= 0) throw ConfigError(std::string(what) + " values must be positive");
        if (!seen.insert(v).second)
            throw ConfigError(std::string(what) + " values must be distinct");
    }
}

std::pair<double, double> run_lstm_point(const SplitData& split, const std::vector<int>& hidden,
                                         int window, const SweepConfig& cfg) {
    const int k = static_cast<int>(split.train_ds.n_flows());
    Network net = Network::create(k, hidden, k);
    train(net, split.train_ds, cfg.train);
    NetworkPredictor pred(std::move(net), window);
    const EvalReport rep = evaluate(pred, split.test_ds, split.normalizer);
    return {rep.overall_mse, rep.overall_mse_raw};
}

// runs one point per label, isolating TmError failures; throws only when
// nothing succeeded
template <class PointFn>
SweepResult run_sweep(std::string axis, const std::vector<std::string>& labels, bool record_timing,
                      PointFn&& point_fn) {
    SweepResult res;
    res.axis_name = std::move(axis);
    std::size_t failures = 0;
    std::string first_error;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        SweepPoint pt;
        pt.label = labels[i];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const auto [m_norm, m_raw] = point_fn(i);
            pt.mse_normalized = m_norm;
            pt.mse_raw = m_raw;
        } catch (const TmError& e) {
            pt.failed = true;
            pt.error = e.what();
            pt.mse_normalized = std::numeric_limits<double>::quiet_NaN();
            pt.mse_raw = std::numeric_limits<double>::quiet_NaN();
            if (first_error.empty()) first_error = e.what();
            ++failures;
        }
        if (record_timing) {
            const auto t1 = std::chrono::steady_clock::now();
            pt.seconds = std::chrono::duration<double>(t1 - t0).count();
        }
        res.points.push_back(std::move(pt));
    }
    if (failures == labels.size())
        throw DegenerateError("every sweep point failed; first error: " + first_error);
    return res;
}

}  // namespace

SweepResult sweep_hidden_size(const TrafficSeries& series, int window,
                              const std::vector<int>& sizes, const SweepConfig& cfg) {
    check_axis_values(sizes, "hidden size");
    const SplitData split = prepare_split(series, window, cfg.train_len);
    std::vector<std::string> labels;
    labels.reserve(sizes.size());
    for (int s : sizes) labels.push_back(std::to_string(s));
    return run_sweep("hidden_units", labels, cfg.record_timing, [&](std::size_t i) {
        return run_lstm_point(split, {sizes[i]}, window, cfg);
    });
}

SweepResult sweep_depth(const TrafficSeries& series, int window, const std::vector<int>& depths,
                        int width, const SweepConfig& cfg) {
    check_axis_values(depths, "depth");
    if (width <= 0) throw ConfigError("layer width must be positive");
    const SplitData split = prepare_split(series, window, cfg.train_len);
    std::vector<std::string> labels;
    labels.reserve(depths.size());
    for (int d : depths) labels.push_back(std::to_string(d));
    return run_sweep("hidden_layers", labels, cfg.record_timing, [&](std::size_t i) {
        const std::vector<int> hidden(static_cast<std::size_t>(depths[i]), width);
        return run_lstm_point(split, hidden, window, cfg);
    });
}

SweepResult compare_methods(const TrafficSeries& series, int window, const SweepConfig& cfg) {
    const SplitData split = prepare_split(series, window, cfg.train_len);
    const std::size_t k = split.train_ds.n_flows();
    const std::vector<std::string> labels{"naive", "holt_winters", "arma", "arar",
                                          "arima", "mlp",          "lstm"};

    auto eval_table = [&](TablePredictor&& pred) {
        const EvalReport rep = evaluate(pred, split.test_ds, split.normalizer);
        return std::pair{rep.overall_mse, rep.overall_mse_raw};
    };

    return run_sweep("method", labels, cfg.record_timing,
                     [&](std::size_t i) -> std::pair<double, double> {
        switch (i) {
            case 0: {
                NaivePredictor pred(k);
                const EvalReport rep = evaluate(pred, split.test_ds, split.normalizer);
                return {rep.overall_mse, rep.overall_mse_raw};
            }
            case 1:
                return eval_table(
                    make_hw_predictor(split.normalized, split.train_len, cfg.hw_grid_step));
            case 2:
                return eval_table(make_arma_predictor(split.normalized, split.train_len,
                                                      cfg.arma_p, cfg.arma_q));
            case 3:
                return eval_table(make_arar_predictor(split.normalized, split.train_len));
            case 4:
                return eval_table(make_arima_predictor(split.normalized, split.train_len,
                                                       cfg.arima_p, cfg.arima_d, cfg.arima_q));
            case 5: {
                MlpBaseline m = MlpBaseline::create(window * static_cast<int>(k), cfg.mlp_hidden,
                                                    static_cast<int>(k));
                mlp_train(m, split.train_ds, cfg.train);
                MlpPredictor pred(std::move(m), window);
                const EvalReport rep = evaluate(pred, split.test_ds, split.normalizer);
                return {rep.overall_mse, rep.overall_mse_raw};
            }
            default:
                return run_lstm_point(split, {cfg.lstm_hidden}, window, cfg);
        }
    });
}

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
    out << "axis,value,mse_normalized,mse_raw,seconds\n";
    for (const auto& pt : result.points) {
        out << result.axis_name << ',' << pt.label << ',' << format_double(pt.mse_normalized)
            << ',' << format_double(pt.mse_raw) << ',' << format_double(pt.seconds) << '\n';
    }
    if (!out) throw IoError("write failed while emitting sweep results");
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    write_sweep_csv(result, f);
    f.flush();
    if (!f) throw IoError("write failed for '" + path + "'");
}

}  // namespace tmpred
