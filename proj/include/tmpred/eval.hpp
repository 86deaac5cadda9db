#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tmpred/linear.hpp"
#include "tmpred/lstm.hpp"
#include "tmpred/tm.hpp"

namespace tmpred {

// Mean of squared componentwise differences.
double mse(std::span<const double> observed, std::span<const double> predicted);

// Accuracy of one method over a held-out window set. MSE values are in
// normalized space; overall_mse_raw undoes the max-scaling (scale squared).
struct EvalReport {
    std::string method_name;
    double overall_mse = 0.0;
    double overall_mse_raw = 0.0;
    std::vector<double> per_od_mse;
    std::size_t n_predictions = 0;
};

// Anything that can turn the trailing W observations into a forecast of the
// next traffic vector, in normalized space.
class OneStepPredictor {
public:
    virtual ~OneStepPredictor() = default;
    virtual const std::string& name() const = 0;
    virtual std::size_t n_flows() const = 0;
    virtual std::vector<double> predict(std::span<const TrafficVector> window) = 0;
};

// Runs the predictor over every sample of the test set and aggregates squared
// errors overall and per OD pair.
EvalReport evaluate(OneStepPredictor& predictor, const WindowedDataset& test,
                    const Normalizer& normalizer);

// The reference baseline: tomorrow looks like today.
std::vector<double> naive_last_value(std::span<const TrafficVector> window);

class NaivePredictor : public OneStepPredictor {
public:
    explicit NaivePredictor(std::size_t n_flows);
    const std::string& name() const override { return name_; }
    std::size_t n_flows() const override { return n_flows_; }
    std::vector<double> predict(std::span<const TrafficVector> window) override;

private:
    std::string name_ = "naive";
    std::size_t n_flows_;
};

class NetworkPredictor : public OneStepPredictor {
public:
    NetworkPredictor(Network net, int window);
    const std::string& name() const override { return name_; }
    std::size_t n_flows() const override { return static_cast<std::size_t>(net_.n_outputs()); }
    std::vector<double> predict(std::span<const TrafficVector> window) override;

private:
    std::string name_ = "lstm";
    Network net_;
    int window_;
};

class MlpPredictor : public OneStepPredictor {
public:
    MlpPredictor(MlpBaseline m, int window);
    const std::string& name() const override { return name_; }
    std::size_t n_flows() const override { return static_cast<std::size_t>(m_.n_outputs); }
    std::vector<double> predict(std::span<const TrafficVector> window) override;

private:
    std::string name_ = "mlp";
    MlpBaseline m_;
    int window_;
};

// Per-OD univariate predictor with all one-step forecasts precomputed for a
// fixed evaluation range. The classical fitters need the full history from
// t = 0, not just the trailing window, so forecasts for each test target are
// tabulated up front (parameters fit on the training range only; forecasts
// condition on observed values). Lookup is by the window's timestamps.
class TablePredictor : public OneStepPredictor {
public:
    TablePredictor(std::string name, std::size_t n_flows, std::int64_t first_target,
                   std::vector<std::vector<double>> forecasts);
    const std::string& name() const override { return name_; }
    std::size_t n_flows() const override { return n_flows_; }
    std::vector<double> predict(std::span<const TrafficVector> window) override;

private:
    std::string name_;
    std::size_t n_flows_;
    std::int64_t first_target_;
    std::vector<std::vector<double>> forecasts_;
};

// Builders for the classical methods. Each fits every OD series on
// normalized[0, train_len) and tabulates one-step forecasts for targets
// train_len .. size-1. OD pairs whose fit degenerates (constant series,
// singular systems, too little data) fall back to the last observed value for
// that pair.
TablePredictor make_arma_predictor(const TrafficSeries& normalized, std::size_t train_len, int p,
                                   int q);
TablePredictor make_arima_predictor(const TrafficSeries& normalized, std::size_t train_len, int p,
                                    int d, int q);
TablePredictor make_arar_predictor(const TrafficSeries& normalized, std::size_t train_len);
TablePredictor make_hw_predictor(const TrafficSeries& normalized, std::size_t train_len,
                                 double grid_step);

// One experiment point. On failure the MSE fields are NaN and error holds the
// reason; seconds is wall-clock time for the point (0 when timing is off).
struct SweepPoint {
    std::string label;
    double mse_normalized = 0.0;
    double mse_raw = 0.0;
    double seconds = 0.0;
    bool failed = false;
    std::string error;
};

struct SweepResult {
    std::string axis_name;  // "hidden_units" | "hidden_layers" | "method"
    std::vector<SweepPoint> points;
};

// Shared knobs for the experiment drivers.
struct SweepConfig {
    std::size_t train_len = 0;  // 0 picks 85% of the series
    TrainConfig train;
    int lstm_hidden = 100;      // LSTM width in compare_methods
    int mlp_hidden = 50;
    int arma_p = 1;
    int arma_q = 0;
    int arima_p = 1;
    int arima_d = 1;
    int arima_q = 0;
    double hw_grid_step = 0.05;
    bool record_timing = true;  // false writes 0 seconds, for reproducible output
};

// Trains one fresh single-layer network per size on an identical split and
// seed, evaluating each on the held-out windows. Per-point failures are
// flagged, not fatal; only a sweep with zero usable points throws.
SweepResult sweep_hidden_size(const TrafficSeries& series, int window,
                              const std::vector<int>& sizes, const SweepConfig& cfg);

// Same sweep over stack depth at a fixed width.
SweepResult sweep_depth(const TrafficSeries& series, int window, const std::vector<int>& depths,
                        int width, const SweepConfig& cfg);

// All methods on the identical chronological split, one point per method:
// naive, holt_winters, arma, arar, arima, mlp, lstm.
SweepResult compare_methods(const TrafficSeries& series, int window, const SweepConfig& cfg);

// CSV with header axis,value,mse_normalized,mse_raw,seconds. Failed points
// carry nan in the MSE columns.
void write_sweep_csv(const SweepResult& result, std::ostream& out);
void write_sweep_csv(const SweepResult& result, const std::string& path);

}  // namespace tmpred
