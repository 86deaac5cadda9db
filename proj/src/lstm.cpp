#include "tmpred/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tmpred/kernels.hpp"
#include "tmpred/tm.hpp"

namespace tmpred {

namespace {

std::size_t idx2(int rows, int cols) { return static_cast<std::size_t>(rows) * cols; }

void validate_layer(const LstmLayer& l) {
    if (l.n_inputs <= 0 || l.n_cells <= 0) throw ConfigError("layer dimensions must be positive");
    const std::size_t hi = idx2(l.n_cells, l.n_inputs);
    const std::size_t hh = idx2(l.n_cells, l.n_cells);
    const std::size_t h = static_cast<std::size_t>(l.n_cells);
    const bool ok = l.w_in_ig.size() == hi && l.w_in_fg.size() == hi && l.w_in_og.size() == hi &&
                    l.w_in_cell.size() == hi && l.w_rec_ig.size() == hh && l.w_rec_fg.size() == hh &&
                    l.w_rec_og.size() == hh && l.w_rec_cell.size() == hh && l.peep_ig.size() == h &&
                    l.peep_fg.size() == h && l.peep_og.size() == h && l.bias_ig.size() == h &&
                    l.bias_fg.size() == h && l.bias_og.size() == h && l.bias_cell.size() == h;
    if (!ok) throw DimensionError("layer weight arrays do not match the declared dimensions");
}

void fill_uniform(Rng& rng, double scale, std::vector<double>& w) {
    for (auto& v : w) v = rng.uniform(-scale, scale);
}

}  // namespace

LstmLayer LstmLayer::create(int n_inputs, int n_cells, bool peek_previous) {
    if (n_inputs <= 0 || n_cells <= 0) throw ConfigError("layer dimensions must be positive");
    LstmLayer l;
    l.n_inputs = n_inputs;
    l.n_cells = n_cells;
    l.output_gate_peeks_previous_state = peek_previous;
    const std::size_t hi = idx2(n_cells, n_inputs);
    const std::size_t hh = idx2(n_cells, n_cells);
    const std::size_t h = static_cast<std::size_t>(n_cells);
    l.w_in_ig.assign(hi, 0.0);
    l.w_in_fg.assign(hi, 0.0);
    l.w_in_og.assign(hi, 0.0);
    l.w_in_cell.assign(hi, 0.0);
    l.w_rec_ig.assign(hh, 0.0);
    l.w_rec_fg.assign(hh, 0.0);
    l.w_rec_og.assign(hh, 0.0);
    l.w_rec_cell.assign(hh, 0.0);
    l.peep_ig.assign(h, 0.0);
    l.peep_fg.assign(h, 0.0);
    l.peep_og.assign(h, 0.0);
    l.bias_ig.assign(h, 0.0);
    l.bias_fg.assign(h, 0.0);
    l.bias_og.assign(h, 0.0);
    l.bias_cell.assign(h, 0.0);
    return l;
}

void LstmLayer::init_weights(Rng& rng, double scale) {
    if (scale < 0.0 || !std::isfinite(scale)) throw ConfigError("init scale must be finite and nonnegative");
    fill_uniform(rng, scale, w_in_ig);
    fill_uniform(rng, scale, w_in_fg);
    fill_uniform(rng, scale, w_in_og);
    fill_uniform(rng, scale, w_in_cell);
    fill_uniform(rng, scale, w_rec_ig);
    fill_uniform(rng, scale, w_rec_fg);
    fill_uniform(rng, scale, w_rec_og);
    fill_uniform(rng, scale, w_rec_cell);
    fill_uniform(rng, scale, peep_ig);
    fill_uniform(rng, scale, peep_fg);
    fill_uniform(rng, scale, peep_og);
    std::fill(bias_ig.begin(), bias_ig.end(), 0.0);
    std::fill(bias_fg.begin(), bias_fg.end(), 0.0);
    std::fill(bias_og.begin(), bias_og.end(), 0.0);
    std::fill(bias_cell.begin(), bias_cell.end(), 0.0);
}

LstmTrace lstm_forward(const LstmLayer& layer, const std::vector<double>& inputs_flat, int steps) {
    validate_layer(layer);
    if (steps <= 0) throw ConfigError("forward needs at least one step");
    const int I = layer.n_inputs;
    const int H = layer.n_cells;
    if (inputs_flat.size() != idx2(steps, I))
        throw DimensionError("input matrix size does not match steps * n_inputs");

    LstmTrace tr;
    tr.steps = steps;
    tr.n_inputs = I;
    tr.n_cells = H;
    tr.inputs = inputs_flat;
    const std::size_t th = idx2(steps, H);
    tr.a_ig.assign(th, 0.0);
    tr.a_fg.assign(th, 0.0);
    tr.a_og.assign(th, 0.0);
    tr.a_cell.assign(th, 0.0);
    tr.b_ig.assign(th, 0.0);
    tr.b_fg.assign(th, 0.0);
    tr.b_og.assign(th, 0.0);
    tr.g_cell.assign(th, 0.0);
    tr.state.assign(th, 0.0);
    tr.h_state.assign(th, 0.0);
    tr.b_out.assign(th, 0.0);

    const std::vector<double> zeros(static_cast<std::size_t>(H), 0.0);
    for (int t = 0; t < steps; ++t) {
        const double* x = inputs_flat.data() + idx2(t, I);
        const double* b_prev = t > 0 ? tr.b_out.data() + idx2(t - 1, H) : zeros.data();
        const double* s_prev = t > 0 ? tr.state.data() + idx2(t - 1, H) : zeros.data();
        double* a_ig = tr.a_ig.data() + idx2(t, H);
        double* a_fg = tr.a_fg.data() + idx2(t, H);
        double* a_og = tr.a_og.data() + idx2(t, H);
        double* a_cell = tr.a_cell.data() + idx2(t, H);
        double* b_ig = tr.b_ig.data() + idx2(t, H);
        double* b_fg = tr.b_fg.data() + idx2(t, H);
        double* b_og = tr.b_og.data() + idx2(t, H);
        double* g_cell = tr.g_cell.data() + idx2(t, H);
        double* s = tr.state.data() + idx2(t, H);
        double* h_s = tr.h_state.data() + idx2(t, H);
        double* b_out = tr.b_out.data() + idx2(t, H);

        kernels::matvec(layer.w_in_ig.data(), H, I, x, a_ig);
        kernels::matvec_acc(layer.w_rec_ig.data(), H, H, b_prev, a_ig);
        for (int c = 0; c < H; ++c) {
            a_ig[c] += layer.peep_ig[c] * s_prev[c] + layer.bias_ig[c];
            b_ig[c] = act::sigmoid(a_ig[c]);
        }

        kernels::matvec(layer.w_in_fg.data(), H, I, x, a_fg);
        kernels::matvec_acc(layer.w_rec_fg.data(), H, H, b_prev, a_fg);
        for (int c = 0; c < H; ++c) {
            a_fg[c] += layer.peep_fg[c] * s_prev[c] + layer.bias_fg[c];
            b_fg[c] = act::sigmoid(a_fg[c]);
        }

        kernels::matvec(layer.w_in_cell.data(), H, I, x, a_cell);
        kernels::matvec_acc(layer.w_rec_cell.data(), H, H, b_prev, a_cell);
        for (int c = 0; c < H; ++c) {
            a_cell[c] += layer.bias_cell[c];
            g_cell[c] = act::g(a_cell[c]);
            s[c] = b_fg[c] * s_prev[c] + b_ig[c] * g_cell[c];
        }

        kernels::matvec(layer.w_in_og.data(), H, I, x, a_og);
        kernels::matvec_acc(layer.w_rec_og.data(), H, H, b_prev, a_og);
        const double* s_peek = layer.output_gate_peeks_previous_state ? s_prev : s;
        for (int c = 0; c < H; ++c) {
            a_og[c] += layer.peep_og[c] * s_peek[c] + layer.bias_og[c];
            b_og[c] = act::sigmoid(a_og[c]);
            h_s[c] = act::h(s[c]);
            b_out[c] = b_og[c] * h_s[c];
        }
    }
    return tr;
}

bool lstm_trace_in_range(const LstmTrace& trace) {
    auto in_open = [](const std::vector<double>& v, double lo, double hi) {
        return std::all_of(v.begin(), v.end(),
                           [&](double x) { return std::isfinite(x) && x > lo && x < hi; });
    };
    return in_open(trace.b_ig, 0.0, 1.0) && in_open(trace.b_fg, 0.0, 1.0) &&
           in_open(trace.b_og, 0.0, 1.0) && in_open(trace.g_cell, -2.0, 2.0) &&
           in_open(trace.h_state, -1.0, 1.0) && in_open(trace.b_out, -1.0, 1.0) &&
           std::all_of(trace.state.begin(), trace.state.end(),
                       [](double x) { return std::isfinite(x); });
}

LstmGradients lstm_backward(const LstmLayer& layer, const LstmTrace& trace,
                            const std::vector<double>& cell_output_error) {
    validate_layer(layer);
    const int I = trace.n_inputs;
    const int H = trace.n_cells;
    const int T = trace.steps;
    if (layer.n_inputs != I || layer.n_cells != H)
        throw DimensionError("trace does not belong to this layer");
    if (cell_output_error.size() != idx2(T, H))
        throw DimensionError("cell output error must be steps * n_cells");

    LstmGradients g;
    const std::size_t hi = idx2(H, I);
    const std::size_t hh = idx2(H, H);
    const std::size_t h = static_cast<std::size_t>(H);
    const std::size_t th = idx2(T, H);
    g.gw_in_ig.assign(hi, 0.0);
    g.gw_in_fg.assign(hi, 0.0);
    g.gw_in_og.assign(hi, 0.0);
    g.gw_in_cell.assign(hi, 0.0);
    g.gw_rec_ig.assign(hh, 0.0);
    g.gw_rec_fg.assign(hh, 0.0);
    g.gw_rec_og.assign(hh, 0.0);
    g.gw_rec_cell.assign(hh, 0.0);
    g.gpeep_ig.assign(h, 0.0);
    g.gpeep_fg.assign(h, 0.0);
    g.gpeep_og.assign(h, 0.0);
    g.gbias_ig.assign(h, 0.0);
    g.gbias_fg.assign(h, 0.0);
    g.gbias_og.assign(h, 0.0);
    g.gbias_cell.assign(h, 0.0);
    g.d_ig.assign(th, 0.0);
    g.d_fg.assign(th, 0.0);
    g.d_og.assign(th, 0.0);
    g.d_cell.assign(th, 0.0);
    g.eps_c.assign(th, 0.0);
    g.eps_s.assign(th, 0.0);
    g.input_deltas.assign(idx2(T, I), 0.0);

    const std::vector<double> zeros(h, 0.0);

    // deltas, latest step first; everything indexed t+1 is zero beyond the end
    for (int t = T - 1; t >= 0; --t) {
        const std::size_t row = idx2(t, H);
        double* eps_c = g.eps_c.data() + row;
        std::copy_n(cell_output_error.data() + row, H, eps_c);
        if (t + 1 < T) {
            const std::size_t next = idx2(t + 1, H);
            kernels::matvec_acc_t(layer.w_rec_ig.data(), H, H, g.d_ig.data() + next, eps_c);
            kernels::matvec_acc_t(layer.w_rec_fg.data(), H, H, g.d_fg.data() + next, eps_c);
            kernels::matvec_acc_t(layer.w_rec_og.data(), H, H, g.d_og.data() + next, eps_c);
            kernels::matvec_acc_t(layer.w_rec_cell.data(), H, H, g.d_cell.data() + next, eps_c);
        }

        const double* b_og = trace.b_og.data() + row;
        const double* h_s = trace.h_state.data() + row;
        const double* s = trace.state.data() + row;
        double* d_og = g.d_og.data() + row;
        for (int c = 0; c < H; ++c) d_og[c] = act::sigmoid_deriv(b_og[c]) * h_s[c] * eps_c[c];

        double* eps_s = g.eps_s.data() + row;
        for (int c = 0; c < H; ++c) eps_s[c] = b_og[c] * act::h_deriv(s[c]) * eps_c[c];
        if (!layer.output_gate_peeks_previous_state)
            for (int c = 0; c < H; ++c) eps_s[c] += layer.peep_og[c] * d_og[c];
        if (t + 1 < T) {
            const std::size_t next = idx2(t + 1, H);
            const double* b_fg_next = trace.b_fg.data() + next;
            const double* eps_s_next = g.eps_s.data() + next;
            const double* d_ig_next = g.d_ig.data() + next;
            const double* d_fg_next = g.d_fg.data() + next;
            for (int c = 0; c < H; ++c)
                eps_s[c] += b_fg_next[c] * eps_s_next[c] + layer.peep_ig[c] * d_ig_next[c] +
                            layer.peep_fg[c] * d_fg_next[c];
            if (layer.output_gate_peeks_previous_state) {
                const double* d_og_next = g.d_og.data() + next;
                for (int c = 0; c < H; ++c) eps_s[c] += layer.peep_og[c] * d_og_next[c];
            }
        }

        const double* b_ig = trace.b_ig.data() + row;
        const double* a_cell = trace.a_cell.data() + row;
        double* d_cell = g.d_cell.data() + row;
        for (int c = 0; c < H; ++c) d_cell[c] = b_ig[c] * act::g_deriv(a_cell[c]) * eps_s[c];

        const double* s_prev = t > 0 ? trace.state.data() + idx2(t - 1, H) : zeros.data();
        const double* b_fg = trace.b_fg.data() + row;
        double* d_fg = g.d_fg.data() + row;
        for (int c = 0; c < H; ++c) d_fg[c] = act::sigmoid_deriv(b_fg[c]) * s_prev[c] * eps_s[c];

        const double* g_cell = trace.g_cell.data() + row;
        double* d_ig = g.d_ig.data() + row;
        for (int c = 0; c < H; ++c) d_ig[c] = act::sigmoid_deriv(b_ig[c]) * g_cell[c] * eps_s[c];
    }

    // weight gradients: outer products of the deltas with their source vectors
    for (int t = 0; t < T; ++t) {
        const std::size_t row = idx2(t, H);
        const double* x = trace.inputs.data() + idx2(t, I);
        const double* b_prev = t > 0 ? trace.b_out.data() + idx2(t - 1, H) : nullptr;
        const double* s_prev = t > 0 ? trace.state.data() + idx2(t - 1, H) : zeros.data();
        const double* s = trace.state.data() + row;
        const double* d_ig = g.d_ig.data() + row;
        const double* d_fg = g.d_fg.data() + row;
        const double* d_og = g.d_og.data() + row;
        const double* d_cell = g.d_cell.data() + row;

        kernels::ger_acc(1.0, d_ig, H, x, I, g.gw_in_ig.data());
        kernels::ger_acc(1.0, d_fg, H, x, I, g.gw_in_fg.data());
        kernels::ger_acc(1.0, d_og, H, x, I, g.gw_in_og.data());
        kernels::ger_acc(1.0, d_cell, H, x, I, g.gw_in_cell.data());
        if (b_prev) {
            kernels::ger_acc(1.0, d_ig, H, b_prev, H, g.gw_rec_ig.data());
            kernels::ger_acc(1.0, d_fg, H, b_prev, H, g.gw_rec_fg.data());
            kernels::ger_acc(1.0, d_og, H, b_prev, H, g.gw_rec_og.data());
            kernels::ger_acc(1.0, d_cell, H, b_prev, H, g.gw_rec_cell.data());
        }
        const double* s_peek = layer.output_gate_peeks_previous_state ? s_prev : s;
        for (int c = 0; c < H; ++c) {
            g.gbias_ig[c] += d_ig[c];
            g.gbias_fg[c] += d_fg[c];
            g.gbias_og[c] += d_og[c];
            g.gbias_cell[c] += d_cell[c];
            g.gpeep_ig[c] += d_ig[c] * s_prev[c];
            g.gpeep_fg[c] += d_fg[c] * s_prev[c];
            g.gpeep_og[c] += d_og[c] * s_peek[c];
        }

        double* xd = g.input_deltas.data() + idx2(t, I);
        kernels::matvec_acc_t(layer.w_in_ig.data(), H, I, d_ig, xd);
        kernels::matvec_acc_t(layer.w_in_fg.data(), H, I, d_fg, xd);
        kernels::matvec_acc_t(layer.w_in_og.data(), H, I, d_og, xd);
        kernels::matvec_acc_t(layer.w_in_cell.data(), H, I, d_cell, xd);
    }
    return g;
}

Network Network::create(int n_inputs, const std::vector<int>& hidden_sizes, int n_outputs,
                        bool peek_previous) {
    if (n_inputs <= 0 || n_outputs <= 0) throw ConfigError("network dimensions must be positive");
    if (hidden_sizes.empty()) throw ConfigError("at least one hidden layer is required");
    Network net;
    int in = n_inputs;
    for (int hsize : hidden_sizes) {
        if (hsize <= 0) throw ConfigError("hidden sizes must be positive");
        net.layers.push_back(LstmLayer::create(in, hsize, peek_previous));
        in = hsize;
    }
    net.output.n_inputs = in;
    net.output.n_outputs = n_outputs;
    net.output.w.assign(idx2(n_outputs, in), 0.0);
    net.output.bias.assign(static_cast<std::size_t>(n_outputs), 0.0);
    return net;
}

void Network::init_weights(Rng& rng, double scale) {
    for (auto& l : layers) l.init_weights(rng, scale);
    fill_uniform(rng, scale, output.w);
    std::fill(output.bias.begin(), output.bias.end(), 0.0);
}

namespace {

std::vector<LstmTrace> forward_stack(const Network& net, const std::vector<double>& window_flat,
                                     int steps) {
    std::vector<LstmTrace> traces;
    traces.reserve(net.layers.size());
    const std::vector<double>* in = &window_flat;
    for (const auto& layer : net.layers) {
        traces.push_back(lstm_forward(layer, *in, steps));
        in = &traces.back().b_out;
    }
    return traces;
}

std::vector<double> readout(const OutputLayer& out, const double* last) {
    std::vector<double> y(static_cast<std::size_t>(out.n_outputs));
    kernels::matvec(out.w.data(), out.n_outputs, out.n_inputs, last, y.data());
    for (int k = 0; k < out.n_outputs; ++k) y[k] += out.bias[k];
    return y;
}

}  // namespace

std::vector<double> network_forward(const Network& net, const std::vector<double>& window_flat,
                                    int steps) {
    if (net.layers.empty()) throw ConfigError("network has no layers");
    auto traces = forward_stack(net, window_flat, steps);
    return readout(net.output, traces.back().out_row(steps - 1));
}

namespace {

struct NetGrads {
    std::vector<LstmGradients> layers;
    std::vector<double> gw_out, gb_out;
};

template <class Fn>
void for_each_param(LstmLayer& l, LstmGradients& g, Fn&& fn) {
    fn(l.w_in_ig, g.gw_in_ig);
    fn(l.w_in_fg, g.gw_in_fg);
    fn(l.w_in_og, g.gw_in_og);
    fn(l.w_in_cell, g.gw_in_cell);
    fn(l.w_rec_ig, g.gw_rec_ig);
    fn(l.w_rec_fg, g.gw_rec_fg);
    fn(l.w_rec_og, g.gw_rec_og);
    fn(l.w_rec_cell, g.gw_rec_cell);
    fn(l.peep_ig, g.gpeep_ig);
    fn(l.peep_fg, g.gpeep_fg);
    fn(l.peep_og, g.gpeep_og);
    fn(l.bias_ig, g.gbias_ig);
    fn(l.bias_fg, g.gbias_fg);
    fn(l.bias_og, g.gbias_og);
    fn(l.bias_cell, g.gbias_cell);
}

void validate_train_config(const TrainConfig& cfg) {
    if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate))
        throw ConfigError("learning rate must be positive");
    if (cfg.epochs <= 0) throw ConfigError("epoch count must be positive");
    if (!std::isfinite(cfg.init_scale) || cfg.init_scale < 0.0)
        throw ConfigError("init scale must be finite and nonnegative");
}

void flatten_window(std::span<const TrafficVector> in, std::size_t n_flows,
                    std::vector<double>& flat) {
    for (std::size_t t = 0; t < in.size(); ++t)
        std::copy_n(in[t].values.data(), n_flows, flat.data() + t * n_flows);
}

}  // namespace

std::vector<double> train(Network& net, const WindowedDataset& data, const TrainConfig& cfg) {
    validate_train_config(cfg);
    if (net.layers.empty()) throw ConfigError("network has no layers");
    const std::size_t k_flows = data.n_flows();
    if (static_cast<std::size_t>(net.n_inputs()) != k_flows ||
        static_cast<std::size_t>(net.n_outputs()) != k_flows)
        throw DimensionError("network width does not match the dataset flow count");

    const int w = data.window();
    const std::size_t n_samples = data.sample_count();
    const int k = net.n_outputs();
    const int h_top = net.layers.back().n_cells;

    Rng rng(cfg.seed);
    net.init_weights(rng, cfg.init_scale);

    std::vector<std::size_t> order(n_samples);
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<double> window_flat(idx2(w, net.n_inputs()));
    std::vector<double> delta_out(static_cast<std::size_t>(k));
    std::vector<double> curve;
    curve.reserve(static_cast<std::size_t>(cfg.epochs));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double mse_sum = 0.0;
        for (std::size_t sample : order) {
            flatten_window(data.input(sample), k_flows, window_flat);
            auto traces = forward_stack(net, window_flat, w);
            auto y = readout(net.output, traces.back().out_row(w - 1));

            const auto& target = data.target(sample).values;
            double se = 0.0;
            for (int j = 0; j < k; ++j) {
                delta_out[j] = y[j] - target[j];
                se += delta_out[j] * delta_out[j];
            }
            if (!std::isfinite(se)) throw TrainingDivergedError(epoch, "loss is not finite");
            mse_sum += se / k;

            NetGrads grads;
            grads.gw_out.assign(net.output.w.size(), 0.0);
            grads.gb_out = delta_out;
            kernels::ger_acc(1.0, delta_out.data(), k, traces.back().out_row(w - 1), h_top,
                             grads.gw_out.data());

            // error reaching the top layer's cell outputs: only the final step
            std::vector<double> inj(idx2(w, h_top), 0.0);
            kernels::matvec_acc_t(net.output.w.data(), k, h_top, delta_out.data(),
                                  inj.data() + idx2(w - 1, h_top));

            grads.layers.resize(net.layers.size());
            for (std::size_t li = net.layers.size(); li-- > 0;) {
                grads.layers[li] = lstm_backward(net.layers[li], traces[li], inj);
                if (li > 0) inj = std::move(grads.layers[li].input_deltas);
            }

            double scale = 1.0;
            if (cfg.gradient_clip > 0.0) {
                double norm_sq = kernels::sumsq(grads.gw_out.data(), grads.gw_out.size()) +
                                 kernels::sumsq(grads.gb_out.data(), grads.gb_out.size());
                for (std::size_t li = 0; li < net.layers.size(); ++li)
                    for_each_param(net.layers[li], grads.layers[li],
                                   [&](std::vector<double>& /*p*/, std::vector<double>& gr) {
                                       norm_sq += kernels::sumsq(gr.data(), gr.size());
                                   });
                const double norm = std::sqrt(norm_sq);
                if (norm > cfg.gradient_clip) scale = cfg.gradient_clip / norm;
            }

            const double step = -cfg.learning_rate * scale;
            kernels::axpy(step, grads.gw_out.data(), net.output.w.data(), net.output.w.size());
            kernels::axpy(step, grads.gb_out.data(), net.output.bias.data(),
                          net.output.bias.size());
            for (std::size_t li = 0; li < net.layers.size(); ++li)
                for_each_param(net.layers[li], grads.layers[li],
                               [&](std::vector<double>& p, std::vector<double>& gr) {
                                   kernels::axpy(step, gr.data(), p.data(), p.size());
                               });
        }
        const double epoch_mse = mse_sum / static_cast<double>(n_samples);
        if (!std::isfinite(epoch_mse)) throw TrainingDivergedError(epoch, "loss is not finite");
        curve.push_back(epoch_mse);
    }
    return curve;
}

MlpBaseline MlpBaseline::create(int n_inputs, int n_hidden, int n_outputs) {
    if (n_inputs <= 0 || n_hidden <= 0 || n_outputs <= 0)
        throw ConfigError("baseline dimensions must be positive");
    MlpBaseline m;
    m.n_inputs = n_inputs;
    m.n_hidden = n_hidden;
    m.n_outputs = n_outputs;
    m.w1.assign(idx2(n_hidden, n_inputs), 0.0);
    m.b1.assign(static_cast<std::size_t>(n_hidden), 0.0);
    m.w2.assign(idx2(n_outputs, n_hidden), 0.0);
    m.b2.assign(static_cast<std::size_t>(n_outputs), 0.0);
    return m;
}

void MlpBaseline::init_weights(Rng& rng, double scale) {
    if (scale < 0.0 || !std::isfinite(scale)) throw ConfigError("init scale must be finite and nonnegative");
    fill_uniform(rng, scale, w1);
    fill_uniform(rng, scale, w2);
    std::fill(b1.begin(), b1.end(), 0.0);
    std::fill(b2.begin(), b2.end(), 0.0);
}

std::vector<double> mlp_forward(const MlpBaseline& m, const std::vector<double>& input) {
    if (input.size() != static_cast<std::size_t>(m.n_inputs))
        throw DimensionError("input size does not match the baseline");
    std::vector<double> hidden(static_cast<std::size_t>(m.n_hidden));
    kernels::matvec(m.w1.data(), m.n_hidden, m.n_inputs, input.data(), hidden.data());
    for (int j = 0; j < m.n_hidden; ++j) hidden[j] = act::sigmoid(hidden[j] + m.b1[j]);
    std::vector<double> y(static_cast<std::size_t>(m.n_outputs));
    kernels::matvec(m.w2.data(), m.n_outputs, m.n_hidden, hidden.data(), y.data());
    for (int j = 0; j < m.n_outputs; ++j) y[j] += m.b2[j];
    return y;
}

std::vector<double> mlp_train(MlpBaseline& m, const WindowedDataset& data,
                              const TrainConfig& cfg) {
    validate_train_config(cfg);
    const std::size_t k_flows = data.n_flows();
    const int w = data.window();
    if (m.n_inputs != w * static_cast<int>(k_flows) ||
        static_cast<std::size_t>(m.n_outputs) != k_flows)
        throw DimensionError("baseline dimensions do not match the dataset");

    const std::size_t n_samples = data.sample_count();
    Rng rng(cfg.seed);
    m.init_weights(rng, cfg.init_scale);

    std::vector<std::size_t> order(n_samples);
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<double> x(static_cast<std::size_t>(m.n_inputs));
    std::vector<double> hidden(static_cast<std::size_t>(m.n_hidden));
    std::vector<double> delta2(static_cast<std::size_t>(m.n_outputs));
    std::vector<double> delta1(static_cast<std::size_t>(m.n_hidden));
    std::vector<double> gw1(m.w1.size()), gw2(m.w2.size());
    std::vector<double> curve;
    curve.reserve(static_cast<std::size_t>(cfg.epochs));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double mse_sum = 0.0;
        for (std::size_t sample : order) {
            flatten_window(data.input(sample), k_flows, x);
            kernels::matvec(m.w1.data(), m.n_hidden, m.n_inputs, x.data(), hidden.data());
            for (int j = 0; j < m.n_hidden; ++j) hidden[j] = act::sigmoid(hidden[j] + m.b1[j]);
            std::vector<double> y(static_cast<std::size_t>(m.n_outputs));
            kernels::matvec(m.w2.data(), m.n_outputs, m.n_hidden, hidden.data(), y.data());

            const auto& target = data.target(sample).values;
            double se = 0.0;
            for (int j = 0; j < m.n_outputs; ++j) {
                y[j] += m.b2[j];
                delta2[j] = y[j] - target[j];
                se += delta2[j] * delta2[j];
            }
            if (!std::isfinite(se)) throw TrainingDivergedError(epoch, "loss is not finite");
            mse_sum += se / m.n_outputs;

            std::fill(gw2.begin(), gw2.end(), 0.0);
            kernels::ger_acc(1.0, delta2.data(), m.n_outputs, hidden.data(), m.n_hidden,
                             gw2.data());
            std::fill(delta1.begin(), delta1.end(), 0.0);
            kernels::matvec_acc_t(m.w2.data(), m.n_outputs, m.n_hidden, delta2.data(),
                                  delta1.data());
            for (int j = 0; j < m.n_hidden; ++j) delta1[j] *= act::sigmoid_deriv(hidden[j]);
            std::fill(gw1.begin(), gw1.end(), 0.0);
            kernels::ger_acc(1.0, delta1.data(), m.n_hidden, x.data(), m.n_inputs, gw1.data());

            double scale = 1.0;
            if (cfg.gradient_clip > 0.0) {
                const double norm_sq = kernels::sumsq(gw1.data(), gw1.size()) +
                                       kernels::sumsq(delta1.data(), delta1.size()) +
                                       kernels::sumsq(gw2.data(), gw2.size()) +
                                       kernels::sumsq(delta2.data(), delta2.size());
                const double norm = std::sqrt(norm_sq);
                if (norm > cfg.gradient_clip) scale = cfg.gradient_clip / norm;
            }
            const double step = -cfg.learning_rate * scale;
            kernels::axpy(step, gw1.data(), m.w1.data(), m.w1.size());
            kernels::axpy(step, delta1.data(), m.b1.data(), m.b1.size());
            kernels::axpy(step, gw2.data(), m.w2.data(), m.w2.size());
            kernels::axpy(step, delta2.data(), m.b2.data(), m.b2.size());
        }
        const double epoch_mse = mse_sum / static_cast<double>(n_samples);
        if (!std::isfinite(epoch_mse)) throw TrainingDivergedError(epoch, "loss is not finite");
        curve.push_back(epoch_mse);
    }
    return curve;
}

}  // namespace tmpred
