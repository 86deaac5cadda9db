#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "tmpred/lstm.hpp"
#include "tmpred/tm.hpp"

using namespace tmpred;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

std::vector<std::vector<double>*> layer_params(LstmLayer& l) {
    return {&l.w_in_ig,  &l.w_in_fg,  &l.w_in_og,  &l.w_in_cell, &l.w_rec_ig,
            &l.w_rec_fg, &l.w_rec_og, &l.w_rec_cell, &l.peep_ig,  &l.peep_fg,
            &l.peep_og,  &l.bias_ig,  &l.bias_fg,  &l.bias_og,  &l.bias_cell};
}

std::vector<const std::vector<double>*> layer_grads(const LstmGradients& g) {
    return {&g.gw_in_ig,  &g.gw_in_fg,  &g.gw_in_og,  &g.gw_in_cell, &g.gw_rec_ig,
            &g.gw_rec_fg, &g.gw_rec_og, &g.gw_rec_cell, &g.gpeep_ig,  &g.gpeep_fg,
            &g.gpeep_og,  &g.gbias_ig,  &g.gbias_fg,  &g.gbias_og,  &g.gbias_cell};
}

// numeric vs analytic derivative: relative 1e-4 with an absolute floor
bool grad_close(double analytic, double numeric) {
    const double diff = std::fabs(analytic - numeric);
    const double mag = std::max(std::fabs(analytic), std::fabs(numeric));
    return diff <= 1e-7 + 1e-4 * mag;
}

// scalar objective for a single layer: fixed linear functional of the cell
// outputs, so dO/db_c is exactly the coefficient array
double layer_objective(const LstmLayer& layer, const std::vector<double>& inputs, int steps,
                       const std::vector<double>& coeff) {
    const LstmTrace tr = lstm_forward(layer, inputs, steps);
    double o = 0.0;
    for (std::size_t i = 0; i < coeff.size(); ++i) o += coeff[i] * tr.b_out[i];
    return o;
}

void check_layer_gradients(LstmLayer& layer, std::vector<double>& inputs, int steps,
                           const std::vector<double>& coeff) {
    const double fd_step = 1e-5;
    const LstmTrace tr = lstm_forward(layer, inputs, steps);
    const LstmGradients g = lstm_backward(layer, tr, coeff);

    auto params = layer_params(layer);
    auto grads = layer_grads(g);
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        std::vector<double>& p = *params[pi];
        const std::vector<double>& an = *grads[pi];
        REQUIRE(p.size() == an.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double keep = p[i];
            p[i] = keep + fd_step;
            const double up = layer_objective(layer, inputs, steps, coeff);
            p[i] = keep - fd_step;
            const double dn = layer_objective(layer, inputs, steps, coeff);
            p[i] = keep;
            const double numeric = (up - dn) / (2.0 * fd_step);
            INFO("param block ", pi, " index ", i, " analytic ", an[i], " numeric ", numeric);
            CHECK(grad_close(an[i], numeric));
        }
    }

    // input deltas against perturbed inputs
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const double keep = inputs[i];
        inputs[i] = keep + fd_step;
        const double up = layer_objective(layer, inputs, steps, coeff);
        inputs[i] = keep - fd_step;
        const double dn = layer_objective(layer, inputs, steps, coeff);
        inputs[i] = keep;
        const double numeric = (up - dn) / (2.0 * fd_step);
        INFO("input index ", i, " analytic ", g.input_deltas[i], " numeric ", numeric);
        CHECK(grad_close(g.input_deltas[i], numeric));
    }
}

// half squared error of the network output against a target
double net_loss(const Network& net, const std::vector<double>& window, int steps,
                const std::vector<double>& target) {
    const auto y = network_forward(net, window, steps);
    double o = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - target[i];
        o += 0.5 * d * d;
    }
    return o;
}

struct FullGrads {
    std::vector<LstmGradients> layers;
    std::vector<double> gw_out, gb_out;
};

// same composition the trainer uses: output error enters the top layer at
// the final step only, lower layers receive the input deltas from above
FullGrads backward_all(const Network& net, const std::vector<double>& window, int steps,
                       const std::vector<double>& target) {
    std::vector<LstmTrace> traces;
    const std::vector<double>* in = &window;
    for (const auto& layer : net.layers) {
        traces.push_back(lstm_forward(layer, *in, steps));
        in = &traces.back().b_out;
    }
    const int h_top = net.layers.back().n_cells;
    const int k = net.output.n_outputs;
    std::vector<double> y(static_cast<std::size_t>(k), 0.0);
    const double* last = traces.back().out_row(steps - 1);
    for (int r = 0; r < k; ++r) {
        double acc = net.output.bias[r];
        for (int c = 0; c < h_top; ++c) acc += net.output.w[static_cast<std::size_t>(r) * h_top + c] * last[c];
        y[r] = acc;
    }

    FullGrads fg;
    fg.gb_out.resize(static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r) fg.gb_out[r] = y[r] - target[r];
    fg.gw_out.assign(net.output.w.size(), 0.0);
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < h_top; ++c)
            fg.gw_out[static_cast<std::size_t>(r) * h_top + c] = fg.gb_out[r] * last[c];

    std::vector<double> inj(static_cast<std::size_t>(steps) * h_top, 0.0);
    for (int c = 0; c < h_top; ++c) {
        double acc = 0.0;
        for (int r = 0; r < k; ++r) acc += net.output.w[static_cast<std::size_t>(r) * h_top + c] * fg.gb_out[r];
        inj[static_cast<std::size_t>(steps - 1) * h_top + c] = acc;
    }

    fg.layers.resize(net.layers.size());
    for (std::size_t li = net.layers.size(); li-- > 0;) {
        fg.layers[li] = lstm_backward(net.layers[li], traces[li], inj);
        if (li > 0) inj = fg.layers[li].input_deltas;
    }
    return fg;
}

TrafficSeries constant_series(int n_nodes, std::size_t len, double value) {
    std::vector<TrafficVector> vecs(len);
    for (std::size_t t = 0; t < len; ++t) {
        vecs[t].values.assign(static_cast<std::size_t>(n_nodes) * n_nodes, value);
        vecs[t].timestamp = static_cast<std::int64_t>(t);
    }
    return TrafficSeries(n_nodes, 15, std::move(vecs));
}

}  // namespace

TEST_CASE("activations match their definitions and stay bounded") {
    CHECK(act::sigmoid(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(act::g(0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(act::h(0.0) == doctest::Approx(0.0).epsilon(1e-15));
    // no overflow at extreme arguments
    CHECK(act::sigmoid(1000.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(act::sigmoid(-1000.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(std::isfinite(act::g(750.0)));
    CHECK(std::isfinite(act::h(-750.0)));
    CHECK(act::g(750.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(act::h(750.0) == doctest::Approx(1.0).epsilon(1e-15));

    // derivatives against central differences
    for (double x : {-3.0, -0.7, 0.0, 0.4, 2.5}) {
        const double hstep = 1e-6;
        const double ds = (act::sigmoid(x + hstep) - act::sigmoid(x - hstep)) / (2 * hstep);
        const double dg = (act::g(x + hstep) - act::g(x - hstep)) / (2 * hstep);
        const double dh = (act::h(x + hstep) - act::h(x - hstep)) / (2 * hstep);
        CHECK(act::sigmoid_deriv(act::sigmoid(x)) == doctest::Approx(ds).epsilon(1e-8));
        CHECK(act::g_deriv(x) == doctest::Approx(dg).epsilon(1e-8));
        CHECK(act::h_deriv(x) == doctest::Approx(dh).epsilon(1e-8));
    }
}

TEST_CASE("backpropagation matches finite differences on a fixed shape") {
    const int i_dim = 3, h_dim = 4, t_dim = 5;
    Rng rng(42);
    auto layer = LstmLayer::create(i_dim, h_dim);
    layer.init_weights(rng, 0.4);
    // biases get random values too so every derivative path is exercised
    for (auto* b : {&layer.bias_ig, &layer.bias_fg, &layer.bias_og, &layer.bias_cell})
        for (auto& v : *b) v = rng.uniform(-0.3, 0.3);
    auto inputs = random_vec(rng, static_cast<std::size_t>(i_dim) * t_dim, -1.0, 1.0);
    auto coeff = random_vec(rng, static_cast<std::size_t>(h_dim) * t_dim, -1.0, 1.0);
    check_layer_gradients(layer, inputs, t_dim, coeff);
}

TEST_CASE("backpropagation matches finite differences across random shapes and seeds") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(seed);
        const int i_dim = 1 + static_cast<int>(rng.index(5));
        const int h_dim = 1 + static_cast<int>(rng.index(6));
        const int t_dim = 1 + static_cast<int>(rng.index(6));
        CAPTURE(seed);
        CAPTURE(i_dim);
        CAPTURE(h_dim);
        CAPTURE(t_dim);
        const bool peek_prev = (seed % 2) == 0;
        auto layer = LstmLayer::create(i_dim, h_dim, peek_prev);
        layer.init_weights(rng, 0.5);
        for (auto* b : {&layer.bias_ig, &layer.bias_fg, &layer.bias_og, &layer.bias_cell})
            for (auto& v : *b) v = rng.uniform(-0.4, 0.4);
        auto inputs = random_vec(rng, static_cast<std::size_t>(i_dim) * t_dim, -1.2, 1.2);
        auto coeff = random_vec(rng, static_cast<std::size_t>(h_dim) * t_dim, -1.0, 1.0);
        check_layer_gradients(layer, inputs, t_dim, coeff);
    }
}

TEST_CASE("stacked network gradients match finite differences") {
    Rng rng(7);
    auto net = Network::create(3, {4, 3}, 3);
    net.init_weights(rng, 0.4);
    for (auto& v : net.output.bias) v = rng.uniform(-0.2, 0.2);
    const int t_dim = 4;
    auto window = random_vec(rng, 3 * t_dim, 0.0, 1.0);
    auto target = random_vec(rng, 3, 0.0, 1.0);

    const FullGrads fg = backward_all(net, window, t_dim, target);
    const double fd_step = 1e-5;

    auto check_block = [&](std::vector<double>& p, const std::vector<double>& an) {
        REQUIRE(p.size() == an.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double keep = p[i];
            p[i] = keep + fd_step;
            const double up = net_loss(net, window, t_dim, target);
            p[i] = keep - fd_step;
            const double dn = net_loss(net, window, t_dim, target);
            p[i] = keep;
            const double numeric = (up - dn) / (2.0 * fd_step);
            INFO("index ", i, " analytic ", an[i], " numeric ", numeric);
            CHECK(grad_close(an[i], numeric));
        }
    };

    check_block(net.output.w, fg.gw_out);
    check_block(net.output.bias, fg.gb_out);
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        auto params = layer_params(net.layers[li]);
        auto grads = layer_grads(fg.layers[li]);
        for (std::size_t pi = 0; pi < params.size(); ++pi) {
            CAPTURE(li);
            CAPTURE(pi);
            check_block(*params[pi], *grads[pi]);
        }
    }
}

TEST_CASE("all-zero weights and inputs produce half-open gates and zero outputs") {
    auto layer = LstmLayer::create(2, 3);
    std::vector<double> inputs(2 * 4, 0.0);
    const auto tr = lstm_forward(layer, inputs, 4);
    for (double v : tr.b_ig) CHECK(v == 0.5);
    for (double v : tr.b_fg) CHECK(v == 0.5);
    for (double v : tr.b_og) CHECK(v == 0.5);
    for (double v : tr.state) CHECK(v == 0.0);
    for (double v : tr.b_out) CHECK(v == 0.0);
}

TEST_CASE("saturated gates drive the one-step output to h of the cell limit") {
    auto layer = LstmLayer::create(1, 1);
    layer.bias_ig[0] = 40.0;   // input gate pinned open
    layer.bias_og[0] = 40.0;   // output gate pinned open
    layer.bias_fg[0] = -40.0;  // forget gate closed (irrelevant at step one)
    layer.bias_cell[0] = 40.0; // g saturates at its upper limit of 2
    std::vector<double> inputs{0.0};
    const auto tr = lstm_forward(layer, inputs, 1);
    // state ~ 2, output ~ h(2) = 2*sigmoid(2) - 1
    CHECK(tr.b_out[0] == doctest::Approx(0.76159415595576485).epsilon(1e-3));
}

TEST_CASE("an open forget gate preserves the stored state across steps") {
    auto layer = LstmLayer::create(1, 1);
    layer.w_in_ig[0] = 80.0;
    layer.bias_ig[0] = -40.0;  // input gate open only while x = 1
    layer.bias_fg[0] = 40.0;   // forget gate pinned open
    layer.bias_og[0] = 40.0;   // output gate pinned open
    layer.w_in_cell[0] = 1.0;  // cell input g(1) loaded at the first step
    const int t_dim = 6;
    std::vector<double> inputs(t_dim, 0.0);
    inputs[0] = 1.0;
    const auto tr = lstm_forward(layer, inputs, t_dim);
    const double loaded = act::g(1.0);
    CHECK(tr.state[t_dim - 1] == doctest::Approx(loaded).epsilon(1e-6));
    CHECK(tr.b_out[t_dim - 1] == doctest::Approx(act::h(loaded)).epsilon(1e-6));
}

TEST_CASE("zero output error yields exactly zero gradients") {
    Rng rng(3);
    auto layer = LstmLayer::create(3, 4);
    layer.init_weights(rng, 0.5);
    auto inputs = random_vec(rng, 3 * 5, -1.0, 1.0);
    const auto tr = lstm_forward(layer, inputs, 5);
    const std::vector<double> zero_err(4 * 5, 0.0);
    const auto g = lstm_backward(layer, tr, zero_err);
    for (const auto* blk : layer_grads(g))
        for (double v : *blk) CHECK(v == 0.0);
    for (double v : g.input_deltas) CHECK(v == 0.0);
}

TEST_CASE("traces stay inside the activation ranges") {
    Rng rng(11);
    for (int rep = 0; rep < 5; ++rep) {
        auto layer = LstmLayer::create(4, 6);
        layer.init_weights(rng, 2.0);  // deliberately large weights
        auto inputs = random_vec(rng, 4 * 10, -3.0, 3.0);
        const auto tr = lstm_forward(layer, inputs, 10);
        CHECK(lstm_trace_in_range(tr));
    }
}

TEST_CASE("permuting hidden units leaves the network function unchanged") {
    Rng rng(19);
    const int h_dim = 5;
    auto net = Network::create(3, {h_dim}, 2);
    net.init_weights(rng, 0.6);
    for (auto& v : net.output.bias) v = rng.uniform(-0.5, 0.5);
    const int t_dim = 4;
    auto window = random_vec(rng, 3 * t_dim, -1.0, 1.0);
    const auto y_ref = network_forward(net, window, t_dim);

    const std::vector<int> perm{2, 0, 4, 1, 3};
    Network per = Network::create(3, {h_dim}, 2);
    const LstmLayer& src = net.layers[0];
    LstmLayer& dst = per.layers[0];
    for (int c = 0; c < h_dim; ++c) {
        for (int j = 0; j < 3; ++j) {
            dst.w_in_ig[static_cast<std::size_t>(perm[c]) * 3 + j] = src.w_in_ig[static_cast<std::size_t>(c) * 3 + j];
            dst.w_in_fg[static_cast<std::size_t>(perm[c]) * 3 + j] = src.w_in_fg[static_cast<std::size_t>(c) * 3 + j];
            dst.w_in_og[static_cast<std::size_t>(perm[c]) * 3 + j] = src.w_in_og[static_cast<std::size_t>(c) * 3 + j];
            dst.w_in_cell[static_cast<std::size_t>(perm[c]) * 3 + j] = src.w_in_cell[static_cast<std::size_t>(c) * 3 + j];
        }
        for (int j = 0; j < h_dim; ++j) {
            dst.w_rec_ig[static_cast<std::size_t>(perm[c]) * h_dim + perm[j]] = src.w_rec_ig[static_cast<std::size_t>(c) * h_dim + j];
            dst.w_rec_fg[static_cast<std::size_t>(perm[c]) * h_dim + perm[j]] = src.w_rec_fg[static_cast<std::size_t>(c) * h_dim + j];
            dst.w_rec_og[static_cast<std::size_t>(perm[c]) * h_dim + perm[j]] = src.w_rec_og[static_cast<std::size_t>(c) * h_dim + j];
            dst.w_rec_cell[static_cast<std::size_t>(perm[c]) * h_dim + perm[j]] = src.w_rec_cell[static_cast<std::size_t>(c) * h_dim + j];
        }
        dst.peep_ig[perm[c]] = src.peep_ig[c];
        dst.peep_fg[perm[c]] = src.peep_fg[c];
        dst.peep_og[perm[c]] = src.peep_og[c];
        dst.bias_ig[perm[c]] = src.bias_ig[c];
        dst.bias_fg[perm[c]] = src.bias_fg[c];
        dst.bias_og[perm[c]] = src.bias_og[c];
        dst.bias_cell[perm[c]] = src.bias_cell[c];
        for (int r = 0; r < 2; ++r)
            per.output.w[static_cast<std::size_t>(r) * h_dim + perm[c]] = net.output.w[static_cast<std::size_t>(r) * h_dim + c];
    }
    per.output.bias = net.output.bias;

    const auto y_per = network_forward(per, window, t_dim);
    for (std::size_t i = 0; i < y_ref.size(); ++i)
        CHECK(y_per[i] == doctest::Approx(y_ref[i]).epsilon(1e-12));
}

TEST_CASE("network forward equals manual layer forward plus readout") {
    Rng rng(23);
    auto net = Network::create(4, {5}, 4);
    net.init_weights(rng, 0.3);
    auto window = random_vec(rng, 4 * 3, 0.0, 1.0);
    const auto y = network_forward(net, window, 3);

    const auto tr = lstm_forward(net.layers[0], window, 3);
    const double* last = tr.out_row(2);
    for (int r = 0; r < 4; ++r) {
        double acc = net.output.bias[r];
        for (int c = 0; c < 5; ++c) acc += net.output.w[static_cast<std::size_t>(r) * 5 + c] * last[c];
        CHECK(y[r] == doctest::Approx(acc).epsilon(1e-14));
    }
}

TEST_CASE("forward and backward validate their inputs") {
    auto layer = LstmLayer::create(2, 3);
    std::vector<double> inputs(2 * 4, 0.0);
    CHECK_THROWS_AS(lstm_forward(layer, inputs, 5), DimensionError);
    CHECK_THROWS_AS(lstm_forward(layer, inputs, 0), ConfigError);
    const auto tr = lstm_forward(layer, inputs, 4);
    std::vector<double> bad_err(3, 0.0);
    CHECK_THROWS_AS(lstm_backward(layer, tr, bad_err), DimensionError);
    CHECK_THROWS_AS(LstmLayer::create(0, 3), ConfigError);
    CHECK_THROWS_AS(Network::create(2, {}, 2), ConfigError);
    CHECK_THROWS_AS(Network::create(2, {0}, 2), ConfigError);
}

TEST_CASE("training is deterministic for a fixed seed") {
    const auto series = constant_series(2, 30, 0.4);
    // make it non-trivial: add a deterministic ripple
    std::vector<TrafficVector> vecs(series.vectors());
    for (std::size_t t = 0; t < vecs.size(); ++t)
        for (auto& v : vecs[t].values) v += 0.2 * std::sin(0.7 * static_cast<double>(t));
    const TrafficSeries ripple(2, 15, std::move(vecs));
    const WindowedDataset data(ripple, 3);

    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.seed = 99;

    auto net1 = Network::create(4, {6}, 4);
    const auto curve1 = train(net1, data, cfg);
    auto net2 = Network::create(4, {6}, 4);
    const auto curve2 = train(net2, data, cfg);

    REQUIRE(curve1.size() == 5);
    CHECK(curve1 == curve2);
    CHECK(net1.output.w == net2.output.w);
    for (std::size_t li = 0; li < net1.layers.size(); ++li) {
        CHECK(net1.layers[li].w_in_ig == net2.layers[li].w_in_ig);
        CHECK(net1.layers[li].w_rec_cell == net2.layers[li].w_rec_cell);
        CHECK(net1.layers[li].peep_og == net2.layers[li].peep_og);
    }
}

TEST_CASE("a vanishing learning rate leaves the initialized weights in place") {
    const auto series = constant_series(2, 20, 0.6);
    const WindowedDataset data(series, 3);

    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.seed = 5;
    cfg.learning_rate = 1e-16;

    auto net = Network::create(4, {4}, 4);
    train(net, data, cfg);

    // reproduce the initialization alone
    auto ref = Network::create(4, {4}, 4);
    Rng rng(cfg.seed);
    ref.init_weights(rng, cfg.init_scale);

    auto max_abs_diff = [](const std::vector<double>& a, const std::vector<double>& b) {
        double m = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
        return m;
    };
    CHECK(max_abs_diff(net.output.w, ref.output.w) <= 1e-12);
    CHECK(max_abs_diff(net.layers[0].w_in_ig, ref.layers[0].w_in_ig) <= 1e-12);
    CHECK(max_abs_diff(net.layers[0].w_rec_fg, ref.layers[0].w_rec_fg) <= 1e-12);
    CHECK(max_abs_diff(net.layers[0].bias_og, ref.layers[0].bias_og) <= 1e-12);
}

TEST_CASE("training converges on a constant target") {
    const auto series = constant_series(2, 40, 0.7);
    const WindowedDataset data(series, 3);

    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.seed = 1;

    auto net = Network::create(4, {8}, 4);
    const auto curve = train(net, data, cfg);
    REQUIRE(!curve.empty());
    CHECK(curve.back() < 1e-3);
    CHECK(curve.back() <= curve.front());
}

TEST_CASE("training reports divergence instead of returning garbage") {
    const auto series = constant_series(2, 25, 0.5);
    const WindowedDataset data(series, 3);

    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.seed = 2;
    cfg.learning_rate = 1e6;  // guaranteed blow-up
    cfg.gradient_clip = 0.0;  // clipping disabled
    cfg.init_scale = 2.0;

    auto net = Network::create(4, {6}, 4);
    CHECK_THROWS_AS(train(net, data, cfg), TrainingDivergedError);
}

TEST_CASE("training validates configuration and dimensions") {
    const auto series = constant_series(2, 20, 0.5);
    const WindowedDataset data(series, 3);
    auto net = Network::create(4, {4}, 4);

    TrainConfig bad;
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(train(net, data, bad), ConfigError);
    bad = TrainConfig{};
    bad.epochs = 0;
    CHECK_THROWS_AS(train(net, data, bad), ConfigError);

    auto wrong = Network::create(5, {4}, 5);
    CHECK_THROWS_AS(train(wrong, data, TrainConfig{}), DimensionError);
}

TEST_CASE("baseline gradients match finite differences") {
    Rng rng(31);
    auto m = MlpBaseline::create(4, 3, 2);
    m.init_weights(rng, 0.5);
    for (auto& v : m.b1) v = rng.uniform(-0.3, 0.3);
    for (auto& v : m.b2) v = rng.uniform(-0.3, 0.3);
    auto x = random_vec(rng, 4, -1.0, 1.0);
    auto target = random_vec(rng, 2, -1.0, 1.0);

    auto loss = [&]() {
        const auto y = mlp_forward(m, x);
        double o = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) o += 0.5 * (y[i] - target[i]) * (y[i] - target[i]);
        return o;
    };

    // analytic gradients, same composition the trainer applies
    std::vector<double> hidden(3);
    for (int j = 0; j < 3; ++j) {
        double acc = m.b1[j];
        for (int i = 0; i < 4; ++i) acc += m.w1[static_cast<std::size_t>(j) * 4 + i] * x[i];
        hidden[j] = act::sigmoid(acc);
    }
    const auto y = mlp_forward(m, x);
    std::vector<double> d2(2), d1(3, 0.0);
    for (int r = 0; r < 2; ++r) d2[r] = y[r] - target[r];
    for (int j = 0; j < 3; ++j) {
        for (int r = 0; r < 2; ++r) d1[j] += m.w2[static_cast<std::size_t>(r) * 3 + j] * d2[r];
        d1[j] *= act::sigmoid_deriv(hidden[j]);
    }

    const double fd_step = 1e-5;
    auto check_block = [&](std::vector<double>& p, auto analytic_at) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double keep = p[i];
            p[i] = keep + fd_step;
            const double up = loss();
            p[i] = keep - fd_step;
            const double dn = loss();
            p[i] = keep;
            const double numeric = (up - dn) / (2.0 * fd_step);
            CHECK(grad_close(analytic_at(i), numeric));
        }
    };
    check_block(m.w2, [&](std::size_t i) { return d2[i / 3] * hidden[i % 3]; });
    check_block(m.b2, [&](std::size_t i) { return d2[i]; });
    check_block(m.w1, [&](std::size_t i) { return d1[i / 4] * x[i % 4]; });
    check_block(m.b1, [&](std::size_t i) { return d1[i]; });
}

TEST_CASE("baseline learns a linear relationship to high accuracy") {
    // targets are an exact linear map of the flattened window
    Rng rng(8);
    const int n_nodes = 2, window = 2;
    const std::size_t k_flows = 4, t_len = 40;
    std::vector<double> a_map(k_flows * window * k_flows);
    for (auto& v : a_map) v = rng.uniform(-0.1, 0.1);  // row sums below 1 keep the series bounded

    std::vector<TrafficVector> vecs(t_len);
    for (std::size_t t = 0; t < t_len; ++t) {
        vecs[t].values = random_vec(rng, k_flows, 0.0, 1.0);
        vecs[t].timestamp = static_cast<std::int64_t>(t);
    }
    // overwrite each target slot with the mapped value of its window
    for (std::size_t t = window; t < t_len; ++t) {
        std::vector<double> flat;
        for (int s = window; s >= 1; --s)
            flat.insert(flat.end(), vecs[t - s].values.begin(), vecs[t - s].values.end());
        for (std::size_t r = 0; r < k_flows; ++r) {
            double acc = 0.3;
            for (std::size_t c = 0; c < flat.size(); ++c) acc += a_map[r * flat.size() + c] * flat[c];
            vecs[t].values[r] = acc;
        }
    }
    const TrafficSeries series(n_nodes, 15, std::move(vecs));
    const WindowedDataset data(series, window);

    TrainConfig cfg;
    cfg.epochs = 2000;
    cfg.learning_rate = 0.05;
    cfg.seed = 4;

    auto m = MlpBaseline::create(window * static_cast<int>(k_flows), 12, static_cast<int>(k_flows));
    const auto curve = mlp_train(m, data, cfg);
    CHECK(curve.back() < 1e-4);
}

TEST_CASE("baseline validates dimensions") {
    const auto series = constant_series(2, 20, 0.5);
    const WindowedDataset data(series, 3);
    auto wrong = MlpBaseline::create(5, 4, 4);
    CHECK_THROWS_AS(mlp_train(wrong, data, TrainConfig{}), DimensionError);
    auto m = MlpBaseline::create(4, 4, 4);
    std::vector<double> short_in(3, 0.0);
    CHECK_THROWS_AS(mlp_forward(m, short_in), DimensionError);
    CHECK_THROWS_AS(MlpBaseline::create(0, 1, 1), ConfigError);
}
