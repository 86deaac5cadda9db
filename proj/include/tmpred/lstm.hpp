#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "tmpred/errors.hpp"
#include "tmpred/rng.hpp"

namespace tmpred {

// Activation family used by the cells: logistic gates, cell input squashed
// to (-2,2), cell output squashed to (-1,1).
namespace act {

inline double sigmoid(double x) {
    // overflow-safe: never exponentiates a positive argument
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline double g(double x) { return 4.0 * sigmoid(x) - 2.0; }
inline double h(double x) { return 2.0 * sigmoid(x) - 1.0; }

// derivatives expressed through the stored activation value
inline double sigmoid_deriv(double sig) { return sig * (1.0 - sig); }
inline double g_deriv(double x) {
    const double s = sigmoid(x);
    return 4.0 * s * (1.0 - s);
}
inline double h_deriv(double x) {
    const double s = sigmoid(x);
    return 2.0 * s * (1.0 - s);
}

}  // namespace act

// One LSTM layer: H memory blocks of one cell each. Weight matrices are
// row-major with one row per cell: input maps are H x I, recurrent maps are
// H x H, peepholes and biases are H vectors. The cell has no peephole; input
// and forget gates peek at the previous state. The output gate peeks at the
// current state by default, or the previous state when
// output_gate_peeks_previous_state is set.
struct LstmLayer {
    int n_inputs = 0;  // I
    int n_cells = 0;   // H
    bool output_gate_peeks_previous_state = false;

    std::vector<double> w_in_ig, w_in_fg, w_in_og, w_in_cell;      // H x I
    std::vector<double> w_rec_ig, w_rec_fg, w_rec_og, w_rec_cell;  // H x H
    std::vector<double> peep_ig, peep_fg, peep_og;                 // H
    std::vector<double> bias_ig, bias_fg, bias_og, bias_cell;      // H

    static LstmLayer create(int n_inputs, int n_cells, bool peek_previous = false);
    void init_weights(Rng& rng, double scale);  // weights uniform in [-scale, scale], biases 0
};

// Everything the forward pass computed, kept for backpropagation.
// All per-step arrays are T x H row-major; inputs is a T x I copy.
struct LstmTrace {
    int steps = 0;     // T
    int n_inputs = 0;  // I
    int n_cells = 0;   // H

    std::vector<double> inputs;
    std::vector<double> a_ig, a_fg, a_og, a_cell;
    std::vector<double> b_ig, b_fg, b_og;
    std::vector<double> g_cell;  // g(a_cell)
    std::vector<double> state;   // s^t
    std::vector<double> h_state; // h(s^t)
    std::vector<double> b_out;   // cell outputs b_c^t

    // row accessors (step t is 0-based here; step -1 reads as zeros upstream)
    const double* out_row(int t) const { return b_out.data() + static_cast<std::size_t>(t) * n_cells; }
};

// Runs the layer over T steps of a flat T x I input matrix, starting from
// zero state and zero previous outputs.
LstmTrace lstm_forward(const LstmLayer& layer, const std::vector<double>& inputs_flat, int steps);

// Componentwise range check of a trace: gates in (0,1), g in (-2,2), cell
// outputs in (-1,1), used by tests after forward passes.
bool lstm_trace_in_range(const LstmTrace& trace);

// Per-weight derivatives plus the per-step delta fields of the recursion.
// input_deltas (T x I) carries dO/dx^t for stacking layers.
struct LstmGradients {
    std::vector<double> gw_in_ig, gw_in_fg, gw_in_og, gw_in_cell;
    std::vector<double> gw_rec_ig, gw_rec_fg, gw_rec_og, gw_rec_cell;
    std::vector<double> gpeep_ig, gpeep_fg, gpeep_og;
    std::vector<double> gbias_ig, gbias_fg, gbias_og, gbias_cell;

    std::vector<double> d_ig, d_fg, d_og, d_cell;  // T x H unit deltas
    std::vector<double> eps_c, eps_s;              // T x H
    std::vector<double> input_deltas;              // T x I
};

// Backpropagation through time. cell_output_error is a flat T x H array of
// dO/db_c^t injections from whatever consumes the cell outputs (the output
// layer at the last step, and the layer above at every step when stacked).
LstmGradients lstm_backward(const LstmLayer& layer, const LstmTrace& trace,
                            const std::vector<double>& cell_output_error);

// Linear readout from the last layer's cell outputs at the final step.
struct OutputLayer {
    int n_inputs = 0;
    int n_outputs = 0;
    std::vector<double> w;     // n_outputs x n_inputs, row-major
    std::vector<double> bias;  // n_outputs
};

struct Network {
    std::vector<LstmLayer> layers;
    OutputLayer output;

    static Network create(int n_inputs, const std::vector<int>& hidden_sizes, int n_outputs,
                          bool peek_previous = false);
    void init_weights(Rng& rng, double scale);
    int n_inputs() const { return layers.front().n_inputs; }
    int n_outputs() const { return output.n_outputs; }
};

// Feeds the window through the stack (cell outputs of layer l are the inputs
// of layer l+1 at the same step) and applies the readout at the final step.
std::vector<double> network_forward(const Network& net, const std::vector<double>& window_flat,
                                    int steps);

struct TrainConfig {
    double learning_rate = 0.01;
    int epochs = 100;
    std::uint64_t seed = 1;
    double gradient_clip = 5.0;  // <= 0 disables clipping
    double init_scale = 0.1;
};

class WindowedDataset;  // tm.hpp

// Stochastic gradient descent over the dataset: full BPTT per sample, loss
// O = 1/2 sum of squared errors at the final window step. Weight init and
// per-epoch sample order derive from cfg.seed. Returns the per-epoch mean
// training MSE. Throws TrainingDivergedError when the loss stops being
// finite.
std::vector<double> train(Network& net, const WindowedDataset& data, const TrainConfig& cfg);

// Feed-forward baseline: flattened window, one sigmoid hidden layer, linear
// readout.
struct MlpBaseline {
    int n_inputs = 0;
    int n_hidden = 0;
    int n_outputs = 0;
    std::vector<double> w1, b1;  // n_hidden x n_inputs, n_hidden
    std::vector<double> w2, b2;  // n_outputs x n_hidden, n_outputs

    static MlpBaseline create(int n_inputs, int n_hidden, int n_outputs);
    void init_weights(Rng& rng, double scale);
};

std::vector<double> mlp_forward(const MlpBaseline& m, const std::vector<double>& input);
std::vector<double> mlp_train(MlpBaseline& m, const WindowedDataset& data,
                              const TrainConfig& cfg);

}  // namespace tmpred
