#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "tmpred/errors.hpp"

namespace tmpred {

// --- shared numerics -------------------------------------------------------

// Biased sample autocovariances gamma(0..max_lag) of a zero-mean series:
// gamma(h) = (1/n) sum_t x[t] x[t+h]. The n divisor keeps the autocovariance
// matrix positive semidefinite.
std::vector<double> sample_acvf(std::span<const double> x, int max_lag);

// Solves the dense n x n system A x = b by Gaussian elimination with partial
// pivoting; A row-major, consumed. Throws DegenerateError when singular.
std::vector<double> solve_linear_system(std::vector<double> a, std::vector<double> b);

// Coefficient-wise polynomial product (lowest degree first).
std::vector<double> polynomial_multiply(std::span<const double> a, std::span<const double> b);

// True when the polynomial 1 - c[0] z - c[1] z^2 - ... has all roots strictly
// outside the unit circle (reflection-coefficient step-down test).
bool poly_roots_outside_unit_circle(std::vector<double> c);

// --- ARMA -------------------------------------------------------------------

// Zero-mean ARMA(p,q) around `mean`:
//   X_t = phi_1 X_{t-1} + ... + phi_p X_{t-p} + Z_t + theta_1 Z_{t-1} + ...
struct ArmaModel {
    int p = 0;
    int q = 0;
    std::vector<double> phi;
    std::vector<double> theta;
    double noise_variance = 1.0;
    double mean = 0.0;

    // Validates orders, coefficient counts, sigma^2 > 0, causality of phi and
    // invertibility of theta. Throws InvalidModelError.
    static ArmaModel create(int p, int q, std::vector<double> phi, std::vector<double> theta,
                            double noise_variance, double mean = 0.0);
};

// Model autocovariances gamma(0..max_lag), computed exactly from the defining
// difference equations (linear solve for gamma(0..p), then recursion).
std::vector<double> arma_acvf(const ArmaModel& model, int max_lag);

// Innovations recursion output. theta[k] holds row n = k+1 of the triangular
// coefficient table, entries theta_{n,1} .. theta_{n,n}; v holds the one-step
// mean squared errors v_0 .. v_n.
struct InnovationsState {
    std::vector<std::vector<double>> theta;
    std::vector<double> v;
    int m = 0;  // max(p, q) when derived from an ARMA model, else 0
};

// Plain innovations recursion on a raw autocovariance sequence.
// Needs acvf[0] > 0 (InvalidModelError) and acvf.size() > n (DimensionError).
InnovationsState innovations(const std::vector<double>& acvf, int n);

// Incremental one-step predictor for an ArmaModel. Push observations in time
// order; predict_next() returns the best linear predictor of the following
// value given everything pushed so far. Internally uses the innovations
// recursion on the m = max(p,q) transformed process, so each step costs
// O(q * max(p,q)) after the first m observations.
class ArmaForecaster {
public:
    explicit ArmaForecaster(ArmaModel model);

    double predict_next() const;
    void push(double x);
    std::size_t observed() const { return n_; }

private:
    double kappa(std::size_t i, std::size_t j) const;  // transformed autocovariance
    void extend_rows();                                 // computes row n_

    ArmaModel model_;
    std::size_t m_ = 0;
    std::vector<double> gamma_;   // model acvf up to 2m
    std::vector<std::vector<double>> rows_;  // banded theta rows
    std::vector<double> v_;
    std::vector<double> x_;       // mean-corrected observations
    std::vector<double> diff_;    // innovations x_i - xhat_i
    double next_pred_ = 0.0;      // mean-corrected prediction of x_{n+1}
    std::size_t n_ = 0;
};

// One-step forecast of the value following `history` under `model`.
// Throws InsufficientDataError on empty history.
double arma_predict_one_step(const ArmaModel& model, std::span<const double> history);

// --- differencing / ARIMA ----------------------------------------------------

struct DifferencingOp {
    int d = 0;
    std::vector<double> initial_values;  // first element at each level, for exact inversion
};

std::pair<std::vector<double>, DifferencingOp> apply_differencing(std::span<const double> series,
                                                                  int d);
std::vector<double> invert_differencing(std::span<const double> diffed, const DifferencingOp& op);

// Differences the history diff.d times, forecasts one step with the inner
// model, and integrates back to the original scale.
double arima_predict_one_step(const ArmaModel& model, const DifferencingOp& diff,
                              std::span<const double> history);

// --- ARAR --------------------------------------------------------------------

struct ArarModel {
    std::vector<double> psi;  // memory-shortening polynomial, psi_1..psi_k
    int k = 0;                // degree of psi
    double phi1 = 0.0, phi_l1 = 0.0, phi_l2 = 0.0, phi_l3 = 0.0;
    std::array<int, 4> lags = {1, 0, 0, 0};
    double sample_mean = 0.0;     // mean of the shortened series
    double noise_variance = 0.0;
    std::vector<double> xi;       // xi_1..xi_{k+l3}, combined polynomial

    double phi_of_one() const { return 1.0 - phi1 - phi_l1 - phi_l2 - phi_l3; }
};

struct ArarShortenResult {
    std::vector<double> shortened;
    std::vector<double> psi;
    int k = 0;
};

// Applies the ARAR memory-shortening classification up to three times and
// returns S_t = Y_t + sum_i psi_i Y_{t-i} together with the accumulated psi.
ArarShortenResult arar_shorten(std::span<const double> series);

// xi such that 1 + sum xi_j B^j = (1 + sum psi_i B^i) * (1 - sum phi over lags).
std::vector<double> arar_combine(const std::vector<double>& psi, std::span<const int> lags,
                                 std::span<const double> phis);

// Shortens, mean-corrects, and fits the subset AR over lag sets
// {1, l1, l2, l3}, 1 < l1 < l2 < l3 <= 26, minimizing the Yule-Walker
// residual variance.
ArarModel arar_fit(std::span<const double> series);

// h predictions ahead of `history` via the combined-polynomial recursion;
// earlier predictions feed later horizons.
std::vector<double> arar_predict(const ArarModel& model, std::span<const double> history, int h);

// --- subset Yule-Walker -------------------------------------------------------

// Fits AR coefficients on the given strictly increasing lag set to a
// zero-mean series; returns (coefficients in lag order, residual variance).
std::pair<std::vector<double>, double> fit_ar_yule_walker(std::span<const double> series,
                                                          const std::vector<int>& lags);

// Same fit from precomputed autocovariances (gamma.size() > max lag).
std::pair<std::vector<double>, double> fit_ar_from_acvf(const std::vector<double>& gamma,
                                                        const std::vector<int>& lags);

// --- Holt-Winters -------------------------------------------------------------

struct HoltWintersState {
    double level = 0.0;
    double slope = 0.0;
    double alpha = 0.5;
    double beta = 0.5;
};

HoltWintersState hw_init(double y1, double y2, double alpha, double beta);
HoltWintersState hw_update(const HoltWintersState& s, double y_next);
double hw_forecast(const HoltWintersState& s, int h);

// Grid search over alpha, beta in (0,1) at grid_step resolution, minimizing
// the sum of squared one-step errors from the third point on. Ties prefer
// smaller alpha, then smaller beta.
std::pair<double, double> hw_fit(std::span<const double> series, double grid_step);

}  // namespace tmpred
