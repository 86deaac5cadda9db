#include "tmpred/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tmpred {

// --- shared numerics -------------------------------------------------------

std::vector<double> sample_acvf(std::span<const double> x, int max_lag) {
    const std::size_t n = x.size();
    if (max_lag < 0) throw ConfigError("max_lag must be nonnegative");
    if (n == 0 || static_cast<std::size_t>(max_lag) >= n) {
        throw InsufficientDataError("series of length " + std::to_string(n) +
                                    " cannot estimate autocovariance at lag " +
                                    std::to_string(max_lag));
    }
    std::vector<double> gamma(static_cast<std::size_t>(max_lag) + 1, 0.0);
    for (int h = 0; h <= max_lag; ++h) {
        double s = 0.0;
        for (std::size_t t = 0; t + h < n; ++t) s += x[t] * x[t + h];
        gamma[h] = s / static_cast<double>(n);
    }
    return gamma;
}

std::vector<double> solve_linear_system(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    if (a.size() != n * n) throw DimensionError("matrix does not match right-hand side");
    double amax = 0.0;
    for (double v : a) amax = std::max(amax, std::fabs(v));
    if (amax == 0.0) throw DegenerateError("zero coefficient matrix");
    const double tiny = 1e-13 * amax;

    auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * n + c]; };

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(at(r, col)) > std::fabs(at(piv, col))) piv = r;
        }
        if (std::fabs(at(piv, col)) <= tiny) throw DegenerateError("singular linear system");
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(at(col, c), at(piv, c));
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = at(r, col) / at(col, col);
            if (f == 0.0) continue;
            at(r, col) = 0.0;
            for (std::size_t c = col + 1; c < n; ++c) at(r, c) -= f * at(col, c);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= at(i, c) * x[c];
        x[i] = s / at(i, i);
    }
    return x;
}

std::vector<double> polynomial_multiply(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

bool poly_roots_outside_unit_circle(std::vector<double> c) {
    for (double v : c) {
        if (!std::isfinite(v)) return false;
    }
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    while (!c.empty()) {
        const double k = c.back();
        if (!(std::fabs(k) < 1.0)) return false;
        c.pop_back();
        if (c.empty()) break;
        const std::size_t pm1 = c.size();
        const double denom = 1.0 - k * k;
        std::vector<double> next(pm1);
        for (std::size_t i = 1; i <= pm1; ++i) {
            next[i - 1] = (c[i - 1] + k * c[pm1 - i]) / denom;
        }
        c = std::move(next);
    }
    return true;
}

// --- ARMA -------------------------------------------------------------------

ArmaModel ArmaModel::create(int p, int q, std::vector<double> phi, std::vector<double> theta,
                            double noise_variance, double mean) {
    if (p < 0 || q < 0) throw InvalidModelError("orders must be nonnegative");
    if (phi.size() != static_cast<std::size_t>(p)) {
        throw InvalidModelError("expected " + std::to_string(p) + " AR coefficients");
    }
    if (theta.size() != static_cast<std::size_t>(q)) {
        throw InvalidModelError("expected " + std::to_string(q) + " MA coefficients");
    }
    if (!(noise_variance > 0.0) || !std::isfinite(noise_variance)) {
        throw InvalidModelError("noise variance must be positive");
    }
    if (!std::isfinite(mean)) throw InvalidModelError("mean must be finite");
    for (double v : phi) {
        if (!std::isfinite(v)) throw InvalidModelError("non-finite AR coefficient");
    }
    for (double v : theta) {
        if (!std::isfinite(v)) throw InvalidModelError("non-finite MA coefficient");
    }
    if (!poly_roots_outside_unit_circle(phi)) {
        throw InvalidModelError("AR polynomial is not causal");
    }
    std::vector<double> neg_theta(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) neg_theta[i] = -theta[i];
    if (!poly_roots_outside_unit_circle(std::move(neg_theta))) {
        throw InvalidModelError("MA polynomial is not invertible");
    }
    ArmaModel m;
    m.p = p;
    m.q = q;
    m.phi = std::move(phi);
    m.theta = std::move(theta);
    m.noise_variance = noise_variance;
    m.mean = mean;
    return m;
}

std::vector<double> arma_acvf(const ArmaModel& model, int max_lag) {
    if (max_lag < 0) throw ConfigError("max_lag must be nonnegative");
    const int p = model.p, q = model.q;
    const double s2 = model.noise_variance;

    // MA(infinity) weights psi_0..psi_q feed the right-hand sides.
    std::vector<double> psi(static_cast<std::size_t>(q) + 1, 0.0);
    psi[0] = 1.0;
    for (int j = 1; j <= q; ++j) {
        double s = model.theta[j - 1];
        for (int i = 1; i <= std::min(j, p); ++i) s += model.phi[i - 1] * psi[j - i];
        psi[j] = s;
    }
    auto rhs = [&](int k) {
        double s = 0.0;
        for (int j = k; j <= q; ++j) {
            const double th = (j == 0) ? 1.0 : model.theta[j - 1];
            s += th * psi[j - k];
        }
        return s2 * s;
    };

    // Linear system for gamma(0..p) from the difference equations at k=0..p.
    std::vector<double> a(static_cast<std::size_t>(p + 1) * (p + 1), 0.0);
    std::vector<double> b(static_cast<std::size_t>(p + 1), 0.0);
    for (int k = 0; k <= p; ++k) {
        a[static_cast<std::size_t>(k) * (p + 1) + k] += 1.0;
        for (int i = 1; i <= p; ++i) {
            a[static_cast<std::size_t>(k) * (p + 1) + std::abs(k - i)] -= model.phi[i - 1];
        }
        b[k] = rhs(k);
    }
    std::vector<double> head = solve_linear_system(std::move(a), std::move(b));

    std::vector<double> gamma(static_cast<std::size_t>(max_lag) + 1, 0.0);
    for (int k = 0; k <= std::min(max_lag, p); ++k) gamma[k] = head[k];
    for (int k = p + 1; k <= max_lag; ++k) {
        double s = rhs(k);
        for (int i = 1; i <= p; ++i) s += model.phi[i - 1] * gamma[k - i];
        gamma[k] = s;
    }
    return gamma;
}

InnovationsState innovations(const std::vector<double>& acvf, int n) {
    if (n < 1) throw ConfigError("innovations recursion needs n >= 1");
    if (acvf.empty() || !(acvf[0] > 0.0)) {
        throw InvalidModelError("autocovariance at lag zero must be positive");
    }
    if (acvf.size() < static_cast<std::size_t>(n) + 1) {
        throw DimensionError("autocovariance sequence shorter than requested depth");
    }
    InnovationsState st;
    st.v.assign(static_cast<std::size_t>(n) + 1, 0.0);
    st.v[0] = acvf[0];
    st.theta.resize(n);
    for (int nn = 1; nn <= n; ++nn) {
        auto& row = st.theta[nn - 1];
        row.assign(nn, 0.0);  // row[j-1] = theta_{nn,j}
        for (int k = 0; k < nn; ++k) {
            double s = acvf[nn - k];
            for (int j = 0; j < k; ++j) {
                s -= st.theta[k - 1][k - j - 1] * row[nn - j - 1] * st.v[j];
            }
            if (!(st.v[k] > 0.0)) throw DegenerateError("innovations variance vanished");
            row[nn - k - 1] = s / st.v[k];
        }
        double v = acvf[0];
        for (int j = 0; j < nn; ++j) v -= row[nn - j - 1] * row[nn - j - 1] * st.v[j];
        st.v[nn] = v;
    }
    return st;
}

ArmaForecaster::ArmaForecaster(ArmaModel model) : model_(std::move(model)) {
    m_ = static_cast<std::size_t>(std::max(model_.p, model_.q));
    gamma_ = arma_acvf(model_, static_cast<int>(2 * m_));
    v_.push_back(kappa(1, 1));
}

double ArmaForecaster::kappa(std::size_t i, std::size_t j) const {
    if (i < j) std::swap(i, j);
    const std::size_t lag = i - j;
    const double s2 = model_.noise_variance;
    if (i <= m_) return gamma_[lag] / s2;
    if (j > m_) {
        double s = 0.0;
        for (std::size_t r = 0; r + lag <= static_cast<std::size_t>(model_.q); ++r) {
            const double a = (r == 0) ? 1.0 : model_.theta[r - 1];
            const double b = (r + lag == 0) ? 1.0 : model_.theta[r + lag - 1];
            s += a * b;
        }
        return s;
    }
    if (i <= 2 * m_) {
        double g = gamma_[lag];
        for (int r = 1; r <= model_.p; ++r) {
            const std::size_t idx = static_cast<std::size_t>(
                std::abs(static_cast<long long>(r) - static_cast<long long>(lag)));
            g -= model_.phi[r - 1] * gamma_[idx];
        }
        return g / s2;
    }
    return 0.0;
}

void ArmaForecaster::extend_rows() {
    // Computes theta row and v for n = n_ (call right after the n_-th push).
    const std::size_t n = n_;
    const std::size_t q = static_cast<std::size_t>(model_.q);
    auto band = [&](std::size_t nn) { return nn < m_ ? nn : q; };
    auto theta_at = [&](std::size_t nn, std::size_t jcol) -> double {
        if (jcol == 0 || jcol > band(nn)) return 0.0;
        return rows_[nn - 1][jcol - 1];
    };

    std::vector<double> row(band(n), 0.0);
    const std::size_t kmin = n - band(n);
    for (std::size_t k = kmin; k < n; ++k) {
        double s = kappa(n + 1, k + 1);
        const std::size_t jlo = std::max(n - band(n), k - band(k));
        for (std::size_t j = jlo; j < k; ++j) {
            s -= theta_at(k, k - j) * row[n - j - 1] * v_[j];
        }
        if (!(v_[k] > 0.0)) throw DegenerateError("innovations variance vanished");
        row[n - k - 1] = s / v_[k];
    }
    double v = kappa(n + 1, n + 1);
    for (std::size_t j = kmin; j < n; ++j) {
        v -= row[n - j - 1] * row[n - j - 1] * v_[j];
    }
    rows_.push_back(std::move(row));
    v_.push_back(v);
}

void ArmaForecaster::push(double x) {
    const double xc = x - model_.mean;
    diff_.push_back(xc - next_pred_);
    x_.push_back(xc);
    ++n_;
    extend_rows();

    const std::size_t q = static_cast<std::size_t>(model_.q);
    const std::size_t n = n_;
    double pred = 0.0;
    if (n < m_) {
        const auto& row = rows_[n - 1];
        for (std::size_t j = 1; j <= row.size(); ++j) pred += row[j - 1] * diff_[n - j];
    } else {
        for (int i = 1; i <= model_.p; ++i) pred += model_.phi[i - 1] * x_[n - i];
        if (q > 0) {
            const auto& row = rows_[n - 1];
            for (std::size_t j = 1; j <= std::min<std::size_t>(q, n); ++j) {
                pred += row[j - 1] * diff_[n - j];
            }
        }
    }
    next_pred_ = pred;
}

double ArmaForecaster::predict_next() const { return model_.mean + next_pred_; }

double arma_predict_one_step(const ArmaModel& model, std::span<const double> history) {
    if (history.empty()) throw InsufficientDataError("cannot predict from empty history");
    ArmaForecaster f(model);
    for (double x : history) f.push(x);
    return f.predict_next();
}

// --- differencing / ARIMA ----------------------------------------------------

std::pair<std::vector<double>, DifferencingOp> apply_differencing(std::span<const double> series,
                                                                  int d) {
    if (d < 0) throw ConfigError("differencing level must be nonnegative");
    if (series.size() <= static_cast<std::size_t>(d)) {
        throw InsufficientDataError("series too short to difference " + std::to_string(d) +
                                    " times");
    }
    std::vector<double> cur(series.begin(), series.end());
    DifferencingOp op;
    op.d = d;
    for (int level = 0; level < d; ++level) {
        op.initial_values.push_back(cur[0]);
        for (std::size_t t = 0; t + 1 < cur.size(); ++t) cur[t] = cur[t + 1] - cur[t];
        cur.pop_back();
    }
    return {std::move(cur), std::move(op)};
}

std::vector<double> invert_differencing(std::span<const double> diffed, const DifferencingOp& op) {
    if (op.initial_values.size() != static_cast<std::size_t>(op.d)) {
        throw InvalidModelError("differencing op carries wrong seed count");
    }
    std::vector<double> cur(diffed.begin(), diffed.end());
    for (int level = op.d; level-- > 0;) {
        std::vector<double> next(cur.size() + 1);
        next[0] = op.initial_values[level];
        for (std::size_t t = 0; t < cur.size(); ++t) next[t + 1] = next[t] + cur[t];
        cur = std::move(next);
    }
    return cur;
}

double arima_predict_one_step(const ArmaModel& model, const DifferencingOp& diff,
                              std::span<const double> history) {
    if (history.size() <= static_cast<std::size_t>(diff.d)) {
        throw InsufficientDataError("history too short for differencing level " +
                                    std::to_string(diff.d));
    }
    if (diff.d == 0) return arma_predict_one_step(model, history);

    // Difference level by level, remembering each level's last value so the
    // one-step forecast can be integrated back up.
    std::vector<double> cur(history.begin(), history.end());
    double level_sum = 0.0;
    for (int level = 0; level < diff.d; ++level) {
        level_sum += cur.back();
        for (std::size_t t = 0; t + 1 < cur.size(); ++t) cur[t] = cur[t + 1] - cur[t];
        cur.pop_back();
    }
    const double pred_diff = arma_predict_one_step(model, cur);
    return pred_diff + level_sum;
}

// --- ARAR --------------------------------------------------------------------

ArarShortenResult arar_shorten(std::span<const double> series) {
    if (series.size() < 20) {
        throw InsufficientDataError("memory shortening needs at least 20 points");
    }
    std::vector<double> cur(series.begin(), series.end());
    std::vector<double> psi_full{1.0};

    for (int pass = 0; pass < 3; ++pass) {
        const std::size_t n = cur.size();
        if (n < 20) break;

        double best_err = std::numeric_limits<double>::infinity();
        double best_phi = 0.0;
        int best_tau = 0;
        for (int tau = 1; tau <= 15; ++tau) {
            double num = 0.0, den = 0.0, ysq = 0.0;
            for (std::size_t t = tau; t < n; ++t) {
                num += cur[t] * cur[t - tau];
                den += cur[t - tau] * cur[t - tau];
                ysq += cur[t] * cur[t];
            }
            if (!(den > 0.0) || !(ysq > 0.0)) continue;
            const double ph = num / den;
            double err = 0.0;
            for (std::size_t t = tau; t < n; ++t) {
                const double r = cur[t] - ph * cur[t - tau];
                err += r * r;
            }
            err /= ysq;
            if (err < best_err) {
                best_err = err;
                best_phi = ph;
                best_tau = tau;
            }
        }
        if (best_tau == 0) break;  // nothing estimable, treat as short memory

        std::vector<double> factor;
        if (best_err <= 8.0 / static_cast<double>(n) || (best_phi >= 0.93 && best_tau > 2)) {
            factor.assign(static_cast<std::size_t>(best_tau) + 1, 0.0);
            factor[0] = 1.0;
            factor[best_tau] = -best_phi;
        } else if (best_phi >= 0.93) {
            // strongly persistent at lag 1 or 2: take out a fitted AR(2)
            double s11 = 0.0, s12 = 0.0, s22 = 0.0, b1 = 0.0, b2 = 0.0;
            for (std::size_t t = 2; t < n; ++t) {
                s11 += cur[t - 1] * cur[t - 1];
                s12 += cur[t - 1] * cur[t - 2];
                s22 += cur[t - 2] * cur[t - 2];
                b1 += cur[t] * cur[t - 1];
                b2 += cur[t] * cur[t - 2];
            }
            try {
                auto sol = solve_linear_system({s11, s12, s12, s22}, {b1, b2});
                factor = {1.0, -sol[0], -sol[1]};
            } catch (const DegenerateError&) {
                break;
            }
        } else {
            break;  // short memory, done
        }

        const std::size_t deg = factor.size() - 1;
        std::vector<double> next(n - deg);
        for (std::size_t t = deg; t < n; ++t) {
            double s = 0.0;
            for (std::size_t i = 0; i <= deg; ++i) s += factor[i] * cur[t - i];
            next[t - deg] = s;
        }
        cur = std::move(next);
        psi_full = polynomial_multiply(psi_full, factor);
    }

    ArarShortenResult r;
    r.shortened = std::move(cur);
    r.psi.assign(psi_full.begin() + 1, psi_full.end());
    r.k = static_cast<int>(r.psi.size());
    return r;
}

std::vector<double> arar_combine(const std::vector<double>& psi, std::span<const int> lags,
                                 std::span<const double> phis) {
    if (lags.size() != phis.size()) throw DimensionError("lag and coefficient counts differ");
    std::vector<double> psi_full(psi.size() + 1, 0.0);
    psi_full[0] = 1.0;
    std::copy(psi.begin(), psi.end(), psi_full.begin() + 1);

    int max_lag = 0;
    for (std::size_t i = 0; i < lags.size(); ++i) {
        if (lags[i] < 1) throw ConfigError("lags must be positive");
        max_lag = std::max(max_lag, lags[i]);
    }
    std::vector<double> phi_full(static_cast<std::size_t>(max_lag) + 1, 0.0);
    phi_full[0] = 1.0;
    for (std::size_t i = 0; i < lags.size(); ++i) phi_full[lags[i]] -= phis[i];

    auto xi_full = polynomial_multiply(psi_full, phi_full);
    return {xi_full.begin() + 1, xi_full.end()};
}

namespace {
constexpr int kArarLagCap = 26;
}

ArarModel arar_fit(std::span<const double> series) {
    auto sh = arar_shorten(series);
    const auto& s = sh.shortened;
    const std::size_t n = s.size();
    if (n <= kArarLagCap) {
        throw InsufficientDataError("shortened series too short for the lag search");
    }

    double sbar = 0.0;
    for (double v : s) sbar += v;
    sbar /= static_cast<double>(n);
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) x[t] = s[t] - sbar;

    auto gamma = sample_acvf(x, kArarLagCap);
    if (!(gamma[0] > 0.0)) throw DegenerateError("shortened series has no variance");

    double best_var = std::numeric_limits<double>::infinity();
    std::vector<double> best_phi;
    std::array<int, 4> best_lags = {1, 0, 0, 0};
    bool found = false;
    std::vector<int> lags(4);
    lags[0] = 1;
    for (int l1 = 2; l1 <= kArarLagCap; ++l1) {
        for (int l2 = l1 + 1; l2 <= kArarLagCap; ++l2) {
            for (int l3 = l2 + 1; l3 <= kArarLagCap; ++l3) {
                lags[1] = l1;
                lags[2] = l2;
                lags[3] = l3;
                try {
                    auto [phi, var] = fit_ar_from_acvf(gamma, lags);
                    if (var < best_var) {
                        best_var = var;
                        best_phi = std::move(phi);
                        best_lags = {1, l1, l2, l3};
                        found = true;
                    }
                } catch (const DegenerateError&) {
                    // skip singular lag combinations
                }
            }
        }
    }
    if (!found) throw DegenerateError("no lag combination gave a solvable fit");

    ArarModel m;
    m.psi = std::move(sh.psi);
    m.k = sh.k;
    m.phi1 = best_phi[0];
    m.phi_l1 = best_phi[1];
    m.phi_l2 = best_phi[2];
    m.phi_l3 = best_phi[3];
    m.lags = best_lags;
    m.sample_mean = sbar;
    m.noise_variance = best_var;
    m.xi = arar_combine(m.psi, std::vector<int>(best_lags.begin(), best_lags.end()), best_phi);
    return m;
}

std::vector<double> arar_predict(const ArarModel& model, std::span<const double> history, int h) {
    if (h < 1) throw ConfigError("horizon must be at least 1");
    const std::size_t L = model.xi.size();
    if (history.size() < L) {
        throw InsufficientDataError("history shorter than the combined polynomial");
    }
    const double intercept = model.phi_of_one() * model.sample_mean;
    const std::size_t n = history.size();
    std::vector<double> preds;
    preds.reserve(h);
    for (int step = 1; step <= h; ++step) {
        double acc = intercept;
        for (std::size_t j = 1; j <= L; ++j) {
            const std::size_t pos = n + step - j;  // 1-based time index of the needed value
            const double val = (pos <= n) ? history[pos - 1] : preds[pos - n - 1];
            acc -= model.xi[j - 1] * val;
        }
        preds.push_back(acc);
    }
    return preds;
}

// --- subset Yule-Walker -------------------------------------------------------

std::pair<std::vector<double>, double> fit_ar_from_acvf(const std::vector<double>& gamma,
                                                        const std::vector<int>& lags) {
    if (lags.empty()) throw ConfigError("lag set must be nonempty");
    for (std::size_t i = 0; i < lags.size(); ++i) {
        if (lags[i] < 1) throw ConfigError("lags must be positive");
        if (i > 0 && lags[i] <= lags[i - 1]) throw ConfigError("lags must strictly increase");
    }
    if (gamma.size() <= static_cast<std::size_t>(lags.back())) {
        throw DimensionError("autocovariance sequence shorter than largest lag");
    }
    const std::size_t k = lags.size();
    std::vector<double> a(k * k);
    std::vector<double> b(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) a[i * k + j] = gamma[std::abs(lags[i] - lags[j])];
        b[i] = gamma[lags[i]];
    }
    auto phi = solve_linear_system(std::move(a), std::move(b));
    double var = gamma[0];
    for (std::size_t i = 0; i < k; ++i) var -= phi[i] * gamma[lags[i]];
    return {std::move(phi), std::max(0.0, var)};
}

std::pair<std::vector<double>, double> fit_ar_yule_walker(std::span<const double> series,
                                                          const std::vector<int>& lags) {
    if (lags.empty()) throw ConfigError("lag set must be nonempty");
    int max_lag = 0;
    for (int l : lags) max_lag = std::max(max_lag, l);
    if (series.size() <= static_cast<std::size_t>(max_lag)) {
        throw InsufficientDataError("series shorter than the largest requested lag");
    }
    return fit_ar_from_acvf(sample_acvf(series, max_lag), lags);
}

// --- Holt-Winters -------------------------------------------------------------

HoltWintersState hw_init(double y1, double y2, double alpha, double beta) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0,1)");
    if (!std::isfinite(y1) || !std::isfinite(y2)) throw DataError("non-finite initial values");
    return HoltWintersState{y2, y2 - y1, alpha, beta};
}

HoltWintersState hw_update(const HoltWintersState& s, double y_next) {
    if (!std::isfinite(y_next)) throw DataError("non-finite observation");
    HoltWintersState out = s;
    out.level = s.alpha * y_next + (1.0 - s.alpha) * (s.level + s.slope);
    out.slope = s.beta * (out.level - s.level) + (1.0 - s.beta) * s.slope;
    return out;
}

double hw_forecast(const HoltWintersState& s, int h) {
    if (h < 1) throw ConfigError("horizon must be at least 1");
    return s.level + s.slope * static_cast<double>(h);
}

std::pair<double, double> hw_fit(std::span<const double> series, double grid_step) {
    if (series.size() < 3) throw InsufficientDataError("need at least 3 points to fit");
    if (!(grid_step > 0.0 && grid_step < 1.0)) throw ConfigError("grid step must lie in (0,1)");

    double best_err = std::numeric_limits<double>::infinity();
    double best_a = grid_step, best_b = grid_step;
    for (int ia = 1; ia * grid_step < 1.0 - 1e-12; ++ia) {
        const double a = ia * grid_step;
        for (int ib = 1; ib * grid_step < 1.0 - 1e-12; ++ib) {
            const double b = ib * grid_step;
            auto st = hw_init(series[0], series[1], a, b);
            double err = 0.0;
            for (std::size_t i = 2; i < series.size(); ++i) {
                const double e = series[i] - (st.level + st.slope);
                err += e * e;
                st = hw_update(st, series[i]);
            }
            if (err < best_err) {
                best_err = err;
                best_a = a;
                best_b = b;
            }
        }
    }
    return {best_a, best_b};
}

}  // namespace tmpred
