#include "tmpred/dataio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "tmpred/errors.hpp"
#include "tmpred/rng.hpp"

namespace tmpred {

namespace {

// Splits one CSV line on commas; no quoting in this format.
std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

bool parse_int(std::string_view s, std::int64_t& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool parse_double(std::string_view s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

// Exact integer square root test; returns -1 when n is not a perfect square.
int exact_sqrt(std::size_t n) {
    if (n == 0) return -1;
    const auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    for (std::size_t c = (r > 1 ? r - 1 : 0); c <= r + 1; ++c) {
        if (c * c == n) return static_cast<int>(c);
    }
    return -1;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw IoError("could not format value");
    return std::string(buf, ptr);
}

TrafficSeries load_csv(std::istream& in, const TmCsvFormat& fmt) {
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) throw ParseError(1, "empty input, expected header");
    ++lineno;
    auto header = split_fields(line);
    if (header.empty() || header[0] != "t") {
        throw ParseError(lineno, "header must start with column 't'");
    }
    const std::size_t n_flows = header.size() - 1;
    if (n_flows == 0) throw ParseError(lineno, "header names no flow columns");
    for (std::size_t k = 0; k < n_flows; ++k) {
        if (header[k + 1] != "f" + std::to_string(k)) {
            throw ParseError(lineno, "flow column " + std::to_string(k + 1) +
                                         " must be named f" + std::to_string(k));
        }
    }
    const int n_nodes = exact_sqrt(n_flows);
    if (n_nodes < 0) {
        throw ParseError(lineno, "flow count " + std::to_string(n_flows) +
                                     " is not a perfect square");
    }

    std::vector<TrafficVector> vectors;
    bool have_prev = false;
    std::int64_t prev_slot = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() && in.eof()) break;  // trailing newline
        auto fields = split_fields(line);
        if (fields.size() != n_flows + 1) {
            throw ParseError(lineno, "row has " + std::to_string(fields.size()) +
                                         " columns, expected " + std::to_string(n_flows + 1));
        }
        TrafficVector v;
        if (!parse_int(fields[0], v.timestamp)) {
            throw ParseError(lineno, "bad slot index '" + std::string(fields[0]) + "'");
        }
        if (have_prev && v.timestamp != prev_slot + 1) {
            throw ParseError(lineno, "slot index " + std::to_string(v.timestamp) +
                                         " does not follow " + std::to_string(prev_slot));
        }
        prev_slot = v.timestamp;
        have_prev = true;

        v.values.resize(n_flows);
        for (std::size_t k = 0; k < n_flows; ++k) {
            double x;
            if (!parse_double(fields[k + 1], x)) {
                throw ParseError(lineno, "bad value '" + std::string(fields[k + 1]) +
                                             "' in column f" + std::to_string(k));
            }
            if (!std::isfinite(x)) {
                throw ParseError(lineno, "non-finite value in column f" + std::to_string(k));
            }
            if (x < 0.0) {
                throw ParseError(lineno, "negative value in column f" + std::to_string(k));
            }
            v.values[k] = x;
        }
        vectors.push_back(std::move(v));
    }

    return TrafficSeries(n_nodes, fmt.interval_minutes, std::move(vectors));
}

TrafficSeries load_csv(const std::string& path, const TmCsvFormat& fmt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return load_csv(in, fmt);
}

void save_csv(const TrafficSeries& series, std::ostream& out) {
    const std::size_t n_flows = series.n_flows();
    out << 't';
    for (std::size_t k = 0; k < n_flows; ++k) out << ",f" << k;
    out << '\n';
    for (std::size_t t = 0; t < series.size(); ++t) {
        const auto& v = series[t];
        out << v.timestamp;
        for (double x : v.values) out << ',' << format_double(x);
        out << '\n';
    }
    if (!out) throw IoError("write failed while saving series");
}

void save_csv(const TrafficSeries& series, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    save_csv(series, out);
    out.flush();
    if (!out) throw IoError("write failed while saving '" + path + "'");
}

void SyntheticConfig::validate() const {
    if (n_nodes <= 0) throw ConfigError("n_nodes must be positive");
    if (n_slots <= 0) throw ConfigError("n_slots must be positive");
    if (interval_minutes <= 0) throw ConfigError("interval_minutes must be positive");
    if (diurnal_amplitude < 0.0) throw ConfigError("diurnal_amplitude must be nonnegative");
    if (weekly_amplitude < 0.0) throw ConfigError("weekly_amplitude must be nonnegative");
    if (!(noise_phi > -1.0 && noise_phi < 1.0)) {
        throw ConfigError("noise_phi must lie in (-1, 1)");
    }
    if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be nonnegative");
    if (spike_rate < 0.0 || spike_rate > 1.0) throw ConfigError("spike_rate must lie in [0, 1]");
    if (!(base_volume_range.first > 0.0) ||
        base_volume_range.second < base_volume_range.first) {
        throw ConfigError("base_volume_range must be a positive interval");
    }
}

TrafficSeries generate_synthetic(const SyntheticConfig& cfg) {
    cfg.validate();
    const std::size_t n_flows = static_cast<std::size_t>(cfg.n_nodes) * cfg.n_nodes;
    const std::size_t T = static_cast<std::size_t>(cfg.n_slots);
    const double diurnal_period = 24.0 * 60.0 / cfg.interval_minutes;
    const double weekly_period = 7.0 * diurnal_period;
    constexpr double two_pi = 2.0 * std::numbers::pi;

    Rng rng(cfg.seed);
    // Column-major scratch: one contiguous run per OD pair.
    std::vector<double> cols(n_flows * T);
    for (std::size_t k = 0; k < n_flows; ++k) {
        const double base = rng.uniform(cfg.base_volume_range.first, cfg.base_volume_range.second);
        const double d_phase = rng.uniform(0.0, two_pi);
        const double d_amp = cfg.diurnal_amplitude * rng.uniform(0.5, 1.5);
        const double w_phase = rng.uniform(0.0, two_pi);
        const double w_amp = cfg.weekly_amplitude * rng.uniform(0.5, 1.5);

        const double sigma = cfg.noise_sigma;
        // Stationary start so the noise has no warm-up transient.
        double noise = rng.normal(0.0, sigma / std::sqrt(1.0 - cfg.noise_phi * cfg.noise_phi));
        double* col = cols.data() + k * T;
        for (std::size_t t = 0; t < T; ++t) {
            if (t > 0) noise = cfg.noise_phi * noise + rng.normal(0.0, sigma);
            double rel = 1.0 + d_amp * std::sin(two_pi * t / diurnal_period + d_phase) +
                         w_amp * std::sin(two_pi * t / weekly_period + w_phase) + noise;
            if (cfg.spike_rate > 0.0 && rng.uniform() < cfg.spike_rate) {
                rel *= rng.uniform(1.5, 3.0);
            }
            col[t] = std::max(0.0, base * rel);
        }
    }

    std::vector<TrafficVector> vectors(T);
    for (std::size_t t = 0; t < T; ++t) {
        vectors[t].timestamp = static_cast<std::int64_t>(t);
        vectors[t].values.resize(n_flows);
        for (std::size_t k = 0; k < n_flows; ++k) vectors[t].values[k] = cols[k * T + t];
    }
    return TrafficSeries(cfg.n_nodes, cfg.interval_minutes, std::move(vectors));
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

SyntheticConfig parse_synthetic_config(std::istream& in, SyntheticConfig base) {
    SyntheticConfig cfg = base;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view body(line);
        if (const auto hash = body.find('#'); hash != std::string_view::npos) {
            body = body.substr(0, hash);
        }
        body = trim(body);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(lineno, "expected key = value");
        }
        const std::string_view key = trim(body.substr(0, eq));
        const std::string_view val = trim(body.substr(eq + 1));
        if (key.empty() || val.empty()) throw ParseError(lineno, "expected key = value");

        auto int_field = [&](auto& field) {
            std::int64_t v = 0;
            if (!parse_int(val, v)) {
                throw ParseError(lineno, "bad integer '" + std::string(val) + "'");
            }
            field = static_cast<std::decay_t<decltype(field)>>(v);
        };
        auto real_field = [&](double& field) {
            double v = 0;
            if (!parse_double(val, v)) {
                throw ParseError(lineno, "bad number '" + std::string(val) + "'");
            }
            field = v;
        };

        if (key == "n_nodes") int_field(cfg.n_nodes);
        else if (key == "n_slots") int_field(cfg.n_slots);
        else if (key == "interval_minutes") int_field(cfg.interval_minutes);
        else if (key == "seed") int_field(cfg.seed);
        else if (key == "diurnal_amplitude") real_field(cfg.diurnal_amplitude);
        else if (key == "weekly_amplitude") real_field(cfg.weekly_amplitude);
        else if (key == "noise_phi") real_field(cfg.noise_phi);
        else if (key == "noise_sigma") real_field(cfg.noise_sigma);
        else if (key == "spike_rate") real_field(cfg.spike_rate);
        else if (key == "base_volume_min") real_field(cfg.base_volume_range.first);
        else if (key == "base_volume_max") real_field(cfg.base_volume_range.second);
        else throw ParseError(lineno, "unknown key '" + std::string(key) + "'");
    }
    return cfg;
}

SyntheticConfig parse_synthetic_config(const std::string& path, SyntheticConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return parse_synthetic_config(in, base);
}

}  // namespace tmpred
