#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>

#include "tmpred/tm.hpp"

namespace tmpred {

// Traffic-matrix CSV: header `t,f0,f1,...,f{N*N-1}`, then one row per time
// slot holding the integer slot index and N*N nonnegative flow volumes.
// LF line endings, '.' decimal separator. The file carries no interval
// metadata, so the loader stamps the series with the interval given here.
struct TmCsvFormat {
    int interval_minutes = 15;
};

TrafficSeries load_csv(std::istream& in, const TmCsvFormat& fmt = {});
TrafficSeries load_csv(const std::string& path, const TmCsvFormat& fmt = {});

void save_csv(const TrafficSeries& series, std::ostream& out);
void save_csv(const TrafficSeries& series, const std::string& path);

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);

// Knobs for the synthetic generator. Amplitudes and noise level are
// fractions of each OD pair's base volume, so the shape is scale-free.
struct SyntheticConfig {
    int n_nodes = 23;
    int n_slots = 309;
    int interval_minutes = 15;
    std::uint64_t seed = 1;
    double diurnal_amplitude = 0.35;
    double weekly_amplitude = 0.10;
    double noise_phi = 0.30;    // AR(1) coefficient of the noise term
    double noise_sigma = 0.05;  // innovation stddev, relative to base
    double spike_rate = 0.002;  // per slot per OD
    std::pair<double, double> base_volume_range = {50.0, 5000.0};

    void validate() const;  // throws ConfigError
};

// Seeded synthetic traffic: per OD pair a base volume plus diurnal and
// weekly sinusoids (random phase and relative amplitude), AR(1) noise and
// occasional multiplicative spikes, clamped at zero. Deterministic in seed.
TrafficSeries generate_synthetic(const SyntheticConfig& cfg);

// Generator settings as a flat key=value file: one `key = value` pair per
// line, `#` starts a comment, blank lines are skipped. Keys are the
// SyntheticConfig field names (base_volume_range splits into base_volume_min
// and base_volume_max). Unknown keys or unreadable values raise ParseError
// with the line number. Fields absent from the file keep the values in
// `base`. The result is not validated here; call validate() before use.
SyntheticConfig parse_synthetic_config(std::istream& in, SyntheticConfig base = {});
SyntheticConfig parse_synthetic_config(const std::string& path, SyntheticConfig base = {});

}  // namespace tmpred
