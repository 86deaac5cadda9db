#include "tmpred/tm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tmpred {

TrafficMatrix TrafficMatrix::create(int n_nodes, std::vector<double> volumes,
                                    std::int64_t timestamp) {
    if (n_nodes <= 0) throw DimensionError("node count must be positive");
    const auto want = static_cast<std::size_t>(n_nodes) * n_nodes;
    if (volumes.size() != want) {
        throw DimensionError("matrix has " + std::to_string(volumes.size()) +
                             " entries, expected " + std::to_string(want));
    }
    for (double v : volumes) {
        if (!std::isfinite(v)) throw DataError("non-finite traffic volume");
        if (v < 0.0) throw DataError("negative traffic volume");
    }
    TrafficMatrix m;
    m.n_nodes = n_nodes;
    m.volumes = std::move(volumes);
    m.timestamp = timestamp;
    return m;
}

TrafficVector vectorize(const TrafficMatrix& m) {
    return TrafficVector{m.volumes, m.timestamp};
}

TrafficMatrix devectorize(const TrafficVector& v, int n_nodes) {
    return TrafficMatrix::create(n_nodes, v.values, v.timestamp);
}

TrafficSeries::TrafficSeries(int n_nodes, int interval_minutes, std::vector<TrafficVector> vectors)
    : n_nodes_(n_nodes), interval_minutes_(interval_minutes), vectors_(std::move(vectors)) {
    if (n_nodes_ <= 0) throw DimensionError("node count must be positive");
    if (interval_minutes_ <= 0) throw ConfigError("interval must be positive");
    const std::size_t flows = n_flows();
    for (std::size_t t = 0; t < vectors_.size(); ++t) {
        if (vectors_[t].values.size() != flows) {
            throw DimensionError("vector at position " + std::to_string(t) + " has " +
                                 std::to_string(vectors_[t].values.size()) +
                                 " entries, expected " + std::to_string(flows));
        }
        if (t > 0 && vectors_[t].timestamp != vectors_[t - 1].timestamp + 1) {
            throw DataError("timestamps not consecutive at position " + std::to_string(t));
        }
    }
}

TrafficSeries TrafficSeries::subseries(std::size_t begin, std::size_t end) const {
    if (begin > end || end > vectors_.size()) throw DimensionError("subseries range out of bounds");
    std::vector<TrafficVector> part(vectors_.begin() + begin, vectors_.begin() + end);
    return TrafficSeries(n_nodes_, interval_minutes_, std::move(part));
}

Normalizer::Normalizer(double scale) : scale_(scale) {
    if (!std::isfinite(scale) || scale <= 0.0) {
        throw DegenerateError("normalizer scale must be positive and finite");
    }
}

TrafficSeries Normalizer::normalize(const TrafficSeries& s) const {
    std::vector<TrafficVector> out;
    out.reserve(s.size());
    for (std::size_t t = 0; t < s.size(); ++t) {
        TrafficVector v = s[t];
        for (double& x : v.values) x /= scale_;
        out.push_back(std::move(v));
    }
    return TrafficSeries(s.n_nodes(), s.interval_minutes(), std::move(out));
}

std::vector<double> Normalizer::denormalize(std::span<const double> values) const {
    std::vector<double> out(values.begin(), values.end());
    for (double& x : out) x *= scale_;
    return out;
}

Normalizer fit_normalizer(const TrafficSeries& series, std::size_t begin, std::size_t end) {
    if (begin >= end || end > series.size()) {
        throw DimensionError("normalizer fit range out of bounds");
    }
    double mx = 0.0;
    for (std::size_t t = begin; t < end; ++t) {
        for (double v : series[t].values) mx = std::max(mx, v);
    }
    if (mx <= 0.0) throw DegenerateError("all traffic volumes are zero over the fit range");
    return Normalizer(mx);
}

WindowedDataset::WindowedDataset(const TrafficSeries& series, int window)
    : vectors_(series.vectors()), n_flows_(series.n_flows()), window_(window) {
    if (window <= 0) throw ConfigError("window must be positive");
    if (series.size() <= static_cast<std::size_t>(window)) {
        throw InsufficientDataError("series of length " + std::to_string(series.size()) +
                                    " yields no samples for window " + std::to_string(window));
    }
}

WindowedDataset build_windows(const TrafficSeries& series, int window) {
    return WindowedDataset(series, window);
}

std::pair<TrafficSeries, TrafficSeries> split_chronological(const TrafficSeries& series,
                                                            std::size_t train_len) {
    if (train_len == 0 || train_len >= series.size()) {
        throw ConfigError("train length must split the series into two nonempty parts");
    }
    return {series.subseries(0, train_len), series.subseries(train_len, series.size())};
}

}  // namespace tmpred
