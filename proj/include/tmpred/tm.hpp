#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tmpred/errors.hpp"

namespace tmpred {

// One traffic-matrix snapshot: N x N nonnegative volumes at a time slot.
// Volumes are stored row-major; entry (i, j) is the volume from node i to
// node j. The unit (bytes per interval) is carried as metadata only.
struct TrafficMatrix {
    int n_nodes = 0;
    std::vector<double> volumes;  // row-major n_nodes * n_nodes
    std::int64_t timestamp = 0;

    // Validates shape, finiteness and nonnegativity.
    static TrafficMatrix create(int n_nodes, std::vector<double> volumes, std::int64_t timestamp);

    double at(int i, int j) const { return volumes[static_cast<std::size_t>(i) * n_nodes + j]; }
};

// Row-concatenated form of a snapshot: values[i*N + j] == volumes(i, j).
struct TrafficVector {
    std::vector<double> values;
    std::int64_t timestamp = 0;
};

TrafficVector vectorize(const TrafficMatrix& m);
TrafficMatrix devectorize(const TrafficVector& v, int n_nodes);

// Time-ordered snapshots in vector form with consecutive timestamps.
class TrafficSeries {
public:
    TrafficSeries(int n_nodes, int interval_minutes, std::vector<TrafficVector> vectors);

    int n_nodes() const { return n_nodes_; }
    int interval_minutes() const { return interval_minutes_; }
    std::size_t n_flows() const { return static_cast<std::size_t>(n_nodes_) * n_nodes_; }
    std::size_t size() const { return vectors_.size(); }
    const TrafficVector& operator[](std::size_t i) const { return vectors_[i]; }
    const std::vector<TrafficVector>& vectors() const { return vectors_; }

    // Sub-series [begin, end), timestamps preserved.
    TrafficSeries subseries(std::size_t begin, std::size_t end) const;

private:
    int n_nodes_;
    int interval_minutes_;
    std::vector<TrafficVector> vectors_;
};

// Max-scaling normalizer. The scale is the maximum entry observed over the
// fitting range; normalize(x) = x / scale.
class Normalizer {
public:
    explicit Normalizer(double scale);

    double scale() const { return scale_; }
    double normalize(double x) const { return x / scale_; }
    double denormalize(double x) const { return x * scale_; }
    TrafficSeries normalize(const TrafficSeries& s) const;
    std::vector<double> denormalize(std::span<const double> values) const;

private:
    double scale_;
};

// Fits the scale on vectors [begin, end) only.
Normalizer fit_normalizer(const TrafficSeries& series, std::size_t begin, std::size_t end);

// Sliding-window supervised samples: every valid alignment (stride 1).
// Sample k: input = vectors[k .. k+W-1], target = vectors[k+W].
class WindowedDataset {
public:
    WindowedDataset(const TrafficSeries& series, int window);

    int window() const { return window_; }
    std::size_t n_flows() const { return n_flows_; }
    std::size_t sample_count() const { return vectors_.size() - window_; }
    std::span<const TrafficVector> input(std::size_t k) const {
        return {vectors_.data() + k, static_cast<std::size_t>(window_)};
    }
    const TrafficVector& target(std::size_t k) const { return vectors_[k + window_]; }

private:
    std::vector<TrafficVector> vectors_;
    std::size_t n_flows_;
    int window_;
};

WindowedDataset build_windows(const TrafficSeries& series, int window);

// Chronological split: first part holds vectors [0, train_len), second part
// [train_len, T). No shuffling; timestamps are preserved.
std::pair<TrafficSeries, TrafficSeries> split_chronological(const TrafficSeries& series,
                                                            std::size_t train_len);

}  // namespace tmpred
