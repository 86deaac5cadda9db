#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tmpred {

enum class ErrorKind {
    config,             // bad parameter / flag value
    parse,              // malformed input file
    dimension,          // shape mismatch between data structures
    insufficient_data,  // series too short for the requested operation
    degenerate,         // singular fit, zero-variance data, all-zero scale
    invalid_model,      // model parameters violate construction invariants
    data,               // non-finite or otherwise unusable values at runtime
    metric,             // metric preconditions violated
    training_diverged,  // loss became non-finite
    io,                 // filesystem failure
};

class TmError : public std::runtime_error {
public:
    TmError(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct ConfigError : TmError {
    explicit ConfigError(const std::string& m) : TmError(ErrorKind::config, m) {}
};

struct ParseError : TmError {
    ParseError(std::size_t line, const std::string& m)
        : TmError(ErrorKind::parse, "line " + std::to_string(line) + ": " + m), line(line) {}
    std::size_t line;
};

struct DimensionError : TmError {
    explicit DimensionError(const std::string& m) : TmError(ErrorKind::dimension, m) {}
};

struct InsufficientDataError : TmError {
    explicit InsufficientDataError(const std::string& m)
        : TmError(ErrorKind::insufficient_data, m) {}
};

struct DegenerateError : TmError {
    explicit DegenerateError(const std::string& m) : TmError(ErrorKind::degenerate, m) {}
};

struct InvalidModelError : TmError {
    explicit InvalidModelError(const std::string& m) : TmError(ErrorKind::invalid_model, m) {}
};

struct DataError : TmError {
    explicit DataError(const std::string& m) : TmError(ErrorKind::data, m) {}
};

struct MetricError : TmError {
    explicit MetricError(const std::string& m) : TmError(ErrorKind::metric, m) {}
};

struct TrainingDivergedError : TmError {
    TrainingDivergedError(int epoch, const std::string& m)
        : TmError(ErrorKind::training_diverged,
                  m + " (epoch " + std::to_string(epoch) + ")"),
          epoch(epoch) {}
    int epoch;
};

struct IoError : TmError {
    explicit IoError(const std::string& m) : TmError(ErrorKind::io, m) {}
};

}  // namespace tmpred
