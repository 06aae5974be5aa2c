#pragma once

#include <stdexcept>
#include <string>

namespace causal {

/// Numerical degeneracy: zero variance, singular matrix, rank-deficient design.
class DegeneracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An orientation rule would introduce a directed cycle or a new unshielded
/// collider into a partially directed graph.
class InconsistentPdagError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data (CSV, graph/model/manifest JSON).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid benchmark configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A per-algorithm wall-clock budget was exceeded.
class TimeoutError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace causal
