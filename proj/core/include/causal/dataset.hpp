#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "causal/graph.hpp"

namespace causal {

/// Marks a sample as drawn under a clamp intervention on one node.
struct InterventionTag {
    NodeId node;
    double value;
    bool operator==(const InterventionTag&) const = default;
};

/// Column-named numeric sample matrix, optionally with per-sample
/// intervention tags (empty vector = fully observational).
class Dataset {
public:
    Dataset(std::vector<std::string> names, Eigen::MatrixXd values,
            std::vector<std::optional<InterventionTag>> tags = {});

    int num_samples() const { return static_cast<int>(values_.rows()); }
    int num_vars() const { return static_cast<int>(values_.cols()); }

    const std::vector<std::string>& names() const { return names_; }
    const Eigen::MatrixXd& values() const { return values_; }
    const std::vector<std::optional<InterventionTag>>& tags() const { return tags_; }

    double value(int row, int col) const { return values_(row, col); }
    Eigen::VectorXd column(int col) const { return values_.col(col); }
    double column_mean(int col) const { return values_.col(col).mean(); }

    /// Index of a named column; throws std::invalid_argument if absent.
    int column_index(const std::string& name) const;

private:
    std::vector<std::string> names_;
    Eigen::MatrixXd values_;
    std::vector<std::optional<InterventionTag>> tags_;
};

}  // namespace causal
