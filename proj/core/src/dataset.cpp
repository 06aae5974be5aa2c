#include "causal/dataset.hpp"

#include <set>
#include <stdexcept>

namespace causal {

Dataset::Dataset(std::vector<std::string> names, Eigen::MatrixXd values,
                 std::vector<std::optional<InterventionTag>> tags)
    : names_(std::move(names)), values_(std::move(values)), tags_(std::move(tags)) {
    if (values_.rows() < 1) throw std::invalid_argument("dataset needs at least one sample");
    if (static_cast<int>(names_.size()) != values_.cols()) {
        throw std::invalid_argument("column name count does not match value columns");
    }
    std::set<std::string> uniq(names_.begin(), names_.end());
    if (uniq.size() != names_.size()) throw std::invalid_argument("duplicate column names");
    if (!values_.allFinite()) throw std::invalid_argument("dataset contains non-finite values");
    if (!tags_.empty() && static_cast<long>(tags_.size()) != values_.rows()) {
        throw std::invalid_argument("intervention tag count does not match sample count");
    }
}

int Dataset::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return static_cast<int>(i);
    }
    throw std::invalid_argument("unknown column '" + name + "'");
}

}  // namespace causal
