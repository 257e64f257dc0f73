#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace swmlda {

enum class SplitRole { train, test };

/// A multi-label dataset in column-major instance layout: X holds one
/// instance per column (D features), Y holds the binary label indicator
/// matrix with one row per class.  An instance may carry any number of
/// labels, including none.
struct MultiLabelDataset {
  Eigen::MatrixXd X;  // D x N feature matrix
  Eigen::MatrixXd Y;  // C x N label indicators, entries in {0, 1}
  std::vector<std::string> feature_names;  // length D
  std::vector<std::string> class_names;    // length C
  SplitRole role = SplitRole::train;

  Eigen::Index n_features() const { return X.rows(); }
  Eigen::Index n_instances() const { return X.cols(); }
  Eigen::Index n_classes() const { return Y.rows(); }

  /// Column indices of the instances labelled with class c.
  std::vector<Eigen::Index> class_members(Eigen::Index c) const;
};

/// Per-feature standardization statistics fitted on a training split.
struct StandardizationStats {
  Eigen::VectorXd mean;   // length D
  Eigen::VectorXd scale;  // length D, strictly positive
};

/// Reads the library's CSV layout: a header row naming every column with an
/// "f:" (feature) or "l:" (label) prefix, then one instance per row.  Label
/// cells must be exactly 0 or 1; feature cells must be finite numbers.
MultiLabelDataset load_csv(const std::filesystem::path& path,
                           SplitRole role = SplitRole::train);

/// Writes a dataset back out in the same CSV layout with full-precision
/// feature values, so a load/save cycle reproduces the matrices exactly.
void save_csv(const MultiLabelDataset& ds, const std::filesystem::path& path);

/// Reads an ARFF file as used by the common multi-label benchmark archives:
/// dense or sparse data rows, numeric or {0,1} nominal attributes, and a
/// caller-supplied list of attribute names that form the label set.  Label
/// rows of Y follow the order of label_names; the remaining attributes keep
/// their header order as features.
MultiLabelDataset load_arff(const std::filesystem::path& path,
                            const std::vector<std::string>& label_names,
                            SplitRole role = SplitRole::train);

/// Extracts the label names from the XML companion file that the benchmark
/// archives ship next to each ARFF pair.
std::vector<std::string> read_label_xml(const std::filesystem::path& path);

/// Fits per-feature mean and standard deviation on a training split.
/// Features with zero variance get unit scale so they pass through centred.
StandardizationStats fit_standardizer(const MultiLabelDataset& train);

/// Applies previously fitted statistics: x -> (x - mean) / scale.
MultiLabelDataset apply_standardizer(const MultiLabelDataset& ds,
                                     const StandardizationStats& stats);

}  // namespace swmlda
