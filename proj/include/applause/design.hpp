#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace applause {

// n examples by p features with 0/1 labels.
struct DesignMatrix {
  Eigen::MatrixXd rows;
  Eigen::VectorXd labels;
  std::vector<std::string> feature_names;

  Eigen::Index n() const { return rows.rows(); }
  Eigen::Index p() const { return rows.cols(); }

  // Throws kInvalidArgument unless n >= 2, both classes are present, shapes
  // agree and every value is finite.
  void validate() const;

  DesignMatrix select_columns(const std::vector<std::size_t>& columns) const;
  DesignMatrix select_rows(const std::vector<Eigen::Index>& indices) const;
};

}  // namespace applause
