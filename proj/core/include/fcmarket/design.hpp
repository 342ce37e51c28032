#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fcmarket {

// One raw input column of a regression task.
struct FeatureInfo {
  int owner_agent = 0;
  std::string name;
  double price = 0.0;
  bool local = false;  // owned by the buyer of the task
};

struct GroupInfo {
  int group_id = 0;
  int owner_agent = 0;
  std::string source;
  double price = 0.0;
  Eigen::Index begin = 0;  // column range [begin, end)
  Eigen::Index end = 0;
  bool active = true;
  bool local = false;

  Eigen::Index size() const { return end - begin; }
};

// Expanded design with a stable column layout. Deactivating a column or
// group only flips masks; ranges never move.
struct GroupedDesign {
  Eigen::MatrixXd matrix;
  std::vector<GroupInfo> groups;
  std::vector<bool> column_active;

  Eigen::Index rows() const { return matrix.rows(); }
  Eigen::Index cols() const { return matrix.cols(); }

  // Throws shape error when ranges do not partition the columns.
  void validate() const;
  // Group index owning each column.
  std::vector<int> column_groups() const;
  // Marks groups inactive when all their columns are inactive, and clears
  // the column mask of inactive groups.
  void sync_masks();
};

// Plain design: one single-column group per feature.
GroupedDesign identity_design(const Eigen::MatrixXd& X, const std::vector<FeatureInfo>& features);

}  // namespace fcmarket
