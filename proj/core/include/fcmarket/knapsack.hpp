#pragma once

#include <cstdint>
#include <vector>

namespace fcmarket {

struct KnapsackInstance {
  std::vector<std::int64_t> weights;
  std::vector<double> values;
  std::int64_t capacity = 0;
};

// 0-1 knapsack by dynamic programming over integer capacities, with
// last-to-first backtracking. Zero-weight items with positive value are
// always taken.
std::vector<bool> knapsack(const KnapsackInstance& instance);

double allocation_value(const KnapsackInstance& instance, const std::vector<bool>& allocation);
std::int64_t allocation_weight(const KnapsackInstance& instance, const std::vector<bool>& allocation);

}  // namespace fcmarket
