#include "fcmarket/knapsack.hpp"

#include <cstddef>

#include "fcmarket/errors.hpp"

namespace fcmarket {

std::vector<bool> knapsack(const KnapsackInstance& instance) {
  const auto& s = instance.weights;
  const auto& mu = instance.values;
  require(s.size() == mu.size(), ErrorCode::shape, "knapsack weights and values differ in length");
  require(instance.capacity >= 0, ErrorCode::range, "knapsack capacity must be non-negative");
  const std::size_t n = s.size();
  std::vector<bool> take(n, false);

  // zero-weight items never compete for capacity
  std::vector<std::size_t> items;
  for (std::size_t j = 0; j < n; ++j) {
    require(s[j] >= 0, ErrorCode::range, "knapsack weights must be non-negative");
    if (s[j] == 0)
      take[j] = mu[j] > 0.0;
    else if (s[j] <= instance.capacity && mu[j] > 0.0)
      items.push_back(j);
  }
  if (items.empty()) return take;

  const auto W = static_cast<std::size_t>(instance.capacity);
  const std::size_t width = W + 1;
  // D[j][w] for the first j candidate items; row 0 is all zeros
  std::vector<double> D((items.size() + 1) * width, 0.0);
  for (std::size_t j = 1; j <= items.size(); ++j) {
    const auto wj = static_cast<std::size_t>(s[items[j - 1]]);
    const double vj = mu[items[j - 1]];
    const double* prev = &D[(j - 1) * width];
    double* cur = &D[j * width];
    for (std::size_t w = 0; w < width; ++w) {
      if (wj > w) {
        cur[w] = prev[w];
      } else {
        const double with = prev[w - wj] + vj;
        cur[w] = with > prev[w] ? with : prev[w];
      }
    }
  }

  std::size_t w = W;
  for (std::size_t j = items.size(); j >= 1; --j) {
    if (D[j * width + w] <= 0.0) break;
    if (D[j * width + w] != D[(j - 1) * width + w]) {
      take[items[j - 1]] = true;
      w -= static_cast<std::size_t>(s[items[j - 1]]);
    }
  }
  return take;
}

double allocation_value(const KnapsackInstance& instance, const std::vector<bool>& allocation) {
  double v = 0.0;
  for (std::size_t j = 0; j < allocation.size(); ++j)
    if (allocation[j]) v += instance.values[j];
  return v;
}

std::int64_t allocation_weight(const KnapsackInstance& instance, const std::vector<bool>& allocation) {
  std::int64_t w = 0;
  for (std::size_t j = 0; j < allocation.size(); ++j)
    if (allocation[j]) w += instance.weights[j];
  return w;
}

}  // namespace fcmarket
