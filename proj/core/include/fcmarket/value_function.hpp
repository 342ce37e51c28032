#pragma once

#include <string>
#include <utility>
#include <vector>

namespace fcmarket {

// Maximum bid a buyer accepts for a forecast with gain g (percent).
class ValueFunction {
 public:
  enum class Kind { constant, linear, rational, tabulated };

  static ValueFunction constant(double value);
  static ValueFunction linear(double slope);
  // numerator / (pole - g) - offset for g < pole; +inf at or past the pole.
  static ValueFunction rational(double numerator, double pole, double offset);
  // Linear interpolation between (gain, bid) points, flat outside.
  static ValueFunction tabulated(std::vector<std::pair<double, double>> points);

  // VF1 = 100, VF2 = 10, VF3(g) = g, VF4(g) = 40/(30 - g) - 1.1.
  static ValueFunction preset(const std::string& name);

  double operator()(double gain) const;

  Kind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<std::pair<double, double>>& points() const { return points_; }
  std::string describe() const;

 private:
  Kind kind_ = Kind::constant;
  std::vector<double> params_;
  std::vector<std::pair<double, double>> points_;
};

}  // namespace fcmarket
