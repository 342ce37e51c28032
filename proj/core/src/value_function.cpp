#include "fcmarket/value_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fcmarket/csv.hpp"
#include "fcmarket/errors.hpp"

namespace fcmarket {

ValueFunction ValueFunction::constant(double value) {
  require(std::isfinite(value), ErrorCode::config, "constant value function must be finite");
  ValueFunction v;
  v.kind_ = Kind::constant;
  v.params_ = {value};
  return v;
}

ValueFunction ValueFunction::linear(double slope) {
  require(std::isfinite(slope), ErrorCode::config, "linear value function slope must be finite");
  ValueFunction v;
  v.kind_ = Kind::linear;
  v.params_ = {slope};
  return v;
}

ValueFunction ValueFunction::rational(double numerator, double pole, double offset) {
  require(std::isfinite(numerator) && std::isfinite(pole) && std::isfinite(offset), ErrorCode::config,
          "rational value function parameters must be finite");
  ValueFunction v;
  v.kind_ = Kind::rational;
  v.params_ = {numerator, pole, offset};
  return v;
}

ValueFunction ValueFunction::tabulated(std::vector<std::pair<double, double>> points) {
  require(!points.empty(), ErrorCode::config, "tabulated value function needs points");
  std::sort(points.begin(), points.end());
  for (std::size_t i = 1; i < points.size(); ++i)
    require(points[i].first > points[i - 1].first, ErrorCode::config, "tabulated gains must be distinct");
  for (const auto& [g, b] : points)
    require(std::isfinite(g) && std::isfinite(b), ErrorCode::config, "tabulated points must be finite");
  ValueFunction v;
  v.kind_ = Kind::tabulated;
  v.points_ = std::move(points);
  return v;
}

ValueFunction ValueFunction::preset(const std::string& name) {
  if (name == "VF1" || name == "vf1") return constant(100.0);
  if (name == "VF2" || name == "vf2") return constant(10.0);
  if (name == "VF3" || name == "vf3") return linear(1.0);
  if (name == "VF4" || name == "vf4") return rational(40.0, 30.0, 1.1);
  fail(ErrorCode::config, "unknown value function preset '" + name + "'");
}

double ValueFunction::operator()(double g) const {
  switch (kind_) {
    case Kind::constant:
      return params_[0];
    case Kind::linear:
      return params_[0] * g;
    case Kind::rational:
      if (g >= params_[1]) return std::numeric_limits<double>::infinity();
      return params_[0] / (params_[1] - g) - params_[2];
    case Kind::tabulated: {
      if (g <= points_.front().first) return points_.front().second;
      if (g >= points_.back().first) return points_.back().second;
      auto hi = std::upper_bound(points_.begin(), points_.end(), g,
                                 [](double x, const auto& p) { return x < p.first; });
      auto lo = hi - 1;
      const double w = (g - lo->first) / (hi->first - lo->first);
      return lo->second + w * (hi->second - lo->second);
    }
  }
  return 0.0;
}

std::string ValueFunction::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::constant:
      out << "constant(" << format_double(params_[0]) << ")";
      break;
    case Kind::linear:
      out << "linear(" << format_double(params_[0]) << ")";
      break;
    case Kind::rational:
      out << "rational(" << format_double(params_[0]) << "," << format_double(params_[1]) << ","
          << format_double(params_[2]) << ")";
      break;
    case Kind::tabulated:
      out << "tabulated(" << points_.size() << ")";
      break;
  }
  return out.str();
}

}  // namespace fcmarket
