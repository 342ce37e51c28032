#include <gtest/gtest.h>

#include <cmath>

#include "fcmarket/errors.hpp"
#include "fcmarket/value_function.hpp"

using namespace fcmarket;

TEST(ValueFunction, PresetsMatchDefinitions) {
  auto v1 = ValueFunction::preset("VF1"), v2 = ValueFunction::preset("VF2"), v3 = ValueFunction::preset("VF3"),
       v4 = ValueFunction::preset("VF4");
  for (double g : {0.0, 5.0, 12.5, 29.0}) {
    EXPECT_EQ(v1(g), 100.0);
    EXPECT_EQ(v2(g), 10.0);
    EXPECT_EQ(v3(g), g);
    EXPECT_DOUBLE_EQ(v4(g), 40.0 / (30.0 - g) - 1.1);
  }
}

TEST(ValueFunction, RationalIsUnboundedAtAndPastPole) {
  auto v4 = ValueFunction::preset("VF4");
  EXPECT_TRUE(std::isinf(v4(30.0)));
  EXPECT_TRUE(std::isinf(v4(55.0)));
}

TEST(ValueFunction, TabulatedInterpolatesAndClamps) {
  auto v = ValueFunction::tabulated({{10.0, 1.0}, {0.0, 0.0}, {20.0, 5.0}});
  EXPECT_DOUBLE_EQ(v(5.0), 0.5);
  EXPECT_DOUBLE_EQ(v(15.0), 3.0);
  EXPECT_DOUBLE_EQ(v(-3.0), 0.0);
  EXPECT_DOUBLE_EQ(v(80.0), 5.0);
}

TEST(ValueFunction, UnknownPresetThrows) { EXPECT_THROW(ValueFunction::preset("VF9"), Error); }

TEST(ValueFunction, DescribeNamesKind) {
  EXPECT_NE(ValueFunction::linear(2.0).describe().find("linear"), std::string::npos);
}
