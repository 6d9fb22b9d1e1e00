#include <gtest/gtest.h>

#include <cmath>

#include "isnet/quadrature.hpp"

namespace isnet {
namespace {

TEST(Quadrature, SmoothIntegrands) {
  EXPECT_NEAR(quadrature::integrate([](double x) { return std::sin(x); }, 0.0, M_PI).value, 2.0,
              1e-13);
  EXPECT_NEAR(quadrature::integrate([](double x) { return std::exp(-x); }, 0.0, 40.0).value,
              1.0 - std::exp(-40.0), 1e-13);
}

TEST(Quadrature, JumpAtBreakpoint) {
  auto step = [](double x) { return x < 0.3 ? 1.0 : 0.0; };
  EXPECT_NEAR(quadrature::integrate(step, 0.0, 1.0, {0.3}).value, 0.3, 1e-14);
}

TEST(Quadrature, IntegrableSingularity) {
  // integral of x^{-1/2} over [0, 1] is 2
  const auto r = quadrature::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {},
                                       {1e-9, 20000});
  EXPECT_NEAR(r.value, 2.0, 1e-8);
}

TEST(Quadrature, ReportsNonConvergence) {
  auto wild = [](double x) { return std::sin(1.0 / x) / x; };
  EXPECT_THROW(quadrature::integrate(wild, 1e-6, 1.0, {}, {1e-14, 50}), NumericalError);
}

TEST(Quadrature, EmptyInterval) {
  EXPECT_EQ(quadrature::integrate([](double) { return 1.0; }, 1.0, 1.0).value, 0.0);
}

}  // namespace
}  // namespace isnet
