#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ehsched/error.hpp"
#include "ehsched/rate.hpp"
#include "oracles.hpp"

using namespace ehsched;
namespace fz = oracle::frozen;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return g;
}

// A rate function that breaks the axioms: linear, so g/p never vanishes.
class Linear final : public RateFunction {
 public:
  double operator()(double p) const override { return 2.0 * p; }
  double slope_at_zero() const override { return 2.0; }
};

// Convex piece: violates concavity.
class Convex final : public RateFunction {
 public:
  double operator()(double p) const override { return p * p; }
  double slope_at_zero() const override { return 0.0; }
};

}  // namespace

TEST_CASE("built-in rates") {
  const LogRate g2;
  const LogRate ge({LogBase::Natural, 2.0});
  CHECK(g2(0.0) == 0.0);
  CHECK(g2(1.0) == doctest::Approx(1.0));
  CHECK(g2(3.0) == doctest::Approx(2.0));
  CHECK(ge(std::exp(1.0) - 1.0) == doctest::Approx(2.0));
  CHECK(g2.slope_at_zero() == doctest::Approx(1.0 / std::log(2.0)));
  CHECK(ge.slope_at_zero() == doctest::Approx(2.0));
  CHECK(rate({}, 7.0) == doctest::Approx(3.0));
  CHECK(g2(1e-300) > 0.0);
  CHECK_THROWS_AS(g2(-1.0), Error);
  CHECK_THROWS_AS(g2(std::nan("")), Error);
}

TEST_CASE("solve_power_for_ratio matches high-precision values") {
  const LogRate g;
  CHECK(solve_power_for_ratio(g, 0.5) == doctest::Approx(fz::kPowerForHalfLog2).epsilon(1e-12));
  CHECK(solve_power_for_ratio(g, 1.0 / 3.0) == doctest::Approx(fz::kPowerForThirdLog2).epsilon(1e-12));
  // log2(1+p)/p = 1 at p = 1.
  CHECK(solve_power_for_ratio(g, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("solve_duration_for_bits matches high-precision values") {
  const LogRate g;
  CHECK(solve_duration_for_bits(g, 4.0, 2.0) == doctest::Approx(fz::kDurationE4B2).epsilon(1e-12));
  // T log2(1 + 3/T) = 2 at T = 1.
  CHECK(solve_duration_for_bits(g, 3.0, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("solvers reject out-of-range targets") {
  const LogRate g;
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InternalInvariant;
  };
  CHECK(code([&] { solve_power_for_ratio(g, 0.0); }) == ErrorCode::Unsolvable);
  CHECK(code([&] { solve_power_for_ratio(g, -1.0); }) == ErrorCode::Unsolvable);
  CHECK(code([&] { solve_power_for_ratio(g, 1.0 / std::log(2.0)); }) == ErrorCode::Unsolvable);
  CHECK(code([&] { solve_duration_for_bits(g, 1.0, 1.0 / std::log(2.0)); }) == ErrorCode::Unsolvable);
  CHECK(code([&] { solve_duration_for_bits(g, 0.0, 1.0); }) == ErrorCode::Unsolvable);
}

TEST_CASE("solvers at the extremes of their range") {
  const LogRate g;
  const double p_small = solve_power_for_ratio(g, g.slope_at_zero() * (1.0 - 1e-9));
  CHECK(p_small > 0.0);
  CHECK(p_small < 1e-6);
  const double p_big = solve_power_for_ratio(g, 1e-6);
  CHECK(g(p_big) / p_big == doctest::Approx(1e-6).epsilon(1e-9));
  const double t_long = solve_duration_for_bits(g, 1.0, g.slope_at_zero() * (1.0 - 1e-6));
  CHECK(t_long > 1e3);
}

TEST_CASE("solver round trips on random inputs") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const LogRate g : {LogRate(), LogRate({LogBase::Natural, 3.0})}) {
    for (int i = 0; i < 500; ++i) {
      const double rho = g.slope_at_zero() * std::pow(10.0, -6.0 * u(rng)) * 0.999;
      const double p = solve_power_for_ratio(g, rho);
      CHECK(std::fabs(g(p) / p - rho) <= 1e-9 * rho);
      const double e = std::pow(10.0, 4.0 * u(rng) - 2.0);
      const double b = e * g.slope_at_zero() * (0.001 + 0.99 * u(rng));
      const double t = solve_duration_for_bits(g, e, b);
      CHECK(std::fabs(t * g(e / t) - b) <= 1e-9 * b);
    }
  }
}

TEST_CASE("axiom validation") {
  const auto grid = log_grid(1e-6, 1e6, 60);
  CHECK(validate_rate_function(LogRate(), grid).ok);
  CHECK(validate_rate_function(LogRate({LogBase::Natural, 0.5}), grid).ok);

  const auto lin = validate_rate_function(Linear(), grid);
  CHECK_FALSE(lin.ok);
  CHECK_FALSE(lin.failed_check.empty());

  const auto cvx = validate_rate_function(Convex(), grid);
  CHECK_FALSE(cvx.ok);
  CHECK(cvx.at_power.has_value());

  const std::vector<double> unsorted{1.0, 0.5, 2.0};
  CHECK_FALSE(validate_rate_function(LogRate(), unsorted).ok);
}
