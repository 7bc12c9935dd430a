#pragma once

#include <optional>
#include <span>
#include <string>

namespace ehsched {

enum class LogBase { Two, Natural };

// Built-in rate g(p) = scale * log_base(1 + p).
struct RateFunctionSpec {
  LogBase kind = LogBase::Two;
  double scale = 1.0;

  friend bool operator==(const RateFunctionSpec&, const RateFunctionSpec&) = default;
};

/// Concave rate map g(p) in bits per second at transmit power p.
///
/// Implementations must satisfy g(0) = 0, g increasing and concave, and
/// g(p)/p convex, decreasing and vanishing as p grows. The solvers below
/// only rely on g(p)/p being strictly decreasing.
class RateFunction {
 public:
  virtual ~RateFunction() = default;

  virtual double operator()(double power) const = 0;

  /// lim_{p -> 0} g(p)/p; +inf when unbounded. Caps the bits obtainable
  /// per joule, so a finite energy budget can only deliver finitely many bits.
  virtual double slope_at_zero() const = 0;
};

class LogRate final : public RateFunction {
 public:
  explicit LogRate(RateFunctionSpec spec = {});

  double operator()(double power) const override;
  double slope_at_zero() const override;
  const RateFunctionSpec& spec() const noexcept { return spec_; }

 private:
  RateFunctionSpec spec_;
  double factor_;  // scale / ln(base)
};

/// g(p) for a built-in rate; throws ErrorCode::Domain for p < 0.
double rate(const RateFunctionSpec& spec, double power);

/// Unique p with g(p)/p == rho. Throws ErrorCode::Unsolvable when rho is not
/// in (0, slope_at_zero).
double solve_power_for_ratio(const RateFunction& g, double rho);

/// Unique T with T * g(energy / T) == bits. Throws ErrorCode::Unsolvable when
/// bits is not below energy * slope_at_zero.
double solve_duration_for_bits(const RateFunction& g, double energy, double bits);

struct RateValidationReport {
  bool ok = true;
  std::string failed_check;  // empty when ok
  std::optional<double> at_power;
};

/// Numerical axiom check over a sorted, positive power grid. Reports the first
/// violation among: g(0) == 0, midpoint concavity, g(p)/p decreasing,
/// g(p)/p convex, and g(p)/p vanishing (last grid ratio below a tenth of the
/// first).
RateValidationReport validate_rate_function(const RateFunction& g, std::span<const double> grid);

}  // namespace ehsched
