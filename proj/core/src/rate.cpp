#include "ehsched/rate.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ehsched/error.hpp"
#include "roots.hpp"

namespace ehsched {

namespace {

constexpr double kTinyPower = 1e-12;
constexpr double kHugePower = 1e300;

double ratio_at(const RateFunction& g, double p) { return g(p) / p; }

}  // namespace

LogRate::LogRate(RateFunctionSpec spec) : spec_(spec) {
  if (!(spec.scale > 0.0) || !std::isfinite(spec.scale)) {
    throw Error(ErrorCode::InvalidArgument, "rate scale must be positive and finite");
  }
  factor_ = spec.kind == LogBase::Two ? spec.scale / std::numbers::ln2 : spec.scale;
}

double LogRate::operator()(double power) const {
  if (power < 0.0 || std::isnan(power)) {
    throw Error(ErrorCode::Domain, "rate evaluated at negative power");
  }
  return factor_ * std::log1p(power);
}

double LogRate::slope_at_zero() const { return factor_; }

double rate(const RateFunctionSpec& spec, double power) { return LogRate(spec)(power); }

double solve_power_for_ratio(const RateFunction& g, double rho) {
  const double sup = g.slope_at_zero();
  if (!(rho > 0.0) || !(rho < sup) || !std::isfinite(rho)) {
    throw Error(ErrorCode::Unsolvable, "bits-per-joule ratio outside (0, g'(0))");
  }
  // g(p)/p is strictly decreasing, so rho - g(p)/p changes sign exactly once.
  auto h = [&](double p) { return rho - ratio_at(g, p); };

  double lo = kTinyPower;
  while (h(lo) >= 0.0) {
    lo *= 0.5;
    if (lo < std::numeric_limits<double>::min()) {
      throw Error(ErrorCode::Unsolvable, "ratio too close to g'(0) to bracket");
    }
  }
  double hi = 1.0;
  while (h(hi) < 0.0) {
    hi *= 2.0;
    if (hi > kHugePower) throw Error(ErrorCode::Unsolvable, "ratio too small to bracket");
  }
  if (lo > hi) lo = hi * 0.5;
  return detail::bisect_increasing(h, lo, hi);
}

double solve_duration_for_bits(const RateFunction& g, double energy, double bits) {
  if (!(energy > 0.0) || !(bits > 0.0)) {
    throw Error(ErrorCode::Unsolvable, "energy and bits must be positive");
  }
  if (!(bits < energy * g.slope_at_zero())) {
    throw Error(ErrorCode::Unsolvable, "bits at or above the supremum energy * g'(0)");
  }
  // T * g(E/T) is strictly increasing in T.
  auto h = [&](double t) { return t * g(energy / t) - bits; };

  double lo = 1.0;
  while (h(lo) >= 0.0) {
    lo *= 0.5;
    if (lo < std::numeric_limits<double>::min()) {
      throw Error(ErrorCode::Unsolvable, "duration underflow");
    }
  }
  double hi = 1.0;
  while (h(hi) < 0.0) {
    hi *= 2.0;
    if (hi > kHugePower) throw Error(ErrorCode::Unsolvable, "bits too close to supremum");
  }
  return detail::bisect_increasing(h, lo, hi);
}

RateValidationReport validate_rate_function(const RateFunction& g, std::span<const double> grid) {
  RateValidationReport report;
  auto fail = [&](const char* what, std::optional<double> at) {
    report.ok = false;
    report.failed_check = what;
    report.at_power = at;
    return report;
  };

  if (std::abs(g(0.0)) > 1e-12) return fail("g(0) == 0", 0.0);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) return fail("grid positive", grid[i]);
    if (i > 0 && !(grid[i] > grid[i - 1])) return fail("grid sorted", grid[i]);
  }

  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = grid[i];
    const double b = grid[i + 1];
    const double ga = g(a);
    const double gb = g(b);
    const double gm = g(0.5 * (a + b));
    const double slack = 1e-12 * std::fmax(1.0, std::fmax(std::abs(ga), std::abs(gb)));
    if (!(gb > ga)) return fail("g increasing", b);
    if (gm < 0.5 * (ga + gb) - slack) return fail("g midpoint concave", 0.5 * (a + b));
    if (gb / b > ga / a + 1e-12 * (ga / a)) return fail("g(p)/p decreasing", b);
  }

  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = grid[i];
    const double b = grid[i + 1];
    const double m = 0.5 * (a + b);
    const double ra = g(a) / a;
    const double rb = g(b) / b;
    const double rm = g(m) / m;
    if (rm > 0.5 * (ra + rb) + 1e-12 * std::fmax(1.0, ra)) return fail("g(p)/p midpoint convex", m);
  }

  if (grid.size() >= 2) {
    const double first = g(grid.front()) / grid.front();
    const double last = g(grid.back()) / grid.back();
    if (!(last < 0.1 * first)) return fail("g(p)/p vanishing", grid.back());
  }
  return report;
}

}  // namespace ehsched
