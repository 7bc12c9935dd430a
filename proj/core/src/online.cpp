#include "ehsched/online.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ehsched/error.hpp"
#include "ehsched/offline.hpp"

namespace ehsched::online {

namespace {

std::vector<double> event_times(const ProblemInstance& instance) {
  std::vector<double> t;
  for (const auto& a : instance.tx().arrivals()) t.push_back(a.time);
  for (const auto& a : instance.rx().arrivals()) t.push_back(a.time);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

double capacity_at(const ProblemInstance& instance, const RateFunction& g, double t) {
  const double e = instance.tx().cumulative_right(t);
  const double gamma = instance.rx_on_time().cumulative_right(t);
  if (!(e > 0.0) || !(gamma > 0.0)) return 0.0;
  return gamma * g(e / gamma);
}

}  // namespace

double online_start_time(const ProblemInstance& instance, const RateFunction& g) {
  for (double t : event_times(instance)) {
    if (capacity_at(instance, g, t) >= instance.bits() * (1.0 - 1e-14)) return t;
  }
  throw Error(ErrorCode::InsufficientHarvest, "harvests never suffice to start transmission");
}

double online_start_time(const ProblemInstance& instance) {
  return online_start_time(instance, LogRate(instance.rate()));
}

OnlineResult run_online(const ProblemInstance& instance, const RateFunction& g) {
  const auto& tx = instance.tx();
  OnlineResult out;
  out.t_start = online_start_time(instance, g);

  double now = out.t_start;
  double energy = tx.cumulative_right(now);
  double bits = instance.bits();
  // At the start E g(l)/l = B_0 may sit a hair above g'(0) * E; clamp the ratio.
  double power = solve_power_for_ratio(g, std::fmin(bits / energy, g.slope_at_zero() * (1.0 - 1e-15)));
  out.power_history.push_back({now, power});

  std::vector<PowerSegment> segs;
  std::size_t k = tx.count_before(now);
  while (k < tx.size() && tx[k].time <= now) ++k;

  while (true) {
    const double finish = now + bits / g(power);
    if (k >= tx.size() || tx[k].time >= finish) {
      segs.push_back({now, finish, power});
      out.t_finish = finish;
      break;
    }
    const double next = tx[k].time;
    segs.push_back({now, next, power});
    energy -= power * (next - now);
    bits -= g(power) * (next - now);
    energy += tx[k].amount;
    now = next;
    ++k;
    power = solve_power_for_ratio(g, bits / energy);
    out.power_history.push_back({now, power});
  }
  out.policy = TransmissionPolicy(std::move(segs));
  return out;
}

OnlineResult run_online(const ProblemInstance& instance) {
  return run_online(instance, LogRate(instance.rate()));
}

LowerBound offline_lower_bound(const ProblemInstance& instance, const RateFunction& g) {
  try {
    return {online_start_time(instance, g), true};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientHarvest) throw;
    return {std::numeric_limits<double>::infinity(), false};
  }
}

LowerBound offline_lower_bound(const ProblemInstance& instance) {
  return offline_lower_bound(instance, LogRate(instance.rate()));
}

std::string_view to_string(RatioBasis basis) noexcept {
  return basis == RatioBasis::ExactOffline ? "exact-offline" : "lower-bound";
}

Ratio competitive_ratio(const ProblemInstance& instance, const RateFunction& g) {
  Ratio r;
  r.t_online = run_online(instance, g).t_finish;
  if (instance.single_rx_at_zero()) {
    r.basis = RatioBasis::ExactOffline;
    r.t_reference = offline::off_solve(instance, g).finish();
  } else {
    r.basis = RatioBasis::LowerBound;
    r.t_reference = offline_lower_bound(instance, g).value;
  }
  r.value = r.t_online / r.t_reference;
  return r;
}

Ratio competitive_ratio(const ProblemInstance& instance) {
  return competitive_ratio(instance, LogRate(instance.rate()));
}

}  // namespace ehsched::online
