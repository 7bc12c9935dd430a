#include "ehsched/offline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ehsched/baseline.hpp"
#include "ehsched/error.hpp"
#include "roots.hpp"

namespace ehsched::offline {

namespace {

constexpr double kTimeRel = 1e-12;    // termination and snapping slack
constexpr double kEpochAbs = 1e-9;    // boundary-to-epoch matching
constexpr double kBindingRel = 1e-10; // touch-point detection

double first_epoch(const ProblemInstance& instance) { return instance.tx()[0].time; }

double time_slack(double t) { return kTimeRel * std::fmax(1.0, std::abs(t)); }

std::size_t epoch_index(const HarvestTrace& tx, double t) {
  auto k = tx.find_epoch(t, kEpochAbs);
  if (!k) {
    throw Error(ErrorCode::InternalInvariant,
                "policy switch at t=" + std::to_string(t) + " is not a transmitter epoch");
  }
  return *k;
}

// Segments of `policy` clipped to [from, to].
void append_slice(std::vector<PowerSegment>& out, const TransmissionPolicy& policy, double from,
                  double to) {
  for (const auto& s : policy.segments()) {
    const double a = std::fmax(s.start, from);
    const double b = std::fmin(s.end, to);
    if (b > a) out.push_back({a, b, s.power});
  }
}

void append(std::vector<PowerSegment>& out, double a, double b, double power) {
  if (b > a) out.push_back({a, b, power});
}

double bits_between(const TransmissionPolicy& policy, const RateFunction& g, double a, double b) {
  return transmitted_bits(policy, g, b) - transmitted_bits(policy, g, a);
}

struct Pivot {
  double slope = 0.0;
  std::size_t index = 0;
};

// Smallest front slope anchored at (tau_l, E(tau_l-)) that stays under the
// staircase; the earliest epoch attaining it becomes binding.
Pivot front_pivot(const HarvestTrace& tx, std::size_t l) {
  Pivot best{-std::numeric_limits<double>::infinity(), 0};
  const double el = tx.prefix(l);
  const double tl = tx[l].time;
  for (std::size_t k = 0; k < l; ++k) {
    const double chord = (el - tx.prefix(k)) / (tl - tx[k].time);
    if (chord > best.slope) best = {chord, k};
  }
  return best;
}

// Smallest tail slope from (tau_r, E(tau_r-)) that touches an epoch in
// (tau_r, tau_m); the last epoch attaining it becomes binding.
Pivot tail_pivot(const HarvestTrace& tx, std::size_t r, std::size_t m) {
  Pivot best{std::numeric_limits<double>::infinity(), r};
  const double er = tx.prefix(r);
  const double tr = tx[r].time;
  for (std::size_t k = r + 1; k < m; ++k) {
    const double chord = (tx.prefix(k) - er) / (tx[k].time - tr);
    if (chord <= best.slope) best = {chord, k};
  }
  return best;
}

std::size_t energy_consistent_end(const HarvestTrace& tx, const TransmissionPolicy& policy) {
  const double t_stop = policy.finish();
  std::size_t m = tx.count_before(t_stop);
  const double used = consumed_energy(policy, t_stop);
  if (m > 0 && std::abs(used - tx.prefix(m - 1)) < std::abs(used - tx.prefix(m))) --m;
  return m;
}

}  // namespace

ConstantLine constant_line(const ProblemInstance& instance, const RateFunction& g) {
  const auto& tx = instance.tx();
  const double gamma0 = instance.initial_on_time();
  const double b0 = instance.bits();
  if (tx.empty()) throw Error(ErrorCode::InsufficientHarvest, "transmitter never harvests");

  ConstantLine line;
  bool found = false;
  for (std::size_t k = 0; k < tx.size(); ++k) {
    const double e = tx.prefix(k + 1);
    if (gamma0 * g(e / gamma0) >= b0 * (1.0 - 1e-14)) {
      line.tau_n_index = k;
      found = true;
      break;
    }
  }
  if (!found) {
    throw Error(ErrorCode::InsufficientHarvest, "B_0 cannot be sent within Gamma_0 using all harvests");
  }
  const std::size_t n = line.tau_n_index;
  const double en = tx.prefix(n + 1);
  line.tau_n = tx[n].time;
  line.gamma_tilde = std::fmin(solve_duration_for_bits(g, en, b0), gamma0);
  line.p_c = en / line.gamma_tilde;

  // Earliest start keeping the p_c line under the staircase at tau_0..tau_n.
  std::vector<double> lead(n + 1);
  double t_start = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    lead[k] = tx[k].time - tx.prefix(k) / line.p_c;
    t_start = std::fmax(t_start, lead[k]);
  }
  line.t_start = t_start;
  line.t_stop = t_start + line.gamma_tilde;

  line.tau_q = t_start;
  line.tau_q_alt = t_start;
  bool have_alt = false;
  for (std::size_t k = 0; k <= n; ++k) {
    if (std::abs(lead[k] - t_start) > 1e-12 * std::fmax(1.0, tx[k].time)) continue;
    if (!have_alt) {
      line.tau_q_alt = tx[k].time;
      have_alt = true;
    }
    if (tx.prefix(k) > 0.0) {
      line.tau_q = tx[k].time;
      break;
    }
  }
  return line;
}

InitResult init_policy(const ProblemInstance& instance, const RateFunction& g) {
  const auto& tx = instance.tx();
  const auto line = constant_line(instance, g);

  InitResult init;
  init.tau_n = line.tau_n;
  init.gamma_tilde = line.gamma_tilde;
  init.p_c = line.p_c;
  init.tau_q = line.tau_q;
  init.t_start = line.t_start;

  // No arrival inside (tau_n, T_stop): the line already ends on the staircase.
  if (tx.count_before(line.t_stop) == line.tau_n_index + 1) {
    init.policy = split_at_binding_epochs(
        TransmissionPolicy({{line.t_start, line.t_stop, line.p_c}}), tx, kBindingRel);
    init.t_stop = line.t_stop;
    return init;
  }

  const double remaining_bits = (line.t_stop - line.tau_q) * g(line.p_c);
  const auto tail = baseline::min_finish_unconstrained(tx, g, remaining_bits, line.tau_q);
  std::vector<PowerSegment> segs;
  append(segs, line.t_start, line.tau_q, line.p_c);
  for (const auto& s : tail.segments()) segs.push_back(s);
  if (!segs.empty()) segs.front().start = line.t_start;
  init.policy = split_at_binding_epochs(TransmissionPolicy(std::move(segs)), tx, kBindingRel);
  init.t_stop = init.policy.finish();
  init.spliced = true;
  return init;
}

InitResult init_policy(const ProblemInstance& instance) {
  return init_policy(instance, LogRate(instance.rate()));
}

bool should_terminate(const PullBackState& state, const ProblemInstance& instance) {
  const double gamma0 = instance.initial_on_time();
  const double t0 = first_epoch(instance);
  return state.duration() >= gamma0 * (1.0 - kTimeRel) || state.t_start <= t0 + time_slack(t0);
}

PullBackState initial_state(const InitResult& init, const ProblemInstance& instance) {
  const auto& tx = instance.tx();
  const auto segs = init.policy.segments();
  if (segs.empty()) throw Error(ErrorCode::InternalInvariant, "empty initial policy");

  PullBackState state;
  state.policy = init.policy;
  state.t_start = init.policy.start();
  state.t_stop = init.policy.finish();
  state.p_l = segs.front().power;
  state.p_r = segs.back().power;
  state.m = energy_consistent_end(tx, init.policy);
  if (segs.size() > 1) {
    state.l = epoch_index(tx, segs[1].start);
    state.r = epoch_index(tx, segs.back().start);
  } else {
    state.l = state.r = tx.count_before(state.t_start + kEpochAbs);
    state.l = state.r = state.l > 0 ? state.l - 1 : 0;
  }
  state.tau_l = tx[state.l].time;
  state.tau_r = tx[state.r].time;
  state.terminated = should_terminate(state, instance);
  return state;
}

PullBackState pull_back_step(const PullBackState& state, const ProblemInstance& instance,
                             const RateFunction& g) {
  if (should_terminate(state, instance)) {
    PullBackState same = state;
    same.terminated = true;
    return same;
  }

  const auto& tx = instance.tx();
  const double b0 = instance.bits();
  const std::size_t l = state.l;
  const std::size_t r = state.r;
  const std::size_t m = state.m;
  if (l == 0 || l > r || r >= m || m > tx.size() || !(state.tau_l > state.t_start)) {
    throw Error(ErrorCode::InternalInvariant, "pull-back state has no binding front/tail epochs");
  }
  const double tau_l = tx[l].time;
  const double tau_r = tx[r].time;
  const double front_energy = tx.prefix(l);
  const double tail_energy = tx.prefix(m) - tx.prefix(r);
  const double interior_bits = bits_between(state.policy, g, tau_l, tau_r);
  const Pivot front_limit = front_pivot(tx, l);

  // Step 1: raise the tail power to its next event.
  PullBackState next;
  next.iteration = state.iteration + 1;
  std::vector<PowerSegment> after;  // new policy from tau_l on
  double after_bits = 0.0;

  if (m > r + 1) {
    const Pivot tp = tail_pivot(tx, r, m);
    next.p_r = tp.slope;
    next.r = tp.index;
    next.m = m;
    next.t_stop = tau_r + tail_energy / tp.slope;
    append_slice(after, state.policy, tau_l, tau_r);
    append(after, tau_r, tx[tp.index].time, tp.slope);
    append(after, tx[tp.index].time, next.t_stop, tp.slope);
    after_bits = interior_bits + g(tp.slope) * (next.t_stop - tau_r);
  } else {
    // No epoch inside the tail: its power can grow without bound, so the tail
    // collapses onto tau_r and the segment before it becomes the new tail.
    const auto segs = state.policy.segments();
    auto before = std::find_if(segs.begin(), segs.end(),
                               [&](const PowerSegment& s) { return std::abs(s.end - tau_r) <= kEpochAbs; });
    if (before == segs.end()) {
      throw Error(ErrorCode::InternalInvariant, "no segment ends at tau_r");
    }
    next.t_stop = tau_r;
    next.m = r;
    if (r == l) {
      // The front is the only segment left.
      next.r = l;
      next.p_r = 0.0;
    } else {
      next.r = epoch_index(tx, before->start);
      next.p_r = before->power;
      append_slice(after, state.policy, tau_l, tau_r);
      after_bits = interior_bits;
    }
  }

  const double front_bits = b0 - after_bits;
  const double rho = front_bits / front_energy;
  bool front_ok = rho > 0.0 && rho < g.slope_at_zero();
  double p_front = 0.0;
  if (front_ok) {
    p_front = solve_power_for_ratio(g, rho);
    front_ok = p_front >= front_limit.slope;
  }

  std::vector<PowerSegment> segs;
  if (front_ok) {
    // Step 2, front stays feasible.
    next.p_l = p_front;
    next.l = l;
    next.t_start = tau_l - front_energy / p_front;
    append(segs, next.t_start, tau_l, p_front);
    segs.insert(segs.end(), after.begin(), after.end());
    if (r == l && m == r + 1) next.p_r = p_front;
  } else {
    // Step 2, front hits the staircase first: discard step 1, pin the front
    // at its pivot and rebalance the original tail.
    next.p_l = front_limit.slope;
    next.l = front_limit.index;
    const double tau_lp = tx[next.l].time;
    next.t_start = tx.prefix(next.l) > 0.0 ? tau_l - front_energy / next.p_l : tau_lp;
    const double new_front_bits = front_energy * g(next.p_l) / next.p_l;
    const double tail_bits = b0 - new_front_bits - interior_bits;
    if (!(tail_energy > 0.0) || !(tail_bits > 0.0)) {
      throw Error(ErrorCode::NumericalFailure, "tail rebalance has no positive solution");
    }
    next.r = r;
    next.m = m;
    next.p_r = solve_power_for_ratio(g, tail_bits / tail_energy);
    next.t_stop = tau_r + tail_energy / next.p_r;
    append(segs, next.t_start, tau_lp, next.p_l);
    append(segs, std::fmax(next.t_start, tau_lp), tau_l, next.p_l);
    append_slice(segs, state.policy, tau_l, tau_r);
    append(segs, tau_r, next.t_stop, next.p_r);
  }

  next.policy = split_at_binding_epochs(TransmissionPolicy(std::move(segs)), tx, kBindingRel);
  next.tau_l = tx[next.l].time;
  next.tau_r = tx[next.r].time;
  next.terminated = should_terminate(next, instance);
  if (!next.terminated && (next.m <= next.r || next.l == 0)) {
    throw Error(ErrorCode::InternalInvariant, "pull-back reached a degenerate regime before terminating");
  }
  return next;
}

TransmissionPolicy quit_finalize(const PullBackState& prev, const PullBackState& last,
                                 const ProblemInstance& instance, const RateFunction& g) {
  const double gamma0 = instance.initial_on_time();
  if (last.duration() <= gamma0 * (1.0 + kTimeRel)) return last.policy;
  if (std::abs(prev.duration() - gamma0) <= gamma0 * kTimeRel) return prev.policy;

  const auto& tx = instance.tx();
  const double b0 = instance.bits();
  const double tau_l = tx[prev.l].time;
  const double tau_r = tx[prev.r].time;
  const double front_energy = tx.prefix(prev.l);
  const double tail_energy = tx.prefix(prev.m) - tx.prefix(prev.r);
  const double interior_bits = bits_between(prev.policy, g, tau_l, tau_r);

  auto tail_length = [&](double x) {
    const double front = (tau_l - x) * g(front_energy / (tau_l - x));
    const double need = b0 - interior_bits - front;
    if (need <= 0.0) return 0.0;
    return solve_duration_for_bits(g, tail_energy, need);
  };
  // Duration grows as the start moves earlier; f is increasing in x.
  auto f = [&](double x) { return gamma0 - (tau_r + tail_length(x) - x); };

  const double lo = last.t_start;
  const double hi = prev.t_start;
  if (!(f(lo) < 0.0) || !(f(hi) > 0.0)) {
    throw Error(ErrorCode::NumericalFailure, "QUIT bracket does not straddle Gamma_0");
  }
  const double x = detail::bisect_increasing(f, lo, hi);
  const double y = tau_r + tail_length(x);

  std::vector<PowerSegment> segs;
  append(segs, x, tau_l, front_energy / (tau_l - x));
  append_slice(segs, prev.policy, tau_l, tau_r);
  append(segs, tau_r, y, tail_energy / (y - tau_r));
  return split_at_binding_epochs(TransmissionPolicy(std::move(segs)), tx, kBindingRel);
}

OffResult off_solve(const ProblemInstance& instance, const RateFunction& g) {
  const auto init = init_policy(instance, g);
  PullBackState state = initial_state(init, instance);

  OffResult result;
  result.tau_q = init.tau_q;
  result.init_finish = init.t_stop;
  result.durations.push_back(state.duration());
  if (state.terminated) {
    result.policy = state.policy;
    return result;
  }

  const std::size_t cap = 4 * (instance.tx().size() + 2) + 16;
  while (true) {
    PullBackState next = pull_back_step(state, instance, g);
    ++result.iterations;
    result.durations.push_back(next.duration());
    if (next.terminated) {
      result.policy = quit_finalize(state, next, instance, g);
      result.quit_interpolated = !(result.policy == next.policy);
      return result;
    }
    if (result.iterations > cap) {
      throw Error(ErrorCode::NumericalFailure, "pull-back failed to terminate");
    }
    state = std::move(next);
  }
}

OffResult off_solve(const ProblemInstance& instance) {
  return off_solve(instance, LogRate(instance.rate()));
}

StructureReport verify_structure(const TransmissionPolicy& policy, const ProblemInstance& instance,
                                 const RateFunction& g, double tol) {
  StructureReport rep;
  const auto& tx = instance.tx();
  const double b0 = instance.bits();
  const double gamma0 = instance.initial_on_time();
  const double inf = std::numeric_limits<double>::infinity();
  if (policy.empty() || tx.empty()) {
    rep.bits = rep.monotone_power = rep.binding_switches = rep.duration = rep.contains_tau_q = {false, inf};
    return rep;
  }
  const auto segs = policy.segments();

  rep.bits.residual = std::abs(total_bits(policy, g) - b0) / std::fmax(1.0, b0);
  rep.bits.pass = rep.bits.residual <= tol;

  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    const double drop = segs[i].power - segs[i + 1].power;
    rep.monotone_power.residual =
        std::fmax(rep.monotone_power.residual, drop / std::fmax(1.0, segs[i].power));
  }
  rep.monotone_power.pass = rep.monotone_power.residual <= tol;

  bool switches_on_epochs = true;
  auto binding_gap = [&](double t, bool must_be_epoch) {
    const auto k = tx.find_epoch(t, kEpochAbs);
    if (!k && must_be_epoch) switches_on_epochs = false;
    const double e = k ? tx.prefix(*k) : tx.cumulative(t);
    return std::abs(consumed_energy(policy, t) - e) / std::fmax(1.0, e);
  };
  for (std::size_t i = 1; i < segs.size(); ++i) {
    rep.binding_switches.residual = std::fmax(rep.binding_switches.residual, binding_gap(segs[i].start, true));
  }
  rep.binding_switches.residual = std::fmax(rep.binding_switches.residual, binding_gap(policy.finish(), false));
  if (!switches_on_epochs) rep.binding_switches.residual = inf;
  rep.binding_switches.pass = rep.binding_switches.residual <= tol;

  const double span = policy.finish() - policy.start();
  if (policy.start() > tx[0].time + kEpochAbs) {
    rep.duration.residual = std::abs(span - gamma0) / std::fmax(1.0, gamma0);
  } else {
    rep.duration.residual = std::fmax(0.0, span - gamma0) / std::fmax(1.0, gamma0);
  }
  rep.duration.pass = rep.duration.residual <= tol;

  try {
    const auto line = constant_line(instance, g);
    rep.tau_q = line.tau_q;
    auto distance_to = [&](double t) {
      double d = std::abs(policy.finish() - t);
      for (const auto& s : segs) d = std::fmin(d, std::abs(s.start - t));
      return d;
    };
    rep.contains_tau_q.residual = distance_to(line.tau_q);
    rep.contains_tau_q.pass = rep.contains_tau_q.residual <= kEpochAbs;
    rep.contains_tau_q_alt = distance_to(line.tau_q_alt) <= kEpochAbs;
  } catch (const Error&) {
    rep.contains_tau_q = {false, inf};
  }
  return rep;
}

StructureReport verify_structure(const TransmissionPolicy& policy, const ProblemInstance& instance,
                                 double tol) {
  return verify_structure(policy, instance, LogRate(instance.rate()), tol);
}

}  // namespace ehsched::offline
