#include "ehsched/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ehsched/error.hpp"

namespace ehsched {

HarvestTrace::HarvestTrace(std::vector<Arrival> arrivals) : arrivals_(std::move(arrivals)) {
  prefix_.reserve(arrivals_.size() + 1);
  for (std::size_t i = 0; i < arrivals_.size(); ++i) {
    const auto& a = arrivals_[i];
    if (!std::isfinite(a.time) || a.time < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "arrival time must be finite and >= 0");
    }
    if (!std::isfinite(a.amount) || !(a.amount > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "arrival amount must be positive");
    }
    if (i > 0 && !(a.time > arrivals_[i - 1].time)) {
      throw Error(ErrorCode::InvalidArgument, "arrival times must strictly increase");
    }
    prefix_.push_back(prefix_.back() + a.amount);
  }
}

std::size_t HarvestTrace::count_before(double t) const {
  auto it = std::lower_bound(arrivals_.begin(), arrivals_.end(), t,
                             [](const Arrival& a, double v) { return a.time < v; });
  return static_cast<std::size_t>(it - arrivals_.begin());
}

double HarvestTrace::cumulative(double t) const { return prefix_[count_before(t)]; }

double HarvestTrace::cumulative_right(double t) const {
  auto it = std::upper_bound(arrivals_.begin(), arrivals_.end(), t,
                             [](double v, const Arrival& a) { return v < a.time; });
  return prefix_[static_cast<std::size_t>(it - arrivals_.begin())];
}

std::optional<std::size_t> HarvestTrace::find_epoch(double t, double abs_tol) const {
  const std::size_t k = count_before(t - abs_tol);
  if (k < arrivals_.size() && std::abs(arrivals_[k].time - t) <= abs_tol) return k;
  return std::nullopt;
}

double cumulative_energy(const HarvestTrace& trace, double t) { return trace.cumulative(t); }
double cumulative_energy_right(const HarvestTrace& trace, double t) {
  return trace.cumulative_right(t);
}

namespace {

HarvestTrace on_time_trace(const HarvestTrace& rx, double rx_power) {
  std::vector<Arrival> out;
  out.reserve(rx.size());
  for (const auto& a : rx.arrivals()) out.push_back({a.time, a.amount / rx_power});
  return HarvestTrace(std::move(out));
}

}  // namespace

ProblemInstance::ProblemInstance(HarvestTrace tx, HarvestTrace rx, double rx_power, double bits,
                                 RateFunctionSpec rate)
    : tx_(std::move(tx)), rx_(std::move(rx)), rx_power_(rx_power), bits_(bits), rate_(rate) {
  if (!(rx_power > 0.0) || !std::isfinite(rx_power)) {
    throw Error(ErrorCode::InvalidArgument, "rx_power must be positive");
  }
  if (!(bits > 0.0) || !std::isfinite(bits)) {
    throw Error(ErrorCode::InvalidArgument, "bits must be positive");
  }
  if (!(rate.scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "rate scale must be positive");
  rx_on_time_ = on_time_trace(rx_, rx_power_);
}

bool ProblemInstance::single_rx_at_zero() const noexcept {
  return rx_.size() == 1 && rx_[0].time == 0.0;
}

double ProblemInstance::initial_on_time() const {
  if (!single_rx_at_zero()) {
    throw Error(ErrorCode::InvalidArgument, "offline solver needs a single receiver arrival at t=0");
  }
  return rx_on_time_[0].amount;
}

ProblemInstance ProblemInstance::with_rate(RateFunctionSpec rate) const {
  return ProblemInstance(tx_, rx_, rx_power_, bits_, rate);
}

ProblemInstance ProblemInstance::with_bits(double bits) const {
  return ProblemInstance(tx_, rx_, rx_power_, bits, rate_);
}

ProblemInstance ProblemInstance::with_initial_on_time(double on_time) const {
  return ProblemInstance(tx_, HarvestTrace({{0.0, on_time * rx_power_}}), rx_power_, bits_, rate_);
}

double cumulative_rx_time(const ProblemInstance& instance, double t) {
  return instance.rx_on_time().cumulative(t);
}

double cumulative_rx_time_right(const ProblemInstance& instance, double t) {
  return instance.rx_on_time().cumulative_right(t);
}

TransmissionPolicy::TransmissionPolicy(std::vector<PowerSegment> segments)
    : segments_(std::move(segments)) {
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    auto& s = segments_[i];
    if (!std::isfinite(s.start) || !std::isfinite(s.end) || !std::isfinite(s.power)) {
      throw Error(ErrorCode::Structural, "segment values must be finite");
    }
    if (s.start < 0.0) throw Error(ErrorCode::Structural, "segment starts before t=0");
    if (!(s.end > s.start)) {
      throw Error(ErrorCode::Structural, "segment " + std::to_string(i) + " has end <= start");
    }
    if (s.power < 0.0) throw Error(ErrorCode::Structural, "negative power");
    if (i > 0) {
      auto& prev = segments_[i - 1];
      const double gap = std::abs(s.start - prev.end);
      if (gap > 1e-12 * std::fmax(1.0, std::abs(s.start))) {
        throw Error(ErrorCode::Structural,
                    "segments " + std::to_string(i - 1) + " and " + std::to_string(i) +
                        " are not contiguous");
      }
      s.start = prev.end;
      if (!(s.end > s.start)) throw Error(ErrorCode::Structural, "degenerate segment after snap");
    }
  }
}

double TransmissionPolicy::start() const {
  if (segments_.empty()) throw Error(ErrorCode::Structural, "empty policy has no start");
  return segments_.front().start;
}

double TransmissionPolicy::finish() const {
  if (segments_.empty()) throw Error(ErrorCode::Structural, "empty policy has no finish");
  return segments_.back().end;
}

double TransmissionPolicy::on_duration() const noexcept {
  double d = 0.0;
  for (const auto& s : segments_) {
    if (s.power > 0.0) d += s.length();
  }
  return d;
}

namespace {

double overlap(const PowerSegment& s, double t) {
  return std::clamp(t, s.start, s.end) - s.start;
}

}  // namespace

double consumed_energy(const TransmissionPolicy& policy, double t) {
  double u = 0.0;
  for (const auto& s : policy.segments()) {
    if (s.start >= t) break;
    u += s.power * overlap(s, t);
  }
  return u;
}

double transmitted_bits(const TransmissionPolicy& policy, const RateFunction& g, double t) {
  double b = 0.0;
  for (const auto& s : policy.segments()) {
    if (s.start >= t) break;
    b += g(s.power) * overlap(s, t);
  }
  return b;
}

double total_bits(const TransmissionPolicy& policy, const RateFunction& g) {
  double b = 0.0;
  for (const auto& s : policy.segments()) b += g(s.power) * s.length();
  return b;
}

double receiver_on_time(const TransmissionPolicy& policy, double t) {
  double o = 0.0;
  for (const auto& s : policy.segments()) {
    if (s.start >= t) break;
    if (s.power > 0.0) o += overlap(s, t);
  }
  return o;
}

TransmissionPolicy split_at_binding_epochs(const TransmissionPolicy& policy, const HarvestTrace& tx,
                                           double rel_tol) {
  std::vector<PowerSegment> out;
  out.reserve(policy.size() + tx.size());
  double used = 0.0;  // U at the start of the current segment
  for (const auto& s : policy.segments()) {
    double cursor = s.start;
    for (std::size_t k = tx.count_before(s.start); k < tx.size(); ++k) {
      const double tau = tx[k].time;
      if (tau >= s.end) break;
      if (tau <= cursor) continue;
      const double u = used + s.power * (tau - s.start);
      const double e = tx.prefix(k);
      if (std::abs(u - e) <= rel_tol * std::fmax(1.0, e)) {
        out.push_back({cursor, tau, s.power});
        cursor = tau;
      }
    }
    out.push_back({cursor, s.end, s.power});
    used += s.power * s.length();
  }
  return TransmissionPolicy(std::move(out));
}

TransmissionPolicy trim_idle_ends(const TransmissionPolicy& policy) {
  auto segs = policy.segments();
  std::size_t first = 0;
  std::size_t last = segs.size();
  while (first < last && segs[first].power == 0.0) ++first;
  while (last > first && segs[last - 1].power == 0.0) --last;
  return TransmissionPolicy(std::vector<PowerSegment>(segs.begin() + first, segs.begin() + last));
}

FeasibilityReport check_feasibility(const TransmissionPolicy& policy, const ProblemInstance& instance,
                                    const RateFunction& g, Tolerance tol) {
  FeasibilityReport report;
  report.bits_delivered = total_bits(policy, g);
  const bool bits_ok =
      std::abs(report.bits_delivered - instance.bits()) <= tol.bits_rel * instance.bits();
  if (policy.empty()) {
    report.feasible = bits_ok;
    return report;
  }

  const double end = policy.finish();
  std::vector<double> samples;
  samples.reserve(policy.size() + instance.tx().size() + instance.rx().size() + 1);
  for (const auto& s : policy.segments()) samples.push_back(s.start);
  samples.push_back(end);
  for (const auto& a : instance.tx().arrivals()) {
    if (a.time <= end) samples.push_back(a.time);
  }
  for (const auto& a : instance.rx().arrivals()) {
    if (a.time <= end) samples.push_back(a.time);
  }
  std::sort(samples.begin(), samples.end());
  samples.erase(std::unique(samples.begin(), samples.end()), samples.end());

  bool constraints_ok = true;
  double worst_scaled = 0.0;
  for (double t : samples) {
    const double e = instance.tx().cumulative(t);
    const double ev = consumed_energy(policy, t) - e;
    const double gam = instance.rx_on_time().cumulative(t);
    const double tv = receiver_on_time(policy, t) - gam;

    report.worst_energy_violation = std::fmax(report.worst_energy_violation, ev);
    report.worst_time_violation = std::fmax(report.worst_time_violation, tv);

    const double ev_scaled = ev / (tol.feasibility * std::fmax(1.0, e));
    const double tv_scaled = tv / (tol.feasibility * std::fmax(1.0, gam));
    const double scaled = std::fmax(ev_scaled, tv_scaled);
    if (scaled > 1.0) {
      constraints_ok = false;
      if (scaled > worst_scaled) {
        worst_scaled = scaled;
        report.violating_time = t;
      }
    }
  }
  report.feasible = bits_ok && constraints_ok;
  return report;
}

FeasibilityReport check_feasibility(const TransmissionPolicy& policy, const ProblemInstance& instance,
                                    Tolerance tol) {
  return check_feasibility(policy, instance, LogRate(instance.rate()), tol);
}

}  // namespace ehsched
