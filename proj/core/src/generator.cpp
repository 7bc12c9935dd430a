#include <cmath>
#include <random>
#include <vector>

#include "ehsched/error.hpp"
#include "ehsched/lab.hpp"

namespace ehsched::lab {

namespace {

constexpr int kMaxDraws = 1000;

// Draws are built directly from engine output so that instances are identical
// across standard library implementations.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}

  // Uniform on (0, 1).
  double open01() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * open01(); }
  double exponential(double mean) { return -mean * std::log(open01()); }

 private:
  std::mt19937_64 engine_;
};

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, std::string("trace spec: ") + what);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void validate(const TraceSpec& spec) {
  require(spec.horizon > 0.0 && std::isfinite(spec.horizon), "horizon must be positive");
  require(spec.intensity >= 0.0 && std::isfinite(spec.intensity), "intensity must be >= 0");
  require(spec.intensity > 0.0 || spec.arrival_at_zero, "zero intensity yields no arrivals");
  require(spec.energy_a > 0.0, "energy parameter must be positive");
  if (spec.energy == EnergyDistribution::Uniform) {
    require(spec.energy_b >= spec.energy_a, "uniform energy range reversed");
  }
  require(spec.gamma_min > 0.0 && spec.gamma_max >= spec.gamma_min, "bad on-time range");
  require(spec.bits_min > 0.0 && spec.bits_max >= spec.bits_min, "bad bits range");
  require(spec.rx_power > 0.0, "rx_power must be positive");
  require(spec.rate.scale > 0.0, "rate scale must be positive");
}

ProblemInstance generate_instance(const TraceSpec& spec) {
  validate(spec);
  Draw draw(spec.seed);
  const LogRate g(spec.rate);

  for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
    std::vector<Arrival> tx;
    double t = spec.arrival_at_zero ? 0.0 : draw.exponential(1.0 / spec.intensity);
    while (t < spec.horizon && (spec.max_arrivals == 0 || tx.size() < spec.max_arrivals)) {
      const double amount = spec.energy == EnergyDistribution::Uniform
                                ? draw.uniform(spec.energy_a, spec.energy_b)
                                : draw.exponential(spec.energy_a);
      tx.push_back({t, amount});
      if (spec.intensity == 0.0) break;
      t += draw.exponential(1.0 / spec.intensity);
    }
    const double gamma0 = draw.uniform(spec.gamma_min, spec.gamma_max);
    const double bits = draw.uniform(spec.bits_min, spec.bits_max);
    if (tx.empty()) continue;

    HarvestTrace trace(std::move(tx));
    const double capacity = gamma0 * g(trace.total() / gamma0);
    if (bits < capacity * (1.0 - 1e-9)) {
      return ProblemInstance(std::move(trace), HarvestTrace({{0.0, gamma0 * spec.rx_power}}),
                             spec.rx_power, bits, spec.rate);
    }
  }
  throw Error(ErrorCode::InvalidArgument,
              "trace spec: could not draw an instance whose bit target is deliverable");
}

}  // namespace ehsched::lab
