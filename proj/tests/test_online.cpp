#include <doctest.h>

#include <cmath>

#include "ehsched/error.hpp"
#include "ehsched/online.hpp"
#include "oracles.hpp"

using namespace ehsched;
namespace fz = oracle::frozen;

namespace {

ProblemInstance single(std::vector<Arrival> tx, double gamma0, double bits) {
  return ProblemInstance(HarvestTrace(std::move(tx)), HarvestTrace({{0.0, gamma0}}), 1.0, bits);
}

}  // namespace

TEST_CASE("start time scans events with right-limit harvests") {
  CHECK(online::online_start_time(single({{0.0, 1.0}, {1.0, 3.0}}, 1.0, 2.0)) == 1.0);
  CHECK(online::online_start_time(single({{0.0, 3.0}}, 1.0, 2.0)) == 0.0);

  // Receiver energy arriving later extends the on-time budget.
  const ProblemInstance two_rx(HarvestTrace({{0.0, 1.0}}), HarvestTrace({{0.0, 1.0}, {2.0, 1.0}}), 1.0, 1.1);
  CHECK(online::online_start_time(two_rx) == 2.0);

  // With 1 J and 2 s of on-time at most 2 log2(1.5) < 1.2 bits are possible.
  const auto short_rx = two_rx.with_bits(1.2);
  CHECK(2.0 * std::log2(1.5) == doctest::Approx(fz::kTwoLog2OneHalf));
  try {
    online::online_start_time(short_rx);
    FAIL("expected InsufficientHarvest");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientHarvest);
  }
  const auto lb = online::offline_lower_bound(short_rx);
  CHECK_FALSE(lb.achievable);
  CHECK(std::isinf(lb.value));
}

TEST_CASE("online run on the trivial instance") {
  const auto r = online::run_online(single({{0.0, 3.0}}, 1.0, 2.0));
  REQUIRE(r.power_history.size() == 1);
  CHECK(r.power_history[0].power == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(r.t_finish == doctest::Approx(1.0).epsilon(1e-10));
  const auto ratio = online::competitive_ratio(single({{0.0, 3.0}}, 1.0, 2.0));
  CHECK(ratio.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("online run on the golden instance") {
  const auto inst = single({{0.0, 1.0}, {1.0, 3.0}}, 1.0, 2.0);
  const auto r = online::run_online(inst);
  CHECK(r.t_start == 1.0);
  CHECK(r.power_history[0].power == doctest::Approx(fz::kPowerForHalfLog2).epsilon(1e-10));
  CHECK(r.t_finish == doctest::Approx(fz::kGoldenOnline).epsilon(1e-12));
  CHECK(check_feasibility(r.policy, inst).feasible);

  const auto ratio = online::competitive_ratio(inst);
  CHECK(ratio.basis == online::RatioBasis::ExactOffline);
  CHECK(ratio.value == doctest::Approx(fz::kGoldenRatio).epsilon(1e-9));
  CHECK(online::to_string(ratio.basis) == "exact-offline");
}

TEST_CASE("power rises at a mid-run arrival") {
  const auto inst = single({{0.0, 3.0}, {0.5, 1.0}}, 10.0, 2.0);
  const auto r = online::run_online(inst);
  REQUIRE(r.power_history.size() == 2);
  CHECK(r.power_history[0].power == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(r.power_history[1].epoch == 0.5);
  CHECK(r.power_history[1].power == doctest::Approx(fz::kOnlineL2).epsilon(1e-10));
  CHECK(r.t_finish == doctest::Approx(fz::kOnlineFinish).epsilon(1e-10));
}

TEST_CASE("multi-arrival receivers use the lower-bound basis") {
  const ProblemInstance inst(HarvestTrace({{0.0, 1.0}, {1.0, 3.0}}), HarvestTrace({{0.0, 0.5}, {1.0, 0.5}}),
                             1.0, 2.0);
  const auto ratio = online::competitive_ratio(inst);
  CHECK(ratio.basis == online::RatioBasis::LowerBound);
  CHECK(ratio.t_reference == online::offline_lower_bound(inst).value);
  const auto r = online::run_online(inst);
  CHECK(check_feasibility(r.policy, inst).feasible);
}
