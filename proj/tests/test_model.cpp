#include <doctest.h>

#include "ehsched/error.hpp"
#include "ehsched/model.hpp"

using namespace ehsched;

namespace {

ProblemInstance golden() {
  return ProblemInstance(HarvestTrace({{0.0, 1.0}, {1.0, 3.0}}), HarvestTrace({{0.0, 1.0}}), 1.0, 2.0);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an ehsched::Error");
  return ErrorCode::InternalInvariant;
}

}  // namespace

TEST_CASE("cumulative energy is left-continuous at epochs") {
  HarvestTrace tx({{0.0, 1.0}, {1.0, 3.0}});
  CHECK(tx.cumulative(0.0) == 0.0);
  CHECK(tx.cumulative_right(0.0) == 1.0);
  CHECK(tx.cumulative(0.5) == 1.0);
  CHECK(tx.cumulative(1.0) == 1.0);
  CHECK(tx.cumulative_right(1.0) == 4.0);
  CHECK(tx.cumulative(2.0) == 4.0);
  CHECK(cumulative_energy(tx, 1.0) == 1.0);
  CHECK(cumulative_energy_right(tx, 1.0) == 4.0);
  CHECK(tx.prefix(1) == tx.cumulative(1.0));
  CHECK(tx.count_before(1.0) == 1);
  CHECK(tx.find_epoch(1.0 + 1e-12, 1e-9).value() == 1);
  CHECK_FALSE(tx.find_epoch(0.5, 1e-9).has_value());
}

TEST_CASE("receiver on-time is energy over receiver power") {
  ProblemInstance inst(HarvestTrace({{0.0, 1.0}}), HarvestTrace({{0.0, 1.0}, {2.0, 1.0}}), 2.0, 1.0);
  CHECK(cumulative_rx_time(inst, 1.0) == doctest::Approx(0.5));
  CHECK(cumulative_rx_time(inst, 2.0) == doctest::Approx(0.5));
  CHECK(cumulative_rx_time_right(inst, 2.0) == doctest::Approx(1.0));
  CHECK_FALSE(inst.single_rx_at_zero());
  CHECK(code_of([&] { (void)inst.initial_on_time(); }) == ErrorCode::InvalidArgument);
  CHECK(golden().initial_on_time() == 1.0);
  CHECK(golden().with_initial_on_time(3.0).initial_on_time() == 3.0);
}

TEST_CASE("malformed traces and instances are rejected") {
  CHECK(code_of([] { HarvestTrace({{1.0, 1.0}, {0.5, 1.0}}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { HarvestTrace({{1.0, 1.0}, {1.0, 1.0}}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { HarvestTrace({{-1.0, 1.0}}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { HarvestTrace({{0.0, 0.0}}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] {
          ProblemInstance(HarvestTrace({{0.0, 1.0}}), HarvestTrace({{0.0, 1.0}}), 0.0, 1.0);
        }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] {
          ProblemInstance(HarvestTrace({{0.0, 1.0}}), HarvestTrace({{0.0, 1.0}}), 1.0, -1.0);
        }) == ErrorCode::InvalidArgument);
}

TEST_CASE("policies must be contiguous with positive lengths") {
  CHECK(code_of([] { TransmissionPolicy({{0.0, 1.0, 1.0}, {1.5, 2.0, 1.0}}); }) == ErrorCode::Structural);
  CHECK(code_of([] { TransmissionPolicy({{0.0, 1.0, 1.0}, {0.8, 2.0, 1.0}}); }) == ErrorCode::Structural);
  CHECK(code_of([] { TransmissionPolicy({{1.0, 1.0, 1.0}}); }) == ErrorCode::Structural);
  CHECK(code_of([] { TransmissionPolicy({{0.0, 1.0, -1.0}}); }) == ErrorCode::Structural);
  CHECK(code_of([] { (void)TransmissionPolicy().finish(); }) == ErrorCode::Structural);
  TransmissionPolicy p({{0.0, 1.0, 1.0}, {1.0 + 1e-15, 2.0, 3.0}});
  CHECK(p.segments()[1].start == p.segments()[0].end);
}

TEST_CASE("consumption, bits and on-time accumulate over segments") {
  const LogRate g;
  TransmissionPolicy p({{0.5, 1.0, 0.0}, {1.0, 2.0, 1.0}, {2.0, 3.0, 3.0}});
  CHECK(consumed_energy(p, 0.0) == 0.0);
  CHECK(consumed_energy(p, 1.5) == doctest::Approx(0.5));
  CHECK(consumed_energy(p, 10.0) == doctest::Approx(4.0));
  CHECK(total_bits(p, g) == doctest::Approx(1.0 + 2.0));
  CHECK(transmitted_bits(p, g, 2.5) == doctest::Approx(1.0 + 1.0));
  CHECK(receiver_on_time(p, 10.0) == doctest::Approx(2.0));
  CHECK(p.on_duration() == doctest::Approx(2.0));
  const auto trimmed = trim_idle_ends(p);
  CHECK(trimmed.start() == 1.0);
}

TEST_CASE("binding epochs split segments") {
  HarvestTrace tx({{0.0, 1.0}, {1.0, 3.0}});
  TransmissionPolicy p({{0.0, 2.0, 1.0}});
  // U(1) = 1 = E(1-) so the segment is split there; U(2) = 2 < E(2-) = 4.
  const auto split = split_at_binding_epochs(p, tx);
  REQUIRE(split.size() == 2);
  CHECK(split.segments()[0].end == 1.0);
}

TEST_CASE("feasibility detects energy and on-time violations") {
  const auto inst = golden();
  const LogRate g;
  TransmissionPolicy ok({{0.340684266433869, 1.0, 1.51672400503953}, {1.0, 1.34068426643387, 8.80580729894767}});
  const auto rep = check_feasibility(ok, inst, g);
  CHECK(rep.feasible);
  CHECK(rep.bits_delivered == doctest::Approx(2.0).epsilon(1e-9));

  TransmissionPolicy greedy({{0.0, 0.5, 4.0}});
  const auto bad = check_feasibility(greedy, inst, g);
  CHECK_FALSE(bad.feasible);
  CHECK(bad.worst_energy_violation > 0.9);

  TransmissionPolicy slow({{0.0, 1.0, 1.0}, {1.0, 2.5, 0.5}});
  const auto late = check_feasibility(slow, inst.with_bits(total_bits(slow, g)), g);
  CHECK_FALSE(late.feasible);
  CHECK(late.worst_time_violation == doctest::Approx(1.5));
}
