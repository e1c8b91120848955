#include "doctest.h"
#include "timeq/timecon.hpp"

using namespace timeq;

namespace {
TimeExpr V(const char* n) { return TimeExpr::variable(n); }
TimeExpr C(long c) { return TimeExpr::constant(c); }
TimeConstraint tc(TimeExpr a, Rel r, TimeExpr b) { return {std::move(a), r, std::move(b)}; }

void checkModel(const TimeSet& ts) {
  auto r = isSatisfiable(ts);
  REQUIRE(r.sat);
  for (const auto& c : ts.constraints) CHECK(c.holds(r.model));
}
}  // namespace

TEST_CASE("satisfiability with exact models") {
  TimeSet ts;
  ts.constraints = {tc(V("tv1"), Rel::Le, C(2)), tc(V("tv2"), Rel::Ge, C(1) + V("tv1"))};
  checkModel(ts);
  Model m{{"tv1", Rational(21, 10)}, {"tv2", Rational(31415, 10000)}};
  CHECK_FALSE(ts.constraints[0].holds(m));  // 2.1 > 2
  CHECK(isSatisfiable(TimeSet{}).sat);
  TimeSet bad;
  bad.constraints = {tc(V("tv"), Rel::Gt, V("tv"))};
  CHECK_FALSE(isSatisfiable(bad).sat);
  TimeSet strict;
  strict.constraints = {tc(V("x"), Rel::Gt, C(1)), tc(V("x"), Rel::Lt, C(2)),
                        tc(V("y"), Rel::Eq, V("x") + V("x"))};
  checkModel(strict);
}

TEST_CASE("projection") {
  TimeSet body;
  body.constraints = {tc(V("y"), Rel::Ge, V("x")), tc(V("y"), Rel::Le, C(3))};
  auto r = eliminateForall(body, {"y"});
  REQUIRE(r.size() == 1);
  REQUIRE(r[0].constraints.size() == 1);
  Model lo{{"x", 3}}, hi{{"x", 4}};
  CHECK(r[0].constraints[0].holds(lo));
  CHECK_FALSE(r[0].constraints[0].holds(hi));
  CHECK(eliminateForall(body, {}).size() == 1);
  TimeSet empty;
  empty.constraints = {tc(V("y"), Rel::Gt, V("x")), tc(V("y"), Rel::Lt, V("x"))};
  CHECK(eliminateForall(empty, {"y"}).empty());
}

TEST_CASE("timed match") {
  TimeSet l;
  l.clocks = {"a0", "a1"};
  l.constraints = {tc(V("a1"), Rel::Ge, V("a0")), tc(V("a1"), Rel::Eq, V("a0") + V("dVirtual"))};
  TimeSet r = l.rename({{"a0", "b0"}, {"a1", "b1"}});
  ClockPairs pairs{{"a0", "b0"}, {"a1", "b1"}};
  CHECK(checkTimedMatch(l, r, pairs, {"dVirtual"}));

  TimeSet real;
  real.clocks = {"b0", "b1"};
  real.constraints = {tc(V("b1"), Rel::Ge, V("b0")), tc(V("b1"), Rel::Eq, V("b0") + V("dReal"))};
  TimeConstraint side = tc(V("dVirtual"), Rel::Gt, V("dReal"));
  l.constraints.push_back(side);
  real.constraints.push_back(side);
  CHECK_FALSE(checkTimedMatch(l, real, pairs, {"dVirtual", "dReal"}));
  ClockPairs back{{"b0", "a0"}, {"b1", "a1"}};
  CHECK_FALSE(checkTimedMatch(real, l, back, {"dVirtual", "dReal"}));

  // Strictly looser right side still covers every left time.
  TimeSet loose;
  loose.clocks = {"b0", "b1"};
  loose.constraints = {tc(V("b1"), Rel::Ge, V("b0"))};
  CHECK(checkTimedMatch(l, loose, pairs, {"dVirtual", "dReal"}));
  CHECK_FALSE(checkTimedMatch(loose, l, back, {"dVirtual", "dReal"}));
}

TEST_CASE("SMT bridge") {
  std::string sat = "(set-logic LRA)(declare-const x Real)(assert (> x 0))(check-sat)";
  auto missing = smtBridgeCheck(sat, "definitely-not-a-solver-binary");
  CHECK(missing.status == BridgeResult::SpawnError);
  auto r = smtBridgeCheck(sat, "z3 -in");
  if (r.status == BridgeResult::SpawnError) return;  // no solver installed
  CHECK(r.status == BridgeResult::Sat);
  CHECK(smtBridgeCheck("(assert false)(check-sat)", "z3 -in").status == BridgeResult::Unsat);
  CHECK(smtBridgeCheck("", "true").status == BridgeResult::MalformedReply);
  CHECK(smtBridgeCheck("", "sleep 5", 0.2).status == BridgeResult::Timeout);
}
