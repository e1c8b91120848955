#include "doctest.h"
#include "timeq/derivability.hpp"

using namespace timeq;

namespace {
const Term alice = Term::name("alice"), bob = Term::name("bob"), eve = Term::name("eve");
const Term symk = Term::key("symk");
const Term s1 = Term::sym(1), s2 = Term::sym(2), s3 = Term::sym(3), s4 = Term::sym(4);

DerivSet dc0() {
  return {{s1, {Term::sk(eve)}},
          {s2, {Term::enc(s1, symk)}},
          {s3, {Term::enc(Term::tuple({s2, s1}), Term::pk(alice))}},
          {s4, {s3, s2}}};
}
}  // namespace

TEST_CASE("normalizeUnion reaches the minimal fixpoint") {
  // Key pair of a non-name owner, so pk is not guessable.
  Term owner = Term::text("o", false);
  Term pkk = Term::pk(owner), skk = Term::sk(owner);
  Term t = Term::text("t", false);
  MinimalSet a{symk, pkk};
  MinimalSet b{Term::enc(Term::tuple({Term::enc(t, skk), t}), symk)};
  MinimalSet u = normalizeUnion(a, b);
  CHECK(u == MinimalSet{symk, pkk, t, Term::enc(t, skk)});
  CHECK(isMinimal(u));
  CHECK(normalizeUnion(a, {}) == a);
  Term k = Term::key("k"), k2 = Term::key("k2"), m = Term::text("m", false);
  CHECK(normalizeUnion({k, k2}, {Term::enc(m, k)}) == MinimalSet{k, k2, m});
}

TEST_CASE("dependency graph and topological sort") {
  auto order = topologicalSort(dc0());
  REQUIRE(order);
  CHECK(*order == std::vector<Term>{s1, s2, s3, s4});
  CHECK(dependencyGraph({}).empty());
  CHECK_FALSE(isAcyclic({{s1, {s2}}, {s2, {s1}}}));
}

TEST_CASE("derives") {
  DerivSet dc{{s1, {Term::sk(eve)}}};
  CHECK(derives(dc, s1, Term::tuple({alice, Term::sk(eve)})));
  Term na = Term::nonce(0, 0), nb = Term::nonce(1, 0), nc = Term::nonce(2, 0);
  DerivSet dc2{{s1, {na, nc}}};
  CHECK_FALSE(derives(dc2, s1, nb));
  CHECK(derives(dc2, s1, Term::pk(bob)));
  CHECK(derives(dc2, s1, Term::enc(na, nc)));
}

TEST_CASE("denotation sample") {
  TermSet alphabet{alice, bob, eve, Term::pk(bob)};
  auto sample = denotationSample(dc0(), Term::enc(s4, Term::pk(bob)), {3, 2}, alphabet);
  CHECK(sample.count(Term::enc(Term::enc(Term::sk(eve), symk), Term::pk(bob))));
  Term g = Term::enc(alice, symk);
  CHECK(denotationSample({}, g, {3, 2}, alphabet) == TermSet{g});
  Term t1 = Term::text("t1", false);
  auto one = denotationSample({{s1, {t1}}}, s1, {1, 2}, {alice});
  CHECK(one == TermSet{t1, alice});
  CHECK_THROWS(denotationSample({{s1, {s2}}, {s2, {s1}}}, s1, {2, 2}, alphabet));
}
