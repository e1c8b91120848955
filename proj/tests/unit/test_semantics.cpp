#include "doctest.h"
#include "timeq/semantics.hpp"

using namespace timeq;

namespace {

const char* kNs = R"(
role Alice {
  new Na;
  send enc(<Na, alice>, pk(eve));
  recv enc(<Na, Y>, pk(alice));
  send enc(Y, pk(eve));
}
role Bob {
  recv enc(<X, Z>, pk(bob));
  new Nb;
  send enc(<X, Nb>, pk(Z));
  recv enc(Nb, pk(bob));
}
scenario lowe {
  players: [alice as Alice keys { sk(alice) }, bob as Bob keys { sk(bob) }];
  knowledge: { sk(eve) };
}
)";

Configuration start(const std::string& text, const std::string& name) {
  ProtocolFile f = parseProtocol(text);
  return initialConfiguration(f, f.scenario(name));
}

const InternalSolver solver;

}  // namespace

TEST_CASE("Alice's first steps in the Lowe trace") {
  Configuration c = start(kNs, "lowe");
  auto s1 = successors(c, solver);
  REQUIRE(s1.size() == 1);  // Alice's New runs alone
  const Configuration& afterNew = s1[0].first;
  CHECK(afterNew.players[0].program[0].term ==
        Term::enc(Term::tuple({Term::nonce(0, 0), Term::name("alice")}), Term::pk(Term::name("eve"))));

  auto s2 = successors(afterNew, solver);
  const Configuration* sent = nullptr;
  for (const auto& [n, step] : s2)
    if (step.label.kind == Label::Send) sent = &n;
  REQUIRE(sent);
  CHECK(sent->ik == MinimalSet{Term::sk(Term::name("eve")), Term::nonce(0, 0)});

  // Bob receives enc(<sym1,sym2>,pk(bob)) with both symbols constrained by IK1.
  bool found = false;
  for (const auto& [n, step] : successors(*sent, solver)) {
    if (step.label.kind != Label::Recv || step.player != 1) continue;
    CHECK(step.label.term ==
          Term::enc(Term::tuple({Term::sym(1), Term::sym(2)}), Term::pk(Term::name("bob"))));
    CHECK(n.dc == DerivSet{{Term::sym(1), sent->ik}, {Term::sym(2), sent->ik}});
    found = true;
  }
  CHECK(found);
}

TEST_CASE("the man-in-the-middle receive exists") {
  Configuration c = start(kNs, "lowe");
  const Subst delta{{Term::sym(1), Term::nonce(0, 0)},
                    {Term::sym(2), Term::name("alice")},
                    {Term::sym(3), Term::nonce(1, 0)}};
  bool found = false;
  EnumerateOptions opts;
  opts.onStep = [&](const Configuration&, const Configuration&, const Step& s) {
    if (s.label.kind == Label::Recv && s.player == 0 && s.ssb == delta) found = true;
  };
  EnumerateResult r = enumerateTraces(c, solver, opts);
  CHECK(found);
  CHECK_FALSE(r.truncated);
  CHECK(r.leaves.size() > 1);
}

TEST_CASE("time constraints prune steps") {
  Configuration c = start(R"(
    role R { recv go # cur > 5; new x # cur <= 5; send x; }
    scenario s { players: [p as R]; knowledge: { }; public: { go }; })",
                          "s");
  EnumerateResult r = enumerateTraces(c, solver);
  REQUIRE(r.leaves.size() == 1);
  CHECK(r.leaves[0].labels.size() == 1);
  CHECK(r.leaves[0].players[0].program.size() == 2);
}

TEST_CASE("empty role gives the empty trace") {
  Configuration c = start("role E { } scenario s { players: [p as E]; knowledge: { }; }", "s");
  EnumerateResult r = enumerateTraces(c, solver);
  CHECK(r.states == 1);
  CHECK(r.leaves.size() == 1);
  CHECK(r.leaves[0].labels.empty());
}

TEST_CASE("conditionals") {
  SUBCASE("ground match keeps only the then branch") {
    Configuration c = start(R"(
      role R { if a := a then { send b; } else { send e; } }
      scenario s { players: [p as R]; knowledge: { }; public: { a b e }; })",
                            "s");
    EnumerateResult r = enumerateTraces(c, solver);
    REQUIRE(r.leaves.size() == 1);
    CHECK(r.leaves[0].labels[0].term == Term::text("b", true));
  }
  SUBCASE("a received value splits into both branches") {
    Configuration c = start(R"(
      role R { recv v; if v := secret then { send b; } else { send e; } }
      scenario s { players: [p as R]; knowledge: { secret }; public: { b e }; })",
                            "s");
    EnumerateResult r = enumerateTraces(c, solver);
    REQUIRE(r.leaves.size() == 2);
    int neq = 0;
    for (const auto& leaf : r.leaves)
      for (const auto& e : leaf.eq) neq += e.kind == CompConstraint::Neq;
    CHECK(neq == 1);
  }
  SUBCASE("else binds fresh symbols constrained by IK") {
    Configuration c = start(R"(
      role R { new n; send n; if <x, y> := <n, n> then { } else { send e; } }
      scenario s { players: [p as R]; knowledge: { }; public: { e }; })",
                            "s");
    EnumerateResult r = enumerateTraces(c, solver, {std::nullopt, false, {}});
    REQUIRE(r.leaves.size() == 2);
    const Configuration* elseLeaf = nullptr;
    for (const auto& l : r.leaves)
      if (!l.eq.empty() && l.eq.begin()->kind == CompConstraint::Neq) elseLeaf = &l;
    REQUIRE(elseLeaf);
    CHECK(elseLeaf->dc.size() == 2);
    for (const auto& [sym, set] : elseLeaf->dc) CHECK(set == MinimalSet{Term::nonce(0, 0)});
  }
}

TEST_CASE("receivability and learned keys") {
  Term kb = Term::key("kb"), k2 = Term::key("k2");
  Term x = Term::var("x");
  Term m = Term::enc(Term::tuple({Term::text("a", false), k2}), kb);
  CHECK(isReceivable(Term::enc(x, kb), m, {kb}));
  CHECK_FALSE(isReceivable(Term::enc(Term::tuple({x, Term::var("y")}), kb), m, {}));
  CHECK(isReceivable(Term::enc(x, Term::var("k")), m, {}));
  CHECK(addKeys(m, {kb}) == MinimalSet{kb, k2});
  CHECK(addKeys(m, {}) == MinimalSet{});
}

TEST_CASE("reduction preserves the visible traces") {
  Configuration c = start(kNs, "lowe");
  EnumerateOptions full;
  full.reduce = false;
  EnumerateResult a = enumerateTraces(c, solver);
  EnumerateResult b = enumerateTraces(c, solver, full);
  auto labels = [](const EnumerateResult& r) {
    std::set<std::string> out;
    for (const auto& leaf : r.leaves) {
      std::string s;
      for (const auto& l : leaf.labels) s += (l.kind == Label::Send ? "+" : "-") + l.term.render();
      out.insert(s);
    }
    return out;
  };
  CHECK(labels(a) == labels(b));
  CHECK(a.states < b.states);
}
