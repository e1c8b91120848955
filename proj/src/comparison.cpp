#include "timeq/comparison.hpp"

#include "timeq/intruder.hpp"

namespace timeq {

std::string CompConstraint::render() const {
  return std::string(kind == Eq ? "Eq(" : "Neq(") + lhs.render() + "," + rhs.render() + ")";
}

CompSet apply(const Subst& s, const CompSet& eq) {
  if (s.empty()) return eq;
  CompSet out;
  for (const auto& c : eq) out.insert({c.kind, timeq::apply(s, c.lhs), timeq::apply(s, c.rhs)});
  return out;
}

std::string render(const CompSet& eq) {
  std::string out = "{ ";
  bool first = true;
  for (const auto& c : eq) {
    if (!first) out += ", ";
    out += c.render();
    first = false;
  }
  return out + (first ? "}" : " }");
}

EqCheckResult eqCheck(const CompSet& eq, const DerivSet& dc) {
  std::vector<std::pair<Term, Term>> pairs;
  for (const auto& c : eq)
    if (c.kind == CompConstraint::Eq) pairs.emplace_back(c.lhs, c.rhs);
  auto mgu = unify(pairs, false);
  if (!mgu) return {};
  auto violates = [&](const Subst& s) {
    for (const auto& c : eq)
      if (c.kind == CompConstraint::Neq && timeq::apply(s, c.lhs) == timeq::apply(s, c.rhs))
        return true;
    return false;
  };
  if (violates(*mgu)) return {};
  for (const GenSolution& sol : checkSubst(*mgu, GenSolution{{}, dc}))
    if (!violates(sol.ssb)) return {true, sol.ssb, sol.dc};
  return {};
}

bool inRestrictedDenotation(const DerivSet& dc, const CompSet& eq, const Term& t, const Term& m) {
  auto theta = match(t, m);
  if (!theta) return false;
  for (const auto& [sym, v] : *theta)
    if (!derives(dc, sym, v)) return false;
  DerivSet rest;
  for (const auto& [sym, set] : dc)
    if (!theta->count(sym)) rest.emplace(sym, set);
  return eqCheck(timeq::apply(*theta, eq), timeq::apply(*theta, rest)).sat;
}

}  // namespace timeq
