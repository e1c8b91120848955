#pragma once

#include <set>
#include <string>

#include "timeq/derivability.hpp"
#include "timeq/terms.hpp"

namespace timeq {

struct CompConstraint {
  enum Kind { Eq, Neq } kind = Eq;
  Term lhs, rhs;

  static CompConstraint eq(Term a, Term b) { return {Eq, std::move(a), std::move(b)}; }
  static CompConstraint neq(Term a, Term b) { return {Neq, std::move(a), std::move(b)}; }
  std::string render() const;

  friend bool operator==(const CompConstraint& a, const CompConstraint& b) {
    return a.kind == b.kind && a.lhs == b.lhs && a.rhs == b.rhs;
  }
  friend bool operator<(const CompConstraint& a, const CompConstraint& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (int c = compare(a.lhs, b.lhs)) return c < 0;
    return compare(a.rhs, b.rhs) < 0;
  }
};

using CompSet = std::set<CompConstraint>;

CompSet apply(const Subst& s, const CompSet& eq);
std::string render(const CompSet& eq);

struct EqCheckResult {
  bool sat = false;
  Subst witness;  // symbol substitution solving the equalities
  DerivSet dc;    // constraints refined by the witness
};

EqCheckResult eqCheck(const CompSet& eq, const DerivSet& dc);

// m ground: m is an instance of t under dc whose matcher respects eq.
bool inRestrictedDenotation(const DerivSet& dc, const CompSet& eq, const Term& t, const Term& m);

}  // namespace timeq
