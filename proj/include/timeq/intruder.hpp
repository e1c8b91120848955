#pragma once

#include <cstdint>
#include <vector>

#include "timeq/derivability.hpp"
#include "timeq/terms.hpp"

namespace timeq {

struct GenSolution {
  Subst ssb;    // resolved symbols
  DerivSet dc;  // refined constraints
  friend bool operator==(const GenSolution& a, const GenSolution& b) {
    return a.ssb == b.ssb && a.dc == b.dc;
  }
  friend bool operator<(const GenSolution& a, const GenSolution& b) {
    if (a.ssb != b.ssb) return a.ssb < b.ssb;
    return a.dc < b.dc;
  }
};

struct GenResult {
  Subst sb;  // variables of the target -> fresh symbols
  std::vector<GenSolution> solutions;
};

// Issues fresh symbol serials.
struct SymbolSupply {
  std::uint32_t next = 1;
  Term fresh() { return Term::sym(next++); }
};

// Solutions for generating m from ik in the context st.
std::vector<GenSolution> generate(const Term& m, const MinimalSet& ik, const GenSolution& st);

std::vector<GenSolution> checkSubst(const Subst& candidate, const GenSolution& st);
std::vector<GenSolution> checkSubst(const Subst& candidate, const Subst& ambient,
                                    const DerivSet& dc);
std::vector<GenSolution> checkBnd(const Term& sym, const Term& m, const GenSolution& st);

GenResult sGen(const Term& target, const MinimalSet& ik, const DerivSet& dc,
               SymbolSupply& fresh);

// Matching lhs := rhs; unbound variables on either side become fresh symbols.
GenResult sGenMatch(const Term& lhs, const Term& rhs, const MinimalSet& ik, const DerivSet& dc,
                    SymbolSupply& fresh);

}  // namespace timeq
