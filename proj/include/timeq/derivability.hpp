#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "timeq/terms.hpp"

namespace timeq {

// A minimal knowledge set: no tuples, no guessables; enc(m,k) with a derivable
// decryption key has m alongside and stays only while k is not derivable.
using MinimalSet = TermSet;

// Derivability constraints dc(sym, S), keyed by symbol.
using DerivSet = std::map<Term, MinimalSet>;

// True iff t can be built from s by tupling and encryption alone.
bool composable(const TermSet& s, const Term& t);

MinimalSet normalize(TermSet s);
MinimalSet normalizeUnion(const MinimalSet& a, const MinimalSet& b);
bool isMinimal(const TermSet& s);

// Adjacency s1 -> {s2 : dc(s2) mentions s1}.
using SymGraph = std::map<Term, TermSet>;
SymGraph dependencyGraph(const DerivSet& dc);
bool isAcyclic(const DerivSet& dc);
std::optional<std::vector<Term>> topologicalSort(const DerivSet& dc);

// m is derivable from the minimal set s, symbols resolved through dc.
bool derivesFrom(const DerivSet& dc, const MinimalSet& s, const Term& m);
bool derives(const DerivSet& dc, const Term& sym, const Term& m);
// Every element of a is derivable from b.
bool subsumedBy(const DerivSet& dc, const MinimalSet& a, const MinimalSet& b);

// Best representation of the terms derivable from both a and b.
MinimalSet intersectKnowledge(const DerivSet& dc, const MinimalSet& a, const MinimalSet& b);

// Applies s to every set of dc and renormalizes; domain symbols are dropped.
DerivSet apply(const Subst& s, const DerivSet& dc);

struct SampleBounds {
  std::uint32_t depth = 3;  // maximal term height of a sampled instance
  std::uint32_t width = 3;  // maximal tuple width
};

// Bounded slice of the denotation of t. Guessables come from `alphabet`.
// Throws std::invalid_argument when dc is cyclic.
TermSet denotationSample(const DerivSet& dc, const Term& t, SampleBounds bounds,
                         const TermSet& alphabet);

std::string renderConstraint(const Term& sym, const MinimalSet& s);
std::string render(const DerivSet& dc);

}  // namespace timeq
