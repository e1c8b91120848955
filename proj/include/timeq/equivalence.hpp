#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "timeq/comparison.hpp"
#include "timeq/derivability.hpp"
#include "timeq/semantics.hpp"
#include "timeq/terms.hpp"
#include "timeq/timecon.hpp"

namespace timeq {

struct ObsLabel {
  bool send = true;
  Term term;
  std::string at;
};

struct Observable {
  std::string startClock;
  std::vector<ObsLabel> labels;
  MinimalSet ik;
  DerivSet dc;
  CompSet eq;
  TimeSet tc;

  std::string signature() const;  // length and signs, e.g. "+-+"
  std::string key() const;        // canonical rendering
};

Observable observableOf(const Configuration& leaf);
// Distinct observables of the maximal traces from c.
std::vector<Observable> observablesOf(const EnumerateResult& r);

// Shifts symbol serials and nonce owners by `offset` and primes every time
// variable outside `rigid`, making the observable disjoint from unshifted ones.
Observable renameApart(const Observable& o, std::uint32_t offset,
                       const std::set<std::string>& rigid);

// Nonces and ciphertexts whose decryption key is not derivable from ik.
TermSet blackBoxSet(const Observable& o);
Term restrictToBB(const Term& t, const TermSet& bb);
// The bijection induced by positional traversal of the restricted labels.
std::optional<std::vector<std::pair<Term, Term>>> findBijection(const Observable& o,
                                                                const Observable& o2);
// Replaces the paired black boxes by shared fresh nonces, owned by `owner`.
std::pair<Observable, Observable> identifyBlackBoxes(
    const Observable& o, const Observable& o2, const std::vector<std::pair<Term, Term>>& bij,
    std::uint32_t owner);

bool symDer(const Term& sym2, const Term& m, const DerivSet& dc, const DerivSet& dc2);
// Matcher from symbols of m2 to subterms of m, every binding passing symDer.
std::optional<Subst> termApprox(const Term& m, const Term& m2, const DerivSet& dc,
                                const DerivSet& dc2);
bool canEq(const Term& m1, const Term& m2, const DerivSet& dc, const CompSet& eq);
// Approximation of the label terms of o by those of o2, comparison constraints included.
bool termEqApprox(const Term& m, const DerivSet& dc, const CompSet& eq, const Term& m2,
                  const DerivSet& dc2, const CompSet& eq2);
bool termEqApprox(const Observable& o, const Observable& o2);

// 0 when equivalent, otherwise the first failing condition (1..5).
int observableMismatch(const Observable& o, const Observable& o2, const TimeSolver& solver,
                       const std::set<std::string>& rigid);
inline bool observableEquiv(const Observable& o, const Observable& o2, const TimeSolver& solver,
                            const std::set<std::string>& rigid) {
  return observableMismatch(o, o2, solver, rigid) == 0;
}

struct Verdict {
  bool equivalent = false;
  std::size_t leftObservables = 0, rightObservables = 0;
  std::size_t leftStates = 0, rightStates = 0;
  std::optional<nlohmann::json> witness;
  nlohmann::json toJson() const;
};

struct EquivOptions {
  unsigned jobs = 1;
  std::optional<std::size_t> maxSteps;
  bool reduce = true;
};

Verdict configEquiv(const Configuration& left, const Configuration& right,
                    const TimeSolver& solver, const EquivOptions& opts = {});

nlohmann::json toJson(const Observable& o);

}  // namespace timeq
