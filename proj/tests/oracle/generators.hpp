#pragma once

// Random small instances for the oracle comparisons.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "oracle.hpp"

namespace timeq::oracle {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(g_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(g_); }
  template <class C>
  auto pick(const C& c) {
    auto it = c.begin();
    std::advance(it, below(c.size()));
    return *it;
  }
  std::mt19937_64& engine() { return g_; }

 private:
  std::mt19937_64 g_;
};

struct Vocabulary {
  Ground secrets;     // at most four non-guessable atoms
  Ground guessables;  // alice, pk(alice)
  Ground alphabet() const;
  std::vector<Term> keys() const;
};

Vocabulary randomVocabulary(Rng& r);

// A minimal ground knowledge set: some secrets, maybe a ciphertext it cannot open.
Ground randomKnowledge(Rng& r, const Vocabulary& v);

// Random term over the vocabulary and the given leaves, of height <= depth.
Term randomTerm(Rng& r, const Vocabulary& v, const std::vector<Term>& leaves, unsigned depth);

struct ApproxInstance {
  Term m, m2;
  Constraints dc, dc2;
  Cmps eq, eq2;
  Ground alphabet;
};

// Left symbols are 1..2, right symbols 101..103. With `comparisons`, up to three
// comparison constraints are spread over both sides.
ApproxInstance randomApprox(Rng& r, bool comparisons);

struct SatInstance {
  Constraints dc;
  Cmps eq;
  Ground alphabet;
};
SatInstance randomSat(Rng& r);

struct GenInstance {
  Term target;     // variables x, y and maybe symbol 1
  Ground ik;
  Constraints dc;  // constraint of symbol 1 when present
  Ground alphabet;
};
GenInstance randomGen(Rng& r);

// Protocol text with at most two roles of at most six commands, scenario `s`.
std::string randomProtocol(Rng& r);

}  // namespace timeq::oracle
