#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "timeq/comparison.hpp"
#include "timeq/derivability.hpp"
#include "timeq/protocol.hpp"
#include "timeq/terms.hpp"
#include "timeq/timecon.hpp"

namespace timeq {

struct PlayerState {
  std::string name;
  std::uint32_t index = 0;
  std::vector<Cmd> program;
  MinimalSet keys;
  std::uint32_t nonces = 0;  // nonces created so far
};

struct Label {
  enum Kind { Silent, Send, Recv } kind = Silent;
  Term term;
  std::string at;  // clock of the step
  std::uint32_t player = 0;
};

struct Configuration {
  std::vector<PlayerState> players;
  MinimalSet ik;
  DerivSet dc;
  CompSet eq;
  TimeSet tc;
  std::string clock;          // current global time variable
  std::string startClock;     // clock of the initial configuration
  std::vector<Label> labels;  // visible labels so far, symbol substitutions applied
  std::uint32_t nextSym = 1;
  std::uint32_t nextClock = 1;
  std::set<std::string> params;

  bool quiescent() const;
};

// One rewrite step. ssb is the symbol substitution applied configuration-wide.
struct Step {
  Label label;
  Subst ssb;
  std::uint32_t player = 0;
};

// Initial configuration of a scenario; the clock is "tG0".
Configuration initialConfiguration(const ProtocolFile& f, const Scenario& s);

std::vector<Cmd> apply(const Subst& s, const std::vector<Cmd>& cmds);

// Can the receiver open m (an instance of pattern) with ks? Positions where the
// pattern has a variable or symbolic key are accepted as opaque.
bool isReceivable(const Term& pattern, const Term& m, const MinimalSet& ks);
// ks extended with the keys readable in m.
MinimalSet addKeys(const Term& m, const MinimalSet& ks);

// A silent step that commutes with every other player's steps: New, or an If
// binding no variables, with a time constraint that does not mention cur.
bool independentSilent(const Cmd& head);

// Successors of c in player order. With `reduce`, the first player whose head
// is independentSilent moves alone; otherwise every enabled player moves.
std::vector<std::pair<Configuration, Step>> successors(const Configuration& c,
                                                       const TimeSolver& solver,
                                                       bool reduce = true);

struct EnumerateOptions {
  std::optional<std::size_t> maxSteps;  // bound on expanded configurations
  bool reduce = true;                   // see successors()
  std::function<void(const Configuration& from, const Configuration& to, const Step&)> onStep;
};

struct EnumerateResult {
  std::vector<Configuration> leaves;  // final configurations of maximal traces
  std::size_t states = 0;             // configurations in the search tree
  bool truncated = false;
};

EnumerateResult enumerateTraces(const Configuration& c0, const TimeSolver& solver,
                                const EnumerateOptions& opts = {});

std::string render(const Label& l);
nlohmann::json toJson(const Configuration& c);

}  // namespace timeq
