#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "timeq/terms.hpp"
#include "timeq/timecon.hpp"

namespace timeq {

// In a parsed role, identifiers are Var terms; they are resolved per player.
struct Cmd {
  enum Kind { New, Send, Recv, If } kind = Send;
  std::string var;  // New
  Term term;        // Send, Recv, If lhs
  Term rhs;         // If
  std::optional<TimeConstraint> tc;
  std::vector<Cmd> thenBranch, elseBranch;

  friend bool operator==(const Cmd& a, const Cmd& b);
};

struct Role {
  std::string name;
  std::vector<Cmd> body;
  friend bool operator==(const Role& a, const Role& b) {
    return a.name == b.name && a.body == b.body;
  }
};

struct PlayerSpec {
  std::string name;
  std::string role;
  std::vector<Term> keys;
};

struct Scenario {
  std::string name;
  std::vector<PlayerSpec> players;
  std::vector<Term> knowledge;
  std::set<std::string> publics;
  std::vector<TimeConstraint> params;
};

struct ProtocolFile {
  std::map<std::string, Role> roles;
  std::vector<Scenario> scenarios;
  const Scenario& scenario(const std::string& name) const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int col, const std::string& msg);
  int line, col;
};

ProtocolFile parseProtocol(const std::string& text);
Role parseRole(const std::string& text);  // exactly one role definition
// Checks role references against the file; throws ParseError.
Scenario parseScenario(const std::string& text);

ProtocolFile loadProtocolFile(const std::string& path);
// "file" (exactly one scenario) or "file:scenario".
std::pair<ProtocolFile, Scenario> loadScenario(const std::string& spec);

std::string renderRole(const Role& r);
std::string renderTerm(const Term& t);  // concrete DSL syntax
std::string renderTimeConstraint(const TimeConstraint& c);

// Names of the rigid time parameters of a scenario.
std::set<std::string> paramNames(const Scenario& s);

// Scenario-level constants.
struct ScenarioContext {
  std::set<std::string> players;
  std::set<std::string> keyNames;  // symmetric keys declared anywhere
  std::set<std::string> publics;
  std::set<std::string> params;
};
ScenarioContext contextOf(const ProtocolFile& f, const Scenario& s);

// Resolves a scenario-level term (knowledge, player keys).
Term resolveScenarioTerm(const Term& raw, const ScenarioContext& ctx);

// Resolves a role body for one player: identifiers become variables, keys,
// names or texts; time variables other than cur and params get "<player>." prefixes.
std::vector<Cmd> instantiateRole(const Role& role, const PlayerSpec& player,
                                 const ScenarioContext& ctx);

}  // namespace timeq
