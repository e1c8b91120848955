#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace timeq {

using Rational = mpq_class;

// Linear combination sum(coef[v] * v) + constant; zero coefficients are never stored.
class TimeExpr {
 public:
  TimeExpr() = default;
  static TimeExpr constant(Rational c);
  static TimeExpr variable(const std::string& v, Rational c = 1);

  const std::map<std::string, Rational>& coefs() const { return coef_; }
  const Rational& constantTerm() const { return k_; }
  Rational coef(const std::string& v) const;
  bool isConstant() const { return coef_.empty(); }
  std::set<std::string> vars() const;

  TimeExpr& operator+=(const TimeExpr& o);
  TimeExpr& operator-=(const TimeExpr& o);
  TimeExpr& operator*=(const Rational& r);
  friend TimeExpr operator+(TimeExpr a, const TimeExpr& b) { return a += b; }
  friend TimeExpr operator-(TimeExpr a, const TimeExpr& b) { return a -= b; }
  friend TimeExpr operator*(TimeExpr a, const Rational& r) { return a *= r; }

  TimeExpr substitute(const std::string& v, const TimeExpr& by) const;
  TimeExpr rename(const std::map<std::string, std::string>& m) const;
  Rational eval(const std::map<std::string, Rational>& model) const;
  std::string render() const;

  friend bool operator==(const TimeExpr& a, const TimeExpr& b) {
    return a.k_ == b.k_ && a.coef_ == b.coef_;
  }

 private:
  std::map<std::string, Rational> coef_;
  Rational k_ = 0;
};

enum class Rel { Eq, Ge, Gt, Lt, Le };
std::string relSymbol(Rel r);

struct TimeConstraint {
  TimeExpr lhs;
  Rel rel = Rel::Eq;
  TimeExpr rhs;

  std::set<std::string> vars() const;
  TimeConstraint substitute(const std::string& v, const TimeExpr& by) const;
  TimeConstraint rename(const std::map<std::string, std::string>& m) const;
  bool holds(const std::map<std::string, Rational>& model) const;
  std::string render() const;
};

// Clock variables get an implicit lower bound of zero.
struct TimeSet {
  std::vector<TimeConstraint> constraints;
  std::set<std::string> clocks;
  std::string globalClock;

  std::set<std::string> vars() const;
  TimeSet rename(const std::map<std::string, std::string>& m) const;
};

using Model = std::map<std::string, Rational>;

struct SatResult {
  bool sat = false;
  Model model;
};

// Normalized atom: expr op 0.
struct Atom {
  enum Op { EQ, GE, GT } op = GE;
  TimeExpr e;
  friend bool operator<(const Atom& a, const Atom& b);
  friend bool operator==(const Atom& a, const Atom& b) { return a.op == b.op && a.e == b.e; }
};

std::vector<Atom> toAtoms(const TimeSet& ts);
Atom toAtom(const TimeConstraint& c);
TimeConstraint fromAtom(const Atom& a);

SatResult isSatisfiable(const TimeSet& tc);
SatResult satisfiable(const std::vector<Atom>& atoms);

// Fourier-Motzkin projection. Returns the disjuncts of an equivalent formula;
// an empty vector means the body is unsatisfiable.
std::vector<TimeSet> eliminateForall(const TimeSet& body, const std::set<std::string>& eliminate);
std::optional<std::vector<Atom>> project(const std::vector<Atom>& atoms,
                                         const std::set<std::string>& eliminate);

using ClockPairs = std::vector<std::pair<std::string, std::string>>;

// forall vars(l). l => exists vars(r)\shared. r and all pairs equal.
// Variables in `rigid` or shared by both sides are not eliminated.
bool checkTimedMatch(const TimeSet& l, const TimeSet& r, const ClockPairs& pairs,
                     const std::set<std::string>& rigid = {});

// SMT-LIB2 rendering.
std::string smtSatScript(const TimeSet& tc);
std::string smtTimedMatchScript(const TimeSet& l, const TimeSet& r, const ClockPairs& pairs,
                                const std::set<std::string>& rigid = {});

struct BridgeResult {
  enum Status { Sat, Unsat, Unknown, SpawnError, MalformedReply, Timeout } status = Unknown;
  std::string detail;
};
std::string statusName(BridgeResult::Status s);

// Runs `command` (split on whitespace, resolved through PATH), writes the
// script to its standard input and reads the first status token.
BridgeResult smtBridgeCheck(const std::string& script, const std::string& command,
                            double timeoutSeconds = 30.0);

class TimeSolver {
 public:
  virtual ~TimeSolver() = default;
  virtual bool sat(const TimeSet& tc) const = 0;
  virtual bool timedMatch(const TimeSet& l, const TimeSet& r, const ClockPairs& pairs,
                          const std::set<std::string>& rigid) const = 0;
  virtual std::string name() const = 0;
};

class InternalSolver : public TimeSolver {
 public:
  bool sat(const TimeSet& tc) const override;
  bool timedMatch(const TimeSet& l, const TimeSet& r, const ClockPairs& pairs,
                  const std::set<std::string>& rigid) const override;
  std::string name() const override { return "internal"; }
};

class ExternalSolver : public TimeSolver {
 public:
  explicit ExternalSolver(std::string command, double timeoutSeconds = 30.0)
      : command_(std::move(command)), timeout_(timeoutSeconds) {}
  // Throws std::runtime_error on spawn failure, timeout, malformed or unknown reply.
  bool sat(const TimeSet& tc) const override;
  bool timedMatch(const TimeSet& l, const TimeSet& r, const ClockPairs& pairs,
                  const std::set<std::string>& rigid) const override;
  std::string name() const override { return "external:" + command_; }

 private:
  bool run(const std::string& script) const;
  std::string command_;
  double timeout_;
};

}  // namespace timeq
