#include "timeq/timecon.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace timeq {

TimeExpr TimeExpr::constant(Rational c) {
  TimeExpr e;
  e.k_ = std::move(c);
  return e;
}

TimeExpr TimeExpr::variable(const std::string& v, Rational c) {
  TimeExpr e;
  if (c != 0) e.coef_[v] = std::move(c);
  return e;
}

Rational TimeExpr::coef(const std::string& v) const {
  auto it = coef_.find(v);
  return it == coef_.end() ? Rational(0) : it->second;
}

std::set<std::string> TimeExpr::vars() const {
  std::set<std::string> out;
  for (const auto& [v, c] : coef_) out.insert(v);
  return out;
}

TimeExpr& TimeExpr::operator+=(const TimeExpr& o) {
  for (const auto& [v, c] : o.coef_) {
    Rational& r = coef_[v];
    r += c;
    if (r == 0) coef_.erase(v);
  }
  k_ += o.k_;
  return *this;
}

TimeExpr& TimeExpr::operator-=(const TimeExpr& o) {
  for (const auto& [v, c] : o.coef_) {
    Rational& r = coef_[v];
    r -= c;
    if (r == 0) coef_.erase(v);
  }
  k_ -= o.k_;
  return *this;
}

TimeExpr& TimeExpr::operator*=(const Rational& r) {
  if (r == 0) {
    coef_.clear();
    k_ = 0;
    return *this;
  }
  for (auto& [v, c] : coef_) c *= r;
  k_ *= r;
  return *this;
}

TimeExpr TimeExpr::substitute(const std::string& v, const TimeExpr& by) const {
  auto it = coef_.find(v);
  if (it == coef_.end()) return *this;
  TimeExpr out = *this;
  Rational c = it->second;
  out.coef_.erase(v);
  out += by * c;
  return out;
}

TimeExpr TimeExpr::rename(const std::map<std::string, std::string>& m) const {
  TimeExpr out = TimeExpr::constant(k_);
  for (const auto& [v, c] : coef_) {
    auto it = m.find(v);
    out += variable(it == m.end() ? v : it->second, c);
  }
  return out;
}

Rational TimeExpr::eval(const std::map<std::string, Rational>& model) const {
  Rational out = k_;
  for (const auto& [v, c] : coef_) {
    auto it = model.find(v);
    if (it != model.end()) out += c * it->second;
  }
  return out;
}

std::string TimeExpr::render() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, c] : coef_) {
    if (c < 0)
      os << (first ? "-" : " - ");
    else if (!first)
      os << " + ";
    Rational a = abs(c);
    if (a != 1) os << a << "*";
    os << v;
    first = false;
  }
  if (first)
    os << k_;
  else if (k_ > 0)
    os << " + " << k_;
  else if (k_ < 0)
    os << " - " << Rational(-k_);
  return os.str();
}

std::string relSymbol(Rel r) {
  switch (r) {
    case Rel::Eq: return "=";
    case Rel::Ge: return ">=";
    case Rel::Gt: return ">";
    case Rel::Lt: return "<";
    case Rel::Le: return "<=";
  }
  return "?";
}

std::set<std::string> TimeConstraint::vars() const {
  auto out = lhs.vars();
  auto r = rhs.vars();
  out.insert(r.begin(), r.end());
  return out;
}

TimeConstraint TimeConstraint::substitute(const std::string& v, const TimeExpr& by) const {
  return {lhs.substitute(v, by), rel, rhs.substitute(v, by)};
}

TimeConstraint TimeConstraint::rename(const std::map<std::string, std::string>& m) const {
  return {lhs.rename(m), rel, rhs.rename(m)};
}

bool TimeConstraint::holds(const std::map<std::string, Rational>& model) const {
  Rational a = lhs.eval(model), b = rhs.eval(model);
  switch (rel) {
    case Rel::Eq: return a == b;
    case Rel::Ge: return a >= b;
    case Rel::Gt: return a > b;
    case Rel::Lt: return a < b;
    case Rel::Le: return a <= b;
  }
  return false;
}

std::string TimeConstraint::render() const {
  return lhs.render() + " " + relSymbol(rel) + " " + rhs.render();
}

std::set<std::string> TimeSet::vars() const {
  std::set<std::string> out = clocks;
  for (const auto& c : constraints) {
    auto v = c.vars();
    out.insert(v.begin(), v.end());
  }
  return out;
}

TimeSet TimeSet::rename(const std::map<std::string, std::string>& m) const {
  TimeSet out;
  for (const auto& c : constraints) out.constraints.push_back(c.rename(m));
  for (const auto& v : clocks) {
    auto it = m.find(v);
    out.clocks.insert(it == m.end() ? v : it->second);
  }
  auto it = m.find(globalClock);
  out.globalClock = it == m.end() ? globalClock : it->second;
  return out;
}

bool operator<(const Atom& a, const Atom& b) {
  if (a.op != b.op) return a.op < b.op;
  const auto& ca = a.e.coefs();
  const auto& cb = b.e.coefs();
  if (ca.size() != cb.size()) return ca.size() < cb.size();
  for (auto i = ca.begin(), j = cb.begin(); i != ca.end(); ++i, ++j) {
    if (i->first != j->first) return i->first < j->first;
    if (i->second != j->second) return i->second < j->second;
  }
  return a.e.constantTerm() < b.e.constantTerm();
}

Atom toAtom(const TimeConstraint& c) {
  TimeExpr d = c.lhs - c.rhs;
  switch (c.rel) {
    case Rel::Eq: return {Atom::EQ, d};
    case Rel::Ge: return {Atom::GE, d};
    case Rel::Gt: return {Atom::GT, d};
    case Rel::Le: return {Atom::GE, d * Rational(-1)};
    case Rel::Lt: return {Atom::GT, d * Rational(-1)};
  }
  return {};
}

TimeConstraint fromAtom(const Atom& a) {
  Rel r = a.op == Atom::EQ ? Rel::Eq : a.op == Atom::GE ? Rel::Ge : Rel::Gt;
  return {a.e, r, TimeExpr()};
}

std::vector<Atom> toAtoms(const TimeSet& ts) {
  std::vector<Atom> out;
  for (const auto& c : ts.constraints) out.push_back(toAtom(c));
  for (const auto& v : ts.clocks) out.push_back({Atom::GE, TimeExpr::variable(v)});
  return out;
}

namespace {

// Scales so the first coefficient is +-1 (inequalities keep their direction).
Atom canonical(Atom a) {
  if (a.e.isConstant()) return a;
  Rational lead = a.e.coefs().begin()->second;
  Rational s = a.op == Atom::EQ ? Rational(1 / lead) : Rational(1 / abs(lead));
  a.e *= s;
  return a;
}

// 1 = true, 0 = false, -1 = not constant.
int constantTruth(const Atom& a) {
  if (!a.e.isConstant()) return -1;
  const Rational& k = a.e.constantTerm();
  switch (a.op) {
    case Atom::EQ: return k == 0;
    case Atom::GE: return k >= 0;
    case Atom::GT: return k > 0;
  }
  return 0;
}

struct Step {
  std::string var;
  bool byEq = false;
  TimeExpr value;  // when byEq
  std::vector<Atom> lower, upper;
};

class System {
 public:
  // Returns false when a constant contradiction appears.
  bool add(const Atom& raw) {
    Atom a = canonical(raw);
    int t = constantTruth(a);
    if (t == 1) return true;
    if (t == 0) return false;
    if (a.op == Atom::EQ) {
      eqs_.insert(a);
      return true;
    }
    // Keep only the tightest bound per direction.
    TimeExpr dir = a.e - TimeExpr::constant(a.e.constantTerm());
    Key k{dir};
    auto it = ineq_.find(k);
    if (it == ineq_.end()) {
      ineq_.emplace(k, a);
      return true;
    }
    const Atom& b = it->second;
    const Rational& ka = a.e.constantTerm();
    const Rational& kb = b.e.constantTerm();
    if (ka < kb || (ka == kb && a.op == Atom::GT)) it->second = a;
    // Opposite bounds with the same direction are checked by elimination.
    return true;
  }

  std::vector<Atom> atoms() const {
    std::vector<Atom> out(eqs_.begin(), eqs_.end());
    for (const auto& [k, a] : ineq_) out.push_back(a);
    return out;
  }

  std::set<std::string> vars() const {
    std::set<std::string> out;
    for (const Atom& a : atoms())
      for (const auto& [v, c] : a.e.coefs()) out.insert(v);
    return out;
  }

 private:
  struct Key {
    TimeExpr dir;
    bool operator<(const Key& o) const {
      return Atom{Atom::GE, dir} < Atom{Atom::GE, o.dir};
    }
  };
  std::set<Atom> eqs_;
  std::map<Key, Atom> ineq_;
};

// Eliminates the variables in `which` (all when null). Returns nullopt on contradiction.
std::optional<std::vector<Atom>> eliminate(const std::vector<Atom>& input,
                                           const std::set<std::string>* which,
                                           std::vector<Step>* steps) {
  System sys;
  for (const Atom& a : input)
    if (!sys.add(a)) return std::nullopt;
  for (;;) {
    std::vector<Atom> atoms = sys.atoms();
    std::set<std::string> cand;
    for (const auto& v : sys.vars())
      if (!which || which->count(v)) cand.insert(v);
    if (cand.empty()) return atoms;

    // Prefer an equality, otherwise the variable with the fewest new combinations.
    std::string pick;
    const Atom* eq = nullptr;
    for (const Atom& a : atoms) {
      if (a.op != Atom::EQ) continue;
      for (const auto& [v, c] : a.e.coefs())
        if (cand.count(v)) {
          pick = v;
          eq = &a;
          break;
        }
      if (eq) break;
    }
    if (!eq) {
      long best = -1;
      for (const auto& v : cand) {
        long lo = 0, hi = 0;
        for (const Atom& a : atoms) {
          int s = sgn(a.e.coef(v));
          lo += s > 0;
          hi += s < 0;
        }
        long cost = lo * hi - lo - hi;
        if (pick.empty() || cost < best) {
          best = cost;
          pick = v;
        }
      }
    }

    System next;
    Step step;
    step.var = pick;
    if (eq) {
      Rational c = eq->e.coef(pick);
      TimeExpr rest = eq->e - TimeExpr::variable(pick, c);
      TimeExpr value = rest * Rational(-1 / c);
      step.byEq = true;
      step.value = value;
      for (const Atom& a : atoms) {
        if (&a == eq) continue;
        if (!next.add({a.op, a.e.substitute(pick, value)})) return std::nullopt;
      }
    } else {
      for (const Atom& a : atoms) {
        int s = sgn(a.e.coef(pick));
        if (s > 0)
          step.lower.push_back(a);
        else if (s < 0)
          step.upper.push_back(a);
        else if (!next.add(a))
          return std::nullopt;
      }
      for (const Atom& l : step.lower)
        for (const Atom& u : step.upper) {
          Rational cl = l.e.coef(pick), cu = -u.e.coef(pick);
          Atom comb{(l.op == Atom::GT || u.op == Atom::GT) ? Atom::GT : Atom::GE,
                    l.e * cu + u.e * cl};
          if (!next.add(comb)) return std::nullopt;
        }
    }
    if (steps) steps->push_back(std::move(step));
    sys = std::move(next);
  }
}

Model buildModel(const std::vector<Step>& steps) {
  Model m;
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    const Step& s = *it;
    if (s.byEq) {
      m[s.var] = s.value.eval(m);
      continue;
    }
    std::optional<Rational> lo, hi;
    bool loStrict = false, hiStrict = false;
    for (const Atom& a : s.lower) {
      Rational c = a.e.coef(s.var);
      Rational rest = (a.e - TimeExpr::variable(s.var, c)).eval(m);
      Rational b = -rest / c;
      bool strict = a.op == Atom::GT;
      if (!lo || b > *lo || (b == *lo && strict)) {
        lo = b;
        loStrict = strict;
      }
    }
    for (const Atom& a : s.upper) {
      Rational c = a.e.coef(s.var);
      Rational rest = (a.e - TimeExpr::variable(s.var, c)).eval(m);
      Rational b = rest / -c;
      bool strict = a.op == Atom::GT;
      if (!hi || b < *hi || (b == *hi && strict)) {
        hi = b;
        hiStrict = strict;
      }
    }
    Rational v = 0;
    if (lo && hi) {
      if (!loStrict)
        v = *lo;
      else if (!hiStrict)
        v = *hi;
      else
        v = (*lo + *hi) / 2;
    } else if (lo) {
      v = loStrict ? Rational(*lo + 1) : *lo;
    } else if (hi) {
      v = hiStrict ? Rational(*hi - 1) : *hi;
    }
    v.canonicalize();
    m[s.var] = v;
  }
  return m;
}

std::vector<Atom> negate(const Atom& a) {
  TimeExpr neg = a.e * Rational(-1);
  switch (a.op) {
    case Atom::GE: return {{Atom::GT, neg}};
    case Atom::GT: return {{Atom::GE, neg}};
    case Atom::EQ: return {{Atom::GT, a.e}, {Atom::GT, neg}};
  }
  return {};
}

}  // namespace

SatResult satisfiable(const std::vector<Atom>& atoms) {
  std::vector<Step> steps;
  auto res = eliminate(atoms, nullptr, &steps);
  if (!res) return {false, {}};
  // Everything eliminated; leftover atoms are constant truths.
  SatResult out{true, buildModel(steps)};
  for (const Atom& a : atoms)
    for (const auto& [v, c] : a.e.coefs()) out.model.try_emplace(v, 0);
  return out;
}

SatResult isSatisfiable(const TimeSet& tc) { return satisfiable(toAtoms(tc)); }

std::optional<std::vector<Atom>> project(const std::vector<Atom>& atoms,
                                         const std::set<std::string>& which) {
  return eliminate(atoms, &which, nullptr);
}

std::vector<TimeSet> eliminateForall(const TimeSet& body, const std::set<std::string>& which) {
  auto res = project(toAtoms(body), which);
  if (!res) return {};
  TimeSet out;
  for (const Atom& a : *res) out.constraints.push_back(fromAtom(a));
  for (const auto& c : body.clocks)
    if (!which.count(c)) out.clocks.insert(c);
  out.globalClock = which.count(body.globalClock) ? std::string() : body.globalClock;
  return {out};
}

namespace {

std::vector<Atom> matchBody(const TimeSet& r, const ClockPairs& pairs) {
  std::vector<Atom> body = toAtoms(r);
  for (const auto& [a, b] : pairs)
    body.push_back({Atom::EQ, TimeExpr::variable(a) - TimeExpr::variable(b)});
  return body;
}

std::set<std::string> innerVars(const TimeSet& l, const TimeSet& r, const ClockPairs& pairs,
                                const std::set<std::string>& rigid) {
  std::set<std::string> outer = l.vars();
  for (const auto& [a, b] : pairs) outer.insert(a);
  outer.insert(rigid.begin(), rigid.end());
  std::set<std::string> inner;
  for (const auto& v : r.vars())
    if (!outer.count(v)) inner.insert(v);
  for (const auto& [a, b] : pairs)
    if (!outer.count(b)) inner.insert(b);
  return inner;
}

}  // namespace

bool checkTimedMatch(const TimeSet& l, const TimeSet& r, const ClockPairs& pairs,
                     const std::set<std::string>& rigid) {
  std::vector<Atom> left = toAtoms(l);
  auto p = project(matchBody(r, pairs), innerVars(l, r, pairs, rigid));
  if (!p) return !satisfiable(left).sat;
  for (const Atom& a : *p)
    for (const Atom& n : negate(a)) {
      std::vector<Atom> q = left;
      q.push_back(n);
      if (satisfiable(q).sat) return false;
    }
  return true;
}

namespace {

std::string smtName(const std::string& v) { return "|" + v + "|"; }

std::string smtRational(const Rational& r) {
  Rational a = abs(r);
  std::string body = a.get_den() == 1 ? a.get_num().get_str() + ".0"
                                      : "(/ " + a.get_num().get_str() + ".0 " +
                                            a.get_den().get_str() + ".0)";
  return r < 0 ? "(- " + body + ")" : body;
}

std::string smtExpr(const TimeExpr& e) {
  std::vector<std::string> parts;
  for (const auto& [v, c] : e.coefs())
    parts.push_back(c == 1 ? smtName(v) : "(* " + smtRational(c) + " " + smtName(v) + ")");
  if (e.constantTerm() != 0 || parts.empty()) parts.push_back(smtRational(e.constantTerm()));
  if (parts.size() == 1) return parts[0];
  std::string out = "(+";
  for (const auto& p : parts) out += " " + p;
  return out + ")";
}

std::string smtAtom(const Atom& a) {
  const char* op = a.op == Atom::EQ ? "=" : a.op == Atom::GE ? ">=" : ">";
  return std::string("(") + op + " " + smtExpr(a.e) + " 0.0)";
}

std::string smtConj(const std::vector<Atom>& atoms) {
  if (atoms.empty()) return "true";
  if (atoms.size() == 1) return smtAtom(atoms[0]);
  std::string out = "(and";
  for (const Atom& a : atoms) out += " " + smtAtom(a);
  return out + ")";
}

}  // namespace

std::string smtSatScript(const TimeSet& tc) {
  std::ostringstream os;
  os << "(set-logic LRA)\n";
  for (const auto& v : tc.vars()) os << "(declare-const " << smtName(v) << " Real)\n";
  for (const Atom& a : toAtoms(tc)) os << "(assert " << smtAtom(a) << ")\n";
  os << "(check-sat)\n(exit)\n";
  return os.str();
}

std::string smtTimedMatchScript(const TimeSet& l, const TimeSet& r, const ClockPairs& pairs,
                                const std::set<std::string>& rigid) {
  std::set<std::string> inner = innerVars(l, r, pairs, rigid);
  std::set<std::string> outer = l.vars();
  for (const auto& [a, b] : pairs) outer.insert(a);
  for (const auto& v : r.vars())
    if (!inner.count(v)) outer.insert(v);
  std::vector<Atom> rAtoms = toAtoms(r);
  std::vector<Atom> eqs;
  for (const auto& [a, b] : pairs)
    eqs.push_back({Atom::EQ, TimeExpr::variable(a) - TimeExpr::variable(b)});

  std::ostringstream os;
  os << "(set-logic LRA)\n";
  for (const auto& v : outer) os << "(declare-const " << smtName(v) << " Real)\n";
  for (const Atom& a : toAtoms(l)) os << "(assert " << smtAtom(a) << ")\n";
  std::string negEq = "(not " + smtConj(eqs) + ")";
  std::string impl = "(=> " + smtConj(rAtoms) + " " + negEq + ")";
  if (inner.empty()) {
    os << "(assert " << impl << ")\n";
  } else {
    os << "(assert (forall (";
    bool first = true;
    for (const auto& v : inner) {
      os << (first ? "" : " ") << "(" << smtName(v) << " Real)";
      first = false;
    }
    os << ") " << impl << "))\n";
  }
  os << "(check-sat)\n(exit)\n";
  return os.str();
}

bool InternalSolver::sat(const TimeSet& tc) const { return isSatisfiable(tc).sat; }

bool InternalSolver::timedMatch(const TimeSet& l, const TimeSet& r, const ClockPairs& pairs,
                                const std::set<std::string>& rigid) const {
  return checkTimedMatch(l, r, pairs, rigid);
}

bool ExternalSolver::run(const std::string& script) const {
  BridgeResult res = smtBridgeCheck(script, command_, timeout_);
  if (res.status == BridgeResult::Sat) return true;
  if (res.status == BridgeResult::Unsat) return false;
  throw std::runtime_error("external solver: " + statusName(res.status) +
                           (res.detail.empty() ? "" : " (" + res.detail + ")"));
}

bool ExternalSolver::sat(const TimeSet& tc) const { return run(smtSatScript(tc)); }

bool ExternalSolver::timedMatch(const TimeSet& l, const TimeSet& r, const ClockPairs& pairs,
                                const std::set<std::string>& rigid) const {
  return !run(smtTimedMatchScript(l, r, pairs, rigid));
}

}  // namespace timeq
