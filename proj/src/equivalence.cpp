#include "timeq/equivalence.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <thread>

namespace timeq {

namespace {

constexpr std::uint32_t kRightOffset = 1000000;
constexpr std::uint32_t kSharedOwner = 2000000;

Term mapTerm(const Term& t, const std::function<std::optional<Term>(const Term&)>& f) {
  if (auto r = f(t)) return *r;
  switch (t.kind()) {
    case Kind::Pk:
      return Term::pk(mapTerm(t.arg(0), f));
    case Kind::Sk:
      return Term::sk(mapTerm(t.arg(0), f));
    case Kind::Enc:
      return Term::enc(mapTerm(t.payload(), f), mapTerm(t.encKey(), f));
    case Kind::Tuple: {
      std::vector<Term> out;
      for (const Term& a : t.args()) out.push_back(mapTerm(a, f));
      return Term::tuple(std::move(out));
    }
    default:
      return t;
  }
}

Observable mapObservable(const Observable& o,
                         const std::function<std::optional<Term>(const Term&)>& f) {
  Observable r = o;
  for (auto& l : r.labels) l.term = mapTerm(l.term, f);
  TermSet ik;
  for (const Term& t : o.ik) ik.insert(mapTerm(t, f));
  r.ik = normalize(std::move(ik));
  r.dc.clear();
  for (const auto& [sym, set] : o.dc) {
    TermSet s;
    for (const Term& t : set) s.insert(mapTerm(t, f));
    r.dc[mapTerm(sym, f)] = normalize(std::move(s));
  }
  r.eq.clear();
  for (const auto& c : o.eq) r.eq.insert({c.kind, mapTerm(c.lhs, f), mapTerm(c.rhs, f)});
  return r;
}

Term labelTuple(const Observable& o) {
  if (o.labels.empty()) return Term::star();
  std::vector<Term> ts;
  for (const auto& l : o.labels) ts.push_back(l.term);
  return Term::tuple(std::move(ts));
}

bool containsAny(const Term& t, const TermSet& bb) {
  if (bb.count(t)) return true;
  for (const Term& a : t.args())
    if (containsAny(a, bb)) return true;
  return false;
}

void collectBB(const Term& t, const Observable& o, TermSet& out) {
  if (t.is(Kind::Nonce)) out.insert(t);
  if (t.is(Kind::Enc) && !derivesFrom(o.dc, o.ik, decryptionKey(t.encKey()))) out.insert(t);
  for (const Term& a : t.args()) collectBB(a, o, out);
}

using Bij = std::map<Term, Term>;

bool walk(const Term& a, const Term& b, const TermSet& bb, const TermSet& bb2, Bij& fwd,
          Bij& bwd) {
  const bool ia = bb.count(a) > 0, ib = bb2.count(b) > 0;
  if (ia || ib) {
    if (!ia || !ib) return false;
    auto f = fwd.find(a);
    auto g = bwd.find(b);
    if (f != fwd.end() || g != bwd.end())
      return f != fwd.end() && g != bwd.end() && f->second == b && g->second == a;
    fwd.emplace(a, b);
    bwd.emplace(b, a);
    return true;
  }
  if (a.kind() != b.kind() || a.args().size() != b.args().size()) return false;
  if (a.args().empty()) return a == b;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (!walk(a.arg(i), b.arg(i), bb, bb2, fwd, bwd)) return false;
  return true;
}

bool inSet(const Term& t, const MinimalSet& s) { return s.count(t) > 0; }

}  // namespace

std::string Observable::signature() const {
  std::string s;
  for (const auto& l : labels) s += l.send ? '+' : '-';
  return s;
}

std::string Observable::key() const {
  std::string k = startClock + "|";
  for (const auto& l : labels) k += (l.send ? "+" : "-") + l.term.render() + "@" + l.at + ";";
  k += "|" + render(ik) + "|" + render(dc) + "|" + render(eq) + "|";
  for (const auto& c : tc.constraints) k += c.render() + ";";
  return k;
}

Observable observableOf(const Configuration& c) {
  Observable o;
  o.startClock = c.startClock;
  for (const auto& l : c.labels)
    if (l.kind != Label::Silent) o.labels.push_back({l.kind == Label::Send, l.term, l.at});
  o.ik = c.ik;
  o.dc = c.dc;
  o.eq = c.eq;
  o.tc = c.tc;
  return o;
}

std::vector<Observable> observablesOf(const EnumerateResult& r) {
  std::vector<Observable> out;
  std::set<std::string> seen;
  for (const auto& leaf : r.leaves) {
    Observable o = observableOf(leaf);
    if (seen.insert(o.key()).second) out.push_back(std::move(o));
  }
  return out;
}

Observable renameApart(const Observable& o, std::uint32_t offset,
                       const std::set<std::string>& rigid) {
  Observable r = mapObservable(o, [offset](const Term& t) -> std::optional<Term> {
    if (t.isSym()) return Term::sym(t.serial() + offset);
    if (t.is(Kind::Nonce)) return Term::nonce(t.owner() + offset, t.serial());
    return std::nullopt;
  });
  std::map<std::string, std::string> m;
  std::set<std::string> vars = o.tc.vars();
  vars.insert(o.startClock);
  for (const auto& l : o.labels) vars.insert(l.at);
  for (const auto& v : vars)
    if (!rigid.count(v)) m[v] = v + "'";
  r.tc = o.tc.rename(m);
  auto ren = [&m](const std::string& v) {
    auto it = m.find(v);
    return it == m.end() ? v : it->second;
  };
  r.startClock = ren(o.startClock);
  for (auto& l : r.labels) l.at = ren(l.at);
  return r;
}

TermSet blackBoxSet(const Observable& o) {
  TermSet out;
  for (const auto& l : o.labels) collectBB(l.term, o, out);
  return out;
}

Term restrictToBB(const Term& t, const TermSet& bb) {
  if (bb.count(t)) return t;
  if (!containsAny(t, bb)) return Term::star();
  return mapTerm(t, [&bb](const Term& s) -> std::optional<Term> {
    if (bb.count(s)) return s;
    if (!containsAny(s, bb)) return Term::star();
    return std::nullopt;
  });
}

std::optional<std::vector<std::pair<Term, Term>>> findBijection(const Observable& o,
                                                                const Observable& o2) {
  if (o.labels.size() != o2.labels.size()) return std::nullopt;
  TermSet bb = blackBoxSet(o), bb2 = blackBoxSet(o2);
  Bij fwd, bwd;
  for (std::size_t i = 0; i < o.labels.size(); ++i) {
    Term a = restrictToBB(o.labels[i].term, bb);
    Term b = restrictToBB(o2.labels[i].term, bb2);
    if (!walk(a, b, bb, bb2, fwd, bwd)) return std::nullopt;
  }
  return std::vector<std::pair<Term, Term>>(fwd.begin(), fwd.end());
}

std::pair<Observable, Observable> identifyBlackBoxes(
    const Observable& o, const Observable& o2, const std::vector<std::pair<Term, Term>>& bij,
    std::uint32_t owner) {
  std::map<Term, Term> left, right;
  std::uint32_t i = 0;
  for (const auto& [a, b] : bij) {
    Term n = Term::nonce(owner, i++);
    left.emplace(a, n);
    right.emplace(b, n);
  }
  auto by = [](const std::map<Term, Term>& m) {
    return [&m](const Term& t) -> std::optional<Term> {
      auto it = m.find(t);
      if (it == m.end()) return std::nullopt;
      return it->second;
    };
  };
  return {mapObservable(o, by(left)), mapObservable(o2, by(right))};
}

bool symDer(const Term& sym2, const Term& m, const DerivSet& dc, const DerivSet& dc2) {
  auto it = dc2.find(sym2);
  if (it == dc2.end()) return true;  // unconstrained: any term
  const MinimalSet& s2 = it->second;
  if (isGuessable(m) || inSet(m, s2)) return true;
  switch (m.kind()) {
    case Kind::Enc:
      return symDer(sym2, Term::tuple({m.payload(), m.encKey()}), dc, dc2);
    case Kind::Tuple:
      for (const Term& a : m.args())
        if (!symDer(sym2, a, dc, dc2)) return false;
      return true;
    case Kind::Sym: {
      auto jt = dc.find(m);
      if (jt == dc.end()) return false;
      for (const Term& e : jt->second)
        if (!symDer(sym2, e, dc, dc2)) return false;
      return true;
    }
    default:
      return false;  // keys, nonces and texts must be in the set
  }
}

std::optional<Subst> termApprox(const Term& m, const Term& m2, const DerivSet& dc,
                                const DerivSet& dc2) {
  auto theta = match(m2, m);
  if (!theta) return std::nullopt;
  for (const auto& [s2, t] : *theta)
    if (!symDer(s2, t, dc, dc2)) return std::nullopt;
  return theta;
}

bool canEq(const Term& m1, const Term& m2, const DerivSet& dc, const CompSet& eq) {
  CompSet all = eq;
  all.insert(CompConstraint::eq(m1, m2));
  return eqCheck(all, dc).sat;
}

bool termEqApprox(const Term& m, const DerivSet& dc, const CompSet& eq, const Term& m2,
                  const DerivSet& dc2, const CompSet& eq2) {
  EqCheckResult r = eqCheck(eq, dc);
  if (!r.sat) return true;
  EqCheckResult r2 = eqCheck(eq2, dc2);
  if (!r2.sat) return false;
  auto theta = termApprox(timeq::apply(r.witness, m), timeq::apply(r2.witness, m2), r.dc, r2.dc);
  if (!theta) return false;
  CompSet eqL = timeq::apply(r.witness, eq);
  DerivSet merged = r.dc;
  for (const auto& [s, set] : r2.dc) merged.emplace(s, set);
  for (const auto& c : eq2) {
    if (c.kind != CompConstraint::Neq) continue;
    auto push = [&](const Term& t) {
      return timeq::apply(r.witness, timeq::apply(*theta, timeq::apply(r2.witness, t)));
    };
    if (canEq(push(c.lhs), push(c.rhs), merged, eqL)) return false;
  }
  return true;
}

bool termEqApprox(const Observable& o, const Observable& o2) {
  return termEqApprox(labelTuple(o), o.dc, o.eq, labelTuple(o2), o2.dc, o2.eq);
}

int observableMismatch(const Observable& o, const Observable& o2, const TimeSolver& solver,
                       const std::set<std::string>& rigid) {
  if (o.labels.size() != o2.labels.size()) return 1;
  if (o.signature() != o2.signature()) return 2;
  auto bij = findBijection(o, o2);
  if (!bij) return 3;
  auto [a, b] = identifyBlackBoxes(o, o2, *bij, kSharedOwner);
  if (!termEqApprox(a, b) || !termEqApprox(b, a)) return 4;
  ClockPairs pairs{{o.startClock, o2.startClock}}, back{{o2.startClock, o.startClock}};
  for (std::size_t i = 0; i < o.labels.size(); ++i) {
    pairs.emplace_back(o.labels[i].at, o2.labels[i].at);
    back.emplace_back(o2.labels[i].at, o.labels[i].at);
  }
  if (!solver.timedMatch(o.tc, o2.tc, pairs, rigid)) return 5;
  if (!solver.timedMatch(o2.tc, o.tc, back, rigid)) return 5;
  return 0;
}

nlohmann::json toJson(const Observable& o) {
  nlohmann::json j;
  j["start_clock"] = o.startClock;
  auto& labels = j["labels"] = nlohmann::json::array();
  for (const auto& l : o.labels)
    labels.push_back({{"sign", l.send ? "+" : "-"}, {"term", l.term.render()}, {"at", l.at}});
  auto& ik = j["ik"] = nlohmann::json::array();
  for (const Term& t : o.ik) ik.push_back(t.render());
  auto& dc = j["dc"] = nlohmann::json::array();
  for (const auto& [sym, set] : o.dc) dc.push_back(renderConstraint(sym, set));
  auto& eq = j["eq"] = nlohmann::json::array();
  for (const auto& e : o.eq) eq.push_back(e.render());
  auto& tc = j["tc"] = nlohmann::json::array();
  for (const auto& t : o.tc.constraints) tc.push_back(t.render());
  return j;
}

nlohmann::json Verdict::toJson() const {
  nlohmann::json j;
  j["equivalent"] = equivalent;
  j["left_observables"] = leftObservables;
  j["right_observables"] = rightObservables;
  j["states_explored"] = {leftStates, rightStates};
  j["witness"] = witness ? *witness : nlohmann::json(nullptr);
  return j;
}

namespace {

// Runs body(i) for i in [0, n) on `jobs` workers.
void parallelFor(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < std::min<std::size_t>(jobs, n); ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) body(i);
    });
  for (auto& t : pool) t.join();
}

void lowerTo(std::atomic<std::size_t>& a, std::size_t v) {
  std::size_t cur = a.load();
  while (v < cur && !a.compare_exchange_weak(cur, v)) {
  }
}

}  // namespace

Verdict configEquiv(const Configuration& left, const Configuration& right,
                    const TimeSolver& solver, const EquivOptions& opts) {
  EnumerateOptions eo;
  eo.maxSteps = opts.maxSteps;
  eo.reduce = opts.reduce;
  EnumerateResult el = enumerateTraces(left, solver, eo);
  EnumerateResult er = enumerateTraces(right, solver, eo);
  if (el.truncated || er.truncated) throw std::runtime_error("state bound reached");

  std::set<std::string> rigid = left.params;
  rigid.insert(right.params.begin(), right.params.end());
  std::vector<Observable> L = observablesOf(el);
  std::vector<Observable> R;
  for (const auto& o : observablesOf(er)) R.push_back(renameApart(o, kRightOffset, rigid));

  Verdict v;
  v.leftObservables = L.size();
  v.rightObservables = R.size();
  v.leftStates = el.states;
  v.rightStates = er.states;

  std::map<std::string, std::vector<std::size_t>> bucketL, bucketR;
  std::set<std::size_t> lengthsL, lengthsR;
  for (std::size_t i = 0; i < L.size(); ++i) {
    bucketL[L[i].signature()].push_back(i);
    lengthsL.insert(L[i].labels.size());
  }
  for (std::size_t j = 0; j < R.size(); ++j) {
    bucketR[R[j].signature()].push_back(j);
    lengthsR.insert(R[j].labels.size());
  }

  // -1 unknown, otherwise the mismatch code of (i, j).
  std::vector<std::vector<int>> cell(L.size(), std::vector<int>(R.size(), -1));
  auto code = [&](std::size_t i, std::size_t j) {
    if (cell[i][j] < 0) cell[i][j] = observableMismatch(L[i], R[j], solver, rigid);
    return cell[i][j];
  };

  auto direction = [&](bool fromLeft) -> std::optional<nlohmann::json> {
    const auto& mine = fromLeft ? L : R;
    const auto& buckets = fromLeft ? bucketR : bucketL;
    const auto& lengths = fromLeft ? lengthsR : lengthsL;
    std::vector<int> best(mine.size(), 0);
    std::atomic<std::size_t> firstFail{mine.size()};
    parallelFor(mine.size(), opts.jobs, [&](std::size_t i) {
      if (i > firstFail.load()) return;
      auto it = buckets.find(mine[i].signature());
      int far = lengths.count(mine[i].labels.size()) ? 2 : 1;
      if (it != buckets.end()) {
        for (std::size_t j : it->second) {
          int c = fromLeft ? code(i, j) : code(j, i);
          if (c == 0) return;
          far = std::max(far, c);
        }
      }
      best[i] = far;
      lowerTo(firstFail, i);
    });
    std::size_t f = firstFail.load();
    if (f == mine.size()) return std::nullopt;
    nlohmann::json w;
    w["side"] = fromLeft ? "left" : "right";
    w["failed_condition"] = best[f];
    w["observable"] = toJson(mine[f]);
    return w;
  };

  v.witness = direction(true);
  if (!v.witness) v.witness = direction(false);
  v.equivalent = !v.witness;
  return v;
}

}  // namespace timeq
