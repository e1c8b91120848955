#include "timeq/intruder.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace timeq {

namespace {

void dedupe(std::vector<GenSolution>& sols) {
  std::sort(sols.begin(), sols.end());
  sols.erase(std::unique(sols.begin(), sols.end()), sols.end());
}

void append(std::vector<GenSolution>& out, std::vector<GenSolution> more) {
  for (auto& s : more) out.push_back(std::move(s));
}

// Binds x to u in ssb and dc; fails when dc becomes cyclic.
std::optional<GenSolution> bind(GenSolution s, const Term& x, const Term& u) {
  Subst one{{x, u}};
  for (auto& [k, v] : s.ssb) v = timeq::apply(one, v);
  s.ssb[x] = u;
  s.dc = timeq::apply(one, s.dc);
  // y in D(S + y) says nothing; other members built from y are dropped.
  std::erase_if(s.dc, [](const auto& kv) { return kv.second.count(kv.first) > 0; });
  for (auto& [y, set] : s.dc)
    std::erase_if(set, [&](const Term& e) { return contains(e, y); });
  if (!isAcyclic(s.dc)) return std::nullopt;
  return s;
}

// Constrains an unconstrained symbol by k, leaving out members built from the symbol itself.
std::optional<GenSolution> constrain(GenSolution s, const Term& x, const MinimalSet& k) {
  MinimalSet set;
  for (const Term& e : k)
    if (!contains(e, x)) set.insert(e);
  s.dc[x] = std::move(set);
  if (!isAcyclic(s.dc)) return std::nullopt;
  return s;
}

std::vector<GenSolution> viaUnify(const Term& m, const Term& e, const GenSolution& st) {
  auto mgu = unify(m, e, false);
  if (!mgu) return {};
  return checkSubst(*mgu, st);
}

std::vector<GenSolution> generateTuple(const std::vector<Term>& elems, const MinimalSet& ik,
                                       const GenSolution& st) {
  std::vector<GenSolution> sols{st};
  for (const Term& e : elems) {
    std::vector<GenSolution> next;
    for (const GenSolution& s : sols) append(next, generate(e, ik, s));
    dedupe(next);
    sols = std::move(next);
    if (sols.empty()) break;
  }
  return sols;
}

}  // namespace

std::vector<GenSolution> generate(const Term& m0, const MinimalSet& ik0, const GenSolution& st) {
  const Term m = timeq::apply(st.ssb, m0);
  const MinimalSet ik = normalize(timeq::apply(st.ssb, ik0));
  if (m.isVar()) throw std::invalid_argument("variable in generation target");
  if (isGuessable(m) || ik.count(m)) return {st};
  if (m.isSym()) {
    auto it = st.dc.find(m);
    if (it == st.dc.end()) {
      auto s = constrain(st, m, ik);
      return s ? std::vector<GenSolution>{*s} : std::vector<GenSolution>{};
    }
    if (subsumedBy(st.dc, it->second, ik)) return {st};
    GenSolution s = st;
    s.dc[m] = intersectKnowledge(st.dc, it->second, ik);
    if (!isAcyclic(s.dc)) return {};
    return {s};
  }
  // Nothing to refine when every instance is already derivable.
  if (symbolsOf(m).empty() && derivesFrom(st.dc, ik, m)) return {st};

  std::vector<GenSolution> out;
  switch (m.kind()) {
    case Kind::Tuple:
      return generateTuple(m.args(), ik, st);
    case Kind::Enc:
      out = generateTuple(m.args(), ik, st);
      for (const Term& e : ik)
        if (e.is(Kind::Enc)) append(out, viaUnify(m, e, st));
      break;
    case Kind::Pk:
      if (m.arg(0).isSym()) out = generate(m.arg(0), ik, st);
      break;
    default:
      break;
  }
  // Atoms may also be instances of symbolic members of the knowledge.
  if (m.isAtom()) {
    const bool symbolic = !symbolsOf(m).empty();
    for (const Term& e : ik)
      if (e.isAtom() && (symbolic || !symbolsOf(e).empty())) append(out, viaUnify(m, e, st));
  }
  dedupe(out);
  return out;
}

std::vector<GenSolution> checkBnd(const Term& x, const Term& u, const GenSolution& st) {
  auto it = st.dc.find(x);
  if (it == st.dc.end()) {
    auto s = bind(st, x, u);
    return s ? std::vector<GenSolution>{*s} : std::vector<GenSolution>{};
  }
  const MinimalSet sx = it->second;
  GenSolution base = st;
  base.dc.erase(x);
  auto s = bind(base, x, u);
  if (!s) return {};
  Subst one{{x, u}};
  MinimalSet kx = normalize(timeq::apply(one, sx));
  if (!u.isSym()) return generate(u, kx, *s);
  if (kx.count(u)) return {*s};
  std::erase_if(kx, [&](const Term& e) { return contains(e, u); });
  auto ju = s->dc.find(u);
  if (ju == s->dc.end())
    s->dc[u] = kx;
  else
    s->dc[u] = intersectKnowledge(s->dc, kx, ju->second);
  if (!isAcyclic(s->dc)) return {};
  return {*s};
}

std::vector<GenSolution> checkSubst(const Subst& candidate, const GenSolution& st) {
  std::vector<GenSolution> sols{st};
  for (const auto& [x, u] : candidate) {
    std::vector<GenSolution> next;
    for (const GenSolution& s : sols) {
      Term a = timeq::apply(s.ssb, x);
      Term b = timeq::apply(s.ssb, u);
      if (a == b) {
        next.push_back(s);
      } else if (a.isSym()) {
        if (contains(b, a)) continue;
        append(next, checkBnd(a, b, s));
      } else if (b.isSym()) {
        if (contains(a, b)) continue;
        append(next, checkBnd(b, a, s));
      } else if (auto mgu = unify(a, b, false)) {
        append(next, checkSubst(*mgu, s));
      }
    }
    dedupe(next);
    sols = std::move(next);
    if (sols.empty()) break;
  }
  return sols;
}

std::vector<GenSolution> checkSubst(const Subst& candidate, const Subst& ambient,
                                    const DerivSet& dc) {
  return checkSubst(candidate, GenSolution{ambient, dc});
}

GenResult sGen(const Term& target, const MinimalSet& ik, const DerivSet& dc,
               SymbolSupply& fresh) {
  GenResult r;
  for (const Term& v : variablesOf(target)) r.sb[v] = fresh.fresh();
  r.solutions = generate(timeq::apply(r.sb, target), ik, GenSolution{{}, dc});
  return r;
}

GenResult sGenMatch(const Term& lhs, const Term& rhs, const MinimalSet& ik, const DerivSet& dc,
                    SymbolSupply& fresh) {
  GenResult r;
  for (const Term& v : variablesOf(lhs)) r.sb[v] = fresh.fresh();
  for (const Term& v : variablesOf(rhs))
    if (!r.sb.count(v)) r.sb[v] = fresh.fresh();
  Term l = timeq::apply(r.sb, lhs);
  Term rr = timeq::apply(r.sb, rhs);
  auto mgu = unify(l, rr, false);
  if (!mgu) return r;
  for (GenSolution s : checkSubst(*mgu, GenSolution{{}, dc})) {
    // Fresh symbols left open range over the current knowledge.
    bool ok = true;
    for (const auto& [v, sym] : r.sb) {
      if (s.ssb.count(sym) || s.dc.count(sym)) continue;
      auto c = constrain(s, sym, normalize(timeq::apply(s.ssb, ik)));
      if (!c) {
        ok = false;
        break;
      }
      s = std::move(*c);
    }
    if (ok) r.solutions.push_back(std::move(s));
  }
  dedupe(r.solutions);
  return r;
}

}  // namespace timeq
