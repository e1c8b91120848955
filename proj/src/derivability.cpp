#include "timeq/derivability.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace timeq {

bool composable(const TermSet& s, const Term& t) {
  if (isGuessable(t) || s.count(t)) return true;
  switch (t.kind()) {
    case Kind::Enc:
      return composable(s, t.payload()) && composable(s, t.encKey());
    case Kind::Tuple:
      for (const Term& e : t.args())
        if (!composable(s, e)) return false;
      return true;
    default:
      return false;
  }
}

MinimalSet normalize(TermSet s) {
  for (bool changed = true; changed;) {
    changed = false;
    for (auto it = s.begin(); it != s.end();) {
      const Term e = *it;
      if (e.is(Kind::Tuple)) {
        it = s.erase(it);
        s.insert(e.args().begin(), e.args().end());
        changed = true;
      } else if (isGuessable(e) || e.is(Kind::Star)) {
        it = s.erase(it);
      } else if (e.is(Kind::Enc) && composable(s, decryptionKey(e.encKey()))) {
        // Opened; the ciphertext itself goes only once it can be rebuilt.
        bool added = s.insert(e.payload()).second;
        if (composable(s, e.encKey())) {
          s.erase(e);
          it = s.begin();
          changed = true;
        } else if (added) {
          it = s.begin();
          changed = true;
        } else {
          ++it;
        }
      } else {
        ++it;
      }
    }
  }
  return s;
}

MinimalSet normalizeUnion(const MinimalSet& a, const MinimalSet& b) {
  TermSet u = a;
  u.insert(b.begin(), b.end());
  return normalize(std::move(u));
}

bool isMinimal(const TermSet& s) {
  for (const Term& e : s) {
    if (e.is(Kind::Tuple) || isGuessable(e)) return false;
    if (e.is(Kind::Enc) && composable(s, decryptionKey(e.encKey())) &&
        (composable(s, e.encKey()) || !s.count(e.payload())))
      return false;
  }
  return true;
}

SymGraph dependencyGraph(const DerivSet& dc) {
  SymGraph g;
  for (const auto& [sym, set] : dc) {
    g[sym];
    for (const Term& e : set)
      for (const Term& s : symbolsOf(e)) g[s].insert(sym);
  }
  return g;
}

std::optional<std::vector<Term>> topologicalSort(const DerivSet& dc) {
  SymGraph g = dependencyGraph(dc);
  std::map<Term, int> indeg;
  for (const auto& [n, succ] : g) {
    indeg[n];
    for (const Term& s : succ) ++indeg[s];
  }
  std::vector<Term> ready, order;
  for (const auto& [n, d] : indeg)
    if (d == 0) ready.push_back(n);
  while (!ready.empty()) {
    // Smallest first for a canonical order.
    std::sort(ready.begin(), ready.end(), [](const Term& a, const Term& b) { return b < a; });
    Term n = ready.back();
    ready.pop_back();
    order.push_back(n);
    for (const Term& s : g[n])
      if (--indeg[s] == 0) ready.push_back(s);
  }
  if (order.size() != indeg.size()) return std::nullopt;
  return order;
}

bool isAcyclic(const DerivSet& dc) { return topologicalSort(dc).has_value(); }

bool derivesFrom(const DerivSet& dc, const MinimalSet& s, const Term& m) {
  if (isGuessable(m) || s.count(m)) return true;
  switch (m.kind()) {
    case Kind::Enc:
      return derivesFrom(dc, s, m.payload()) && derivesFrom(dc, s, m.encKey());
    case Kind::Tuple:
      for (const Term& e : m.args())
        if (!derivesFrom(dc, s, e)) return false;
      return true;
    case Kind::Pk:
      return m.arg(0).isSym() && derivesFrom(dc, s, m.arg(0));
    case Kind::Sym: {
      auto it = dc.find(m);
      if (it == dc.end()) return false;
      for (const Term& e : it->second)
        if (!derivesFrom(dc, s, e)) return false;
      return true;
    }
    default:
      return false;
  }
}

bool derives(const DerivSet& dc, const Term& sym, const Term& m) {
  if (isGuessable(m)) return true;
  auto it = dc.find(sym);
  if (it == dc.end()) return false;
  return derivesFrom(dc, it->second, m);
}

bool subsumedBy(const DerivSet& dc, const MinimalSet& a, const MinimalSet& b) {
  for (const Term& e : a)
    if (!derivesFrom(dc, b, e)) return false;
  return true;
}

MinimalSet intersectKnowledge(const DerivSet& dc, const MinimalSet& a, const MinimalSet& b) {
  if (subsumedBy(dc, a, b)) return a;
  if (subsumedBy(dc, b, a)) return b;
  TermSet out;
  for (const Term& e : a)
    if (derivesFrom(dc, b, e)) out.insert(e);
  for (const Term& e : b)
    if (derivesFrom(dc, a, e)) out.insert(e);
  return normalize(std::move(out));
}

DerivSet apply(const Subst& s, const DerivSet& dc) {
  if (s.empty()) return dc;
  DerivSet out;
  for (const auto& [sym, set] : dc) {
    if (s.count(sym)) continue;
    out.emplace(sym, normalize(timeq::apply(s, set)));
  }
  return out;
}

namespace {

class Sampler {
 public:
  Sampler(const DerivSet& dc, SampleBounds b, const TermSet& alphabet)
      : dc_(dc), b_(b), alphabet_(alphabet) {}

  // Each symbol of t takes one value for all of its occurrences.
  TermSet instances(const Term& t, std::uint32_t h) {
    if (!variablesOf(t).empty()) throw std::invalid_argument("variable in denotation sample");
    std::map<Term, std::uint32_t> budget;
    budgets(t, h, budget);
    std::vector<Term> order;
    std::vector<TermSet> parts;
    for (const auto& [s, b] : budget) {
      order.push_back(s);
      parts.push_back(b ? symbolInstances(s, b) : TermSet{});
    }
    TermSet out;
    std::vector<Term> cur;
    product(parts, 0, cur, [&](const std::vector<Term>& xs) {
      Subst a;
      for (std::size_t i = 0; i < order.size(); ++i) a.emplace(order[i], xs[i]);
      if (fits(t, a, h)) out.insert(timeq::apply(a, t));
    });
    return out;
  }

 private:
  template <class F>
  void product(const std::vector<TermSet>& parts, std::size_t i, std::vector<Term>& cur, F&& f) {
    if (i == parts.size()) {
      f(cur);
      return;
    }
    for (const Term& x : parts[i]) {
      cur.push_back(x);
      product(parts, i + 1, cur, f);
      cur.pop_back();
    }
  }

  // Tightest budget of every symbol occurrence.
  static void budgets(const Term& t, std::uint32_t h, std::map<Term, std::uint32_t>& out) {
    if (t.isSym()) {
      auto [it, fresh] = out.emplace(t, h);
      if (!fresh) it->second = std::min(it->second, h);
      return;
    }
    std::uint32_t below = t.is(Kind::Pk) || t.is(Kind::Sk) ? 1 : h ? h - 1 : 0;
    for (const Term& c : t.args()) budgets(c, below, out);
  }

  // Height budget: h for the term, one less below Enc and Tuple, 1 inside pk/sk.
  static bool fits(const Term& t, const Subst& a, std::uint32_t h) {
    if (h == 0) return false;
    switch (t.kind()) {
      case Kind::Sym:
        return a.at(t).height() <= h;
      case Kind::Pk:
      case Kind::Sk:
        return fits(t.arg(0), a, 1);
      case Kind::Enc:
      case Kind::Tuple:
        for (const Term& c : t.args())
          if (!fits(c, a, h - 1)) return false;
        return true;
      default:
        return true;
    }
  }

  TermSet symbolInstances(const Term& s, std::uint32_t h) {
    auto key = std::make_pair(s, h);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    TermSet out;
    auto it = dc_.find(s);
    std::vector<Term> members;
    if (it != dc_.end()) members.assign(it->second.begin(), it->second.end());
    // Members without an instance inside the bound are left out, which keeps
    // the sample a subset of the true denotation.
    std::vector<TermSet> parts;
    for (const Term& m : members)
      if (TermSet inst = instances(m, h); !inst.empty()) parts.push_back(std::move(inst));
    std::vector<Term> cur;
    product(parts, 0, cur, [&](const std::vector<Term>& xs) {
      TermSet base = normalize(TermSet(xs.begin(), xs.end()));
      TermSet c = closure(base, h);
      out.insert(c.begin(), c.end());
    });
    memo_[key] = out;
    return out;
  }

  TermSet closure(const TermSet& base, std::uint32_t h) {
    TermSet level;
    for (const Term& a : alphabet_) level.insert(a);
    for (const Term& e : base)
      if (e.height() <= 1) level.insert(e);
    for (std::uint32_t cur = 2; cur <= h; ++cur) {
      TermSet next = level;
      for (const Term& e : base)
        if (e.height() <= cur) next.insert(e);
      std::vector<Term> prev(level.begin(), level.end());
      for (const Term& x : prev)
        for (const Term& y : prev) next.insert(Term::enc(x, y));
      std::vector<Term> tup;
      tuples(prev, tup, next);
      level = std::move(next);
    }
    return level;
  }

  void tuples(const std::vector<Term>& pool, std::vector<Term>& cur, TermSet& out) {
    if (cur.size() >= 2) out.insert(Term::tuple(cur));
    if (cur.size() == b_.width) return;
    for (const Term& x : pool) {
      cur.push_back(x);
      tuples(pool, cur, out);
      cur.pop_back();
    }
  }

  const DerivSet& dc_;
  SampleBounds b_;
  const TermSet& alphabet_;
  std::map<std::pair<Term, std::uint32_t>, TermSet> memo_;
};

}  // namespace

TermSet denotationSample(const DerivSet& dc, const Term& t, SampleBounds bounds,
                         const TermSet& alphabet) {
  if (!isAcyclic(dc)) throw std::invalid_argument("cyclic derivability constraints");
  Sampler s(dc, bounds, alphabet);
  return s.instances(t, bounds.depth);
}

std::string renderConstraint(const Term& sym, const MinimalSet& s) {
  return "dc(" + sym.render() + ", " + render(s) + ")";
}

std::string render(const DerivSet& dc) {
  std::string out;
  for (const auto& [sym, set] : dc) {
    if (!out.empty()) out += " ";
    out += renderConstraint(sym, set);
  }
  return out;
}

}  // namespace timeq
