#include "generators.hpp"

#include <sstream>

namespace timeq::oracle {

namespace {

const Term alice = Term::name("alice");

std::vector<Term> subsetOf(Rng& r, const Ground& s, std::size_t lo, std::size_t hi) {
  std::vector<Term> pool(s.begin(), s.end());
  std::shuffle(pool.begin(), pool.end(), r.engine());
  std::size_t n = std::min(pool.size(), lo + r.below(hi - lo + 1));
  pool.resize(n);
  return pool;
}

bool isKeyAtom(const Term& t) { return t.is(Kind::Key) || t.is(Kind::Pk) || t.is(Kind::Sk); }

}  // namespace

Ground Vocabulary::alphabet() const {
  Ground a = secrets;
  a.insert(guessables.begin(), guessables.end());
  return a;
}

std::vector<Term> Vocabulary::keys() const {
  std::vector<Term> out;
  for (const Term& t : alphabet())
    if (isKeyAtom(t)) out.push_back(t);
  return out;
}

Vocabulary randomVocabulary(Rng& r) {
  Ground pool{Term::text("t1", false), Term::text("t2", false), Term::key("k1"),
              Term::key("k2"),         Term::nonce(9, 0),       Term::sk(alice)};
  Vocabulary v;
  for (const Term& t : subsetOf(r, pool, 2, 4)) v.secrets.insert(t);
  v.secrets.insert(Term::key("k1"));  // at least one symmetric key
  while (v.secrets.size() > 4) v.secrets.erase(std::prev(v.secrets.end()));
  v.guessables = {alice, Term::pk(alice)};
  return v;
}

Ground randomKnowledge(Rng& r, const Vocabulary& v) {
  Ground s;
  for (const Term& t : subsetOf(r, v.secrets, 1, 3)) s.insert(t);
  if (r.chance(0.3)) {
    std::vector<Term> keys;
    for (const Term& k : v.keys())
      if (!groundDerivable(s, inverse(k))) keys.push_back(k);
    if (!keys.empty()) {
      Term payload = r.pick(v.secrets);
      if (!s.count(payload)) s.insert(Term::enc(payload, r.pick(keys)));
    }
  }
  return s;
}

Term randomTerm(Rng& r, const Vocabulary& v, const std::vector<Term>& leaves, unsigned depth) {
  if (depth <= 1 || r.chance(0.45)) {
    if (!leaves.empty() && r.chance(0.5)) return r.pick(leaves);
    return r.pick(v.alphabet());
  }
  if (r.chance(0.5)) {
    std::vector<Term> xs;
    std::size_t n = 2 + r.below(2);
    for (std::size_t i = 0; i < n; ++i) xs.push_back(randomTerm(r, v, leaves, depth - 1));
    return Term::tuple(std::move(xs));
  }
  return Term::enc(randomTerm(r, v, leaves, depth - 1), r.pick(v.keys()));
}

ApproxInstance randomApprox(Rng& r, bool comparisons) {
  Vocabulary v = randomVocabulary(r);
  ApproxInstance in;
  in.alphabet = v.alphabet();

  std::vector<Term> right, left;
  for (std::size_t i = 0, n = 1 + r.below(2); i < n; ++i) right.push_back(Term::sym(101 + i));
  for (std::size_t i = 0, n = 1 + r.below(2); i < n; ++i) left.push_back(Term::sym(1 + i));
  for (const Term& s : right) in.dc2[s] = randomKnowledge(r, v);

  in.m2 = randomTerm(r, v, right, 2);
  if (r.chance(0.6)) {
    // A refinement of m2: its symbols replaced by small terms over the left symbols.
    Assignment a;
    for (const Term& s : right) a[s] = randomTerm(r, v, left, 1 + r.below(2));
    in.m = substitute(a, in.m2);
  } else {
    in.m = randomTerm(r, v, left, 2);
  }
  for (const Term& s : left) {
    if (r.chance(0.5)) {
      const Ground& from = in.dc2.at(r.pick(right));
      Ground sub;
      for (const Term& t : subsetOf(r, from, 1, from.size())) sub.insert(t);
      in.dc[s] = sub;
    } else {
      in.dc[s] = randomKnowledge(r, v);
    }
  }
  if (!comparisons) return in;

  std::set<Term> inM = symbols(in.m), inM2 = symbols(in.m2);
  std::size_t budget = 1 + r.below(3);
  for (std::size_t i = 0; i < budget; ++i) {
    if (r.chance(0.5) && !inM.empty()) {
      Term s = r.pick(inM);
      std::vector<Term> others(inM.begin(), inM.end());
      Term rhs = r.chance(0.3) ? r.pick(others) : randomTerm(r, v, {}, 1 + r.below(2));
      in.eq.push_back({r.chance(0.4), s, rhs});
    } else if (!inM2.empty()) {
      Term s = r.pick(inM2);
      if (r.chance(0.35)) {
        in.eq2.push_back({true, s, randomTerm(r, v, {}, 1)});
      } else {
        // An else-branch style inequality, possibly over a symbol of its own.
        std::vector<Term> leaves;
        if (r.chance(0.5)) {
          Term extra = Term::sym(103);
          in.dc2[extra] = randomKnowledge(r, v);
          leaves.push_back(extra);
        }
        in.eq2.push_back({false, s, randomTerm(r, v, leaves, 1 + r.below(2))});
      }
    }
  }
  return in;
}

SatInstance randomSat(Rng& r) {
  Vocabulary v = randomVocabulary(r);
  SatInstance in;
  in.alphabet = v.alphabet();
  std::vector<Term> syms;
  for (std::size_t i = 0, n = 1 + r.below(3); i < n; ++i) {
    Term s = Term::sym(1 + i);
    Ground set = randomKnowledge(r, v);
    if (!syms.empty() && r.chance(0.2)) set.insert(r.pick(syms));
    in.dc[s] = set;
    syms.push_back(s);
  }
  for (std::size_t i = 0, n = 1 + r.below(3); i < n; ++i) {
    Term l = r.chance(0.6) ? r.pick(syms) : randomTerm(r, v, syms, 2);
    Term rr = randomTerm(r, v, syms, 2);
    in.eq.push_back({r.chance(0.6), l, rr});
  }
  return in;
}

GenInstance randomGen(Rng& r) {
  Vocabulary v = randomVocabulary(r);
  GenInstance in;
  in.alphabet = v.alphabet();
  in.ik = randomKnowledge(r, v);
  const Term x = Term::var("x"), y = Term::var("y"), s1 = Term::sym(1);
  std::vector<Term> leaves{x};
  if (r.chance(0.5)) leaves.push_back(y);
  if (r.chance(0.4)) {
    Ground sub;
    for (const Term& t : subsetOf(r, in.ik, 1, in.ik.size())) sub.insert(t);
    in.dc[s1] = sub;
    leaves.push_back(s1);
  }
  // Some targets copy a ciphertext of the knowledge with holes in it.
  std::vector<Term> ciphers;
  for (const Term& t : in.ik)
    if (t.is(Kind::Enc)) ciphers.push_back(t);
  if (!ciphers.empty() && r.chance(0.5)) {
    Term c = r.pick(ciphers);
    Term hole = r.pick(leaves);
    in.target = r.chance(0.5) ? Term::enc(hole, c.encKey())
                              : Term::enc(c.payload(), r.chance(0.5) ? hole : c.encKey());
    if (r.chance(0.4)) in.target = Term::tuple({in.target, r.pick(leaves)});
  } else {
    in.target = randomTerm(r, v, leaves, 2);
  }
  return in;
}

namespace {

struct ProtoGen {
  Rng& r;
  int fresh = 0;
  int clocks = 0;

  std::string term(const std::vector<std::string>& bound, unsigned depth) {
    static const std::vector<std::string> atoms{"ping", "pong", "sec", "a", "b", "pk(a)",
                                                "pk(b)"};
    if (depth <= 1 || r.chance(0.5)) {
      if (!bound.empty() && r.chance(0.5)) return r.pick(bound);
      return r.pick(atoms);
    }
    if (r.chance(0.5)) return "<" + term(bound, depth - 1) + ", " + term(bound, depth - 1) + ">";
    return "enc(" + term(bound, depth - 1) + ", " + (r.chance(0.5) ? "k" : "pk(b)") + ")";
  }

  std::string pattern(std::vector<std::string>& bound, unsigned depth) {
    if (depth <= 1 || r.chance(0.5)) {
      if (r.chance(0.6)) {
        std::string v = "X" + std::to_string(fresh++);
        bound.push_back(v);
        return v;
      }
      return term(bound, 1);
    }
    std::string a = pattern(bound, depth - 1);
    if (r.chance(0.5)) return "<" + a + ", " + pattern(bound, depth - 1) + ">";
    return "enc(" + a + ", k)";
  }

  std::string timing() {
    if (!r.chance(0.35)) return "";
    switch (r.below(3)) {
      case 0:
        return " # cur <= " + std::to_string(1 + r.below(5));
      case 1:
        return " # T" + std::to_string(clocks++) + " = cur";
      default:
        return clocks ? " # cur >= T" + std::to_string(r.below(clocks)) + " + 1" : " # cur > 1";
    }
  }

  void block(int& budget, std::vector<std::string> bound, unsigned nest, std::ostringstream& os,
             const std::string& indent) {
    while (budget > 0 && (bound.empty() || r.chance(0.85))) {
      --budget;
      switch (r.below(nest < 2 ? 4 : 3)) {
        case 0: {
          std::string v = "N" + std::to_string(fresh++);
          os << indent << "new " << v << timing() << ";\n";
          bound.push_back(v);
          break;
        }
        case 1:
          os << indent << "send " << term(bound, 2) << timing() << ";\n";
          break;
        case 2: {
          std::string p = pattern(bound, 2);
          os << indent << "recv " << p << timing() << ";\n";
          break;
        }
        default: {
          std::vector<std::string> inner = bound;
          std::string lhs = pattern(inner, 2);
          os << indent << "if " << lhs << " := " << term(bound, 2) << timing() << " then {\n";
          int thenBudget = budget > 0 ? static_cast<int>(r.below(budget + 1)) : 0;
          int elseBudget = budget - thenBudget;
          budget = 0;
          block(thenBudget, inner, nest + 1, os, indent + "  ");
          os << indent << "} else {\n";
          block(elseBudget, bound, nest + 1, os, indent + "  ");
          os << indent << "}\n";
          break;
        }
      }
    }
  }
};

}  // namespace

std::string randomProtocol(Rng& r) {
  ProtoGen g{r};
  std::ostringstream os;
  std::size_t roles = 1 + r.below(2);
  for (std::size_t i = 0; i < roles; ++i) {
    os << "role R" << i << " {\n";
    int budget = 1 + static_cast<int>(r.below(6));
    g.block(budget, {}, 0, os, "  ");
    os << "}\n";
  }
  os << "scenario s {\n  players: [";
  for (std::size_t i = 0; i < roles; ++i)
    os << (i ? ", " : "") << (i ? "b" : "a") << " as R" << i << " keys { k }";
  os << "];\n  knowledge: { " << (r.chance(0.5) ? "sec" : "") << " };\n"
     << "  public: { ping pong };\n}\n";
  return os.str();
}

}  // namespace timeq::oracle
