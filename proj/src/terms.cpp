#include "timeq/terms.hpp"

#include <functional>
#include <ostream>
#include <sstream>

namespace timeq {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

const Term& starTerm() {
  static const Term t = Term::star();
  return t;
}

}  // namespace

Term::Term() : Term(starTerm()) {}

Term Term::make(TermNode node) {
  std::size_t h = std::hash<std::string>{}(node.name);
  h = mix(h, static_cast<std::size_t>(node.kind));
  h = mix(h, node.a);
  h = mix(h, node.b);
  h = mix(h, node.pub ? 1 : 0);
  std::uint32_t height = 0;
  for (const Term& c : node.args) {
    h = mix(h, c.hash());
    height = std::max(height, c.height());
  }
  node.hash = h;
  // pk(a) and sk(a) count as atoms for height purposes.
  if (node.kind == Kind::Enc || node.kind == Kind::Tuple)
    node.height = height + 1;
  else
    node.height = 1;
  return Term(std::make_shared<const TermNode>(std::move(node)));
}

Term Term::name(std::string n) { return make({Kind::Name, std::move(n), 0, 0, false, {}}); }
Term Term::text(std::string n, bool pub) {
  TermNode node{Kind::Text, std::move(n), 0, 0, false, {}};
  node.pub = pub;
  return make(std::move(node));
}
Term Term::nonce(std::uint32_t owner, std::uint32_t serial) {
  TermNode node{Kind::Nonce, {}, 0, 0, false, {}};
  node.a = owner;
  node.b = serial;
  return make(std::move(node));
}
Term Term::key(std::string n) { return make({Kind::Key, std::move(n), 0, 0, false, {}}); }
Term Term::pk(Term owner) {
  TermNode node{Kind::Pk, {}, 0, 0, false, {}};
  node.args.push_back(std::move(owner));
  return make(std::move(node));
}
Term Term::sk(Term owner) {
  TermNode node{Kind::Sk, {}, 0, 0, false, {}};
  node.args.push_back(std::move(owner));
  return make(std::move(node));
}
Term Term::var(std::string n) { return make({Kind::Var, std::move(n), 0, 0, false, {}}); }
Term Term::sym(std::uint32_t serial) {
  TermNode node{Kind::Sym, {}, 0, 0, false, {}};
  node.a = serial;
  return make(std::move(node));
}
Term Term::enc(Term payload, Term key) {
  TermNode node{Kind::Enc, {}, 0, 0, false, {}};
  node.args = {std::move(payload), std::move(key)};
  return make(std::move(node));
}
Term Term::tuple(std::vector<Term> elems) {
  if (elems.empty()) throw std::invalid_argument("empty tuple");
  if (elems.size() == 1) return elems.front();
  TermNode node{Kind::Tuple, {}, 0, 0, false, {}};
  node.args = std::move(elems);
  return make(std::move(node));
}
Term Term::star() { return make({Kind::Star, {}, 0, 0, false, {}}); }

bool Term::isAtom() const {
  switch (kind()) {
    case Kind::Enc:
    case Kind::Tuple:
      return false;
    default:
      return true;
  }
}

int compare(const Term& x, const Term& y) {
  if (x.n_ == y.n_) return 0;
  const TermNode& a = *x.n_;
  const TermNode& b = *y.n_;
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (a.a != b.a) return a.a < b.a ? -1 : 1;
  if (a.b != b.b) return a.b < b.b ? -1 : 1;
  if (int c = a.name.compare(b.name); c != 0) return c < 0 ? -1 : 1;
  if (a.pub != b.pub) return a.pub ? 1 : -1;
  if (a.args.size() != b.args.size()) return a.args.size() < b.args.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (int c = compare(a.args[i], b.args[i]); c != 0) return c;
  return 0;
}

std::string Term::render() const {
  std::ostringstream os;
  os << *this;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Term& t) {
  switch (t.kind()) {
    case Kind::Name:
    case Kind::Text:
    case Kind::Key:
    case Kind::Var:
      return os << t.str();
    case Kind::Nonce:
      return os << "n(" << t.owner() << "," << t.serial() << ")";
    case Kind::Pk:
      return os << "pk(" << t.arg(0) << ")";
    case Kind::Sk:
      return os << "sk(" << t.arg(0) << ")";
    case Kind::Sym:
      return os << "sym(" << t.serial() << ")";
    case Kind::Enc:
      return os << "enc(" << t.payload() << "," << t.encKey() << ")";
    case Kind::Tuple: {
      os << "<";
      for (std::size_t i = 0; i < t.args().size(); ++i) os << (i ? "," : "") << t.arg(i);
      return os << ">";
    }
    case Kind::Star:
      return os << "*";
  }
  return os;
}

bool isGround(const Term& t) {
  if (t.isSym() || t.isVar()) return false;
  for (const Term& c : t.args())
    if (!isGround(c)) return false;
  return true;
}

bool isSymbolic(const Term& t) {
  if (t.isVar()) return false;
  for (const Term& c : t.args())
    if (!isSymbolic(c)) return false;
  return true;
}

bool isGuessable(const Term& t) {
  switch (t.kind()) {
    case Kind::Name:
      return true;
    case Kind::Text:
      return t.isPublic();
    case Kind::Pk:
      return t.arg(0).is(Kind::Name);
    default:
      return false;
  }
}

Term inverseKey(const Term& k) {
  switch (k.kind()) {
    case Kind::Pk:
      return Term::sk(k.arg(0));
    case Kind::Sk:
      return Term::pk(k.arg(0));
    case Kind::Key:
      return k;
    default:
      throw std::invalid_argument("not a key");
  }
}

Term decryptionKey(const Term& k) { return k.isKey() ? inverseKey(k) : k; }

namespace {

void collect(const Term& t, Kind kind, TermSet& out) {
  if (t.is(kind)) out.insert(t);
  for (const Term& c : t.args()) collect(c, kind, out);
}

}  // namespace

TermSet symbolsOf(const Term& t) {
  TermSet out;
  collect(t, Kind::Sym, out);
  return out;
}

TermSet variablesOf(const Term& t) {
  TermSet out;
  collect(t, Kind::Var, out);
  return out;
}

bool occurs(const Term& leaf, const Term& t) { return contains(t, leaf); }

bool contains(const Term& t, const Term& sub) {
  if (t == sub) return true;
  for (const Term& c : t.args())
    if (contains(c, sub)) return true;
  return false;
}

void subterms(const Term& t, std::vector<Term>& out) {
  out.push_back(t);
  for (const Term& c : t.args()) subterms(c, out);
}

Term apply(const Subst& s, const Term& t) {
  if (s.empty()) return t;
  if (t.isSym() || t.isVar()) {
    auto it = s.find(t);
    return it == s.end() ? t : it->second;
  }
  if (t.args().empty()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  bool changed = false;
  for (const Term& c : t.args()) {
    args.push_back(timeq::apply(s, c));
    changed = changed || !(args.back() == c);
  }
  if (!changed) return t;
  switch (t.kind()) {
    case Kind::Pk:
      return Term::pk(args[0]);
    case Kind::Sk:
      return Term::sk(args[0]);
    case Kind::Enc:
      return Term::enc(args[0], args[1]);
    default:
      return Term::tuple(std::move(args));
  }
}

Term applyVarSubst(const VarSubst& s, const Term& t) { return timeq::apply(s, t); }
Term applySymSubst(const SymSubst& s, const Term& t) { return timeq::apply(s, t); }

TermSet apply(const Subst& s, const TermSet& ts) {
  if (s.empty()) return ts;
  TermSet out;
  for (const Term& t : ts) out.insert(timeq::apply(s, t));
  return out;
}

Subst compose(const Subst& first, const Subst& second) {
  Subst out;
  for (const auto& [k, v] : first) out.emplace(k, timeq::apply(second, v));
  for (const auto& [k, v] : second) out.emplace(k, v);
  return out;
}

namespace {

bool unifiable(const Term& t, bool allowVars) { return t.isSym() || (allowVars && t.isVar()); }

// Binds x to t in an idempotent substitution.
void extend(Subst& s, const Term& x, const Term& t) {
  Subst one{{x, t}};
  for (auto& [k, v] : s) v = timeq::apply(one, v);
  s.emplace(x, t);
}

}  // namespace

std::optional<Subst> unify(const std::vector<std::pair<Term, Term>>& eqs, bool allowVars) {
  Subst s;
  std::vector<std::pair<Term, Term>> work(eqs.rbegin(), eqs.rend());
  while (!work.empty()) {
    auto [a, b] = work.back();
    work.pop_back();
    a = timeq::apply(s, a);
    b = timeq::apply(s, b);
    if (a == b) continue;
    if (unifiable(a, allowVars)) {
      if (contains(b, a)) return std::nullopt;
      extend(s, a, b);
    } else if (unifiable(b, allowVars)) {
      if (contains(a, b)) return std::nullopt;
      extend(s, b, a);
    } else {
      if (a.kind() != b.kind() || a.args().size() != b.args().size()) return std::nullopt;
      if (a.args().empty()) return std::nullopt;  // distinct atoms
      for (std::size_t i = a.args().size(); i-- > 0;) work.emplace_back(a.arg(i), b.arg(i));
    }
  }
  return s;
}

std::optional<Subst> unify(const Term& a, const Term& b, bool allowVars) {
  return unify(std::vector<std::pair<Term, Term>>{{a, b}}, allowVars);
}

std::optional<Subst> match(const Term& pattern, const Term& target, Subst seed) {
  std::vector<std::pair<Term, Term>> work{{pattern, target}};
  while (!work.empty()) {
    auto [p, t] = work.back();
    work.pop_back();
    if (p.isSym()) {
      auto [it, fresh] = seed.emplace(p, t);
      if (!fresh && !(it->second == t)) return std::nullopt;
      continue;
    }
    if (p.kind() != t.kind() || p.args().size() != t.args().size()) return std::nullopt;
    if (p.args().empty()) {
      if (!(p == t)) return std::nullopt;
      continue;
    }
    for (std::size_t i = 0; i < p.args().size(); ++i) work.emplace_back(p.arg(i), t.arg(i));
  }
  return seed;
}

std::string render(const TermSet& s) {
  std::string out = "{ ";
  bool first = true;
  for (const Term& t : s) {
    if (!first) out += ", ";
    out += t.render();
    first = false;
  }
  return out + (first ? "}" : " }");
}

std::string render(const Subst& s) {
  std::string out = "[";
  bool first = true;
  for (const auto& [k, v] : s) {
    if (!first) out += ", ";
    out += k.render() + " |-> " + v.render();
    first = false;
  }
  return out + "]";
}

}  // namespace timeq
