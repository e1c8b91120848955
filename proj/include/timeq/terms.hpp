#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace timeq {

// Order of the enumerators is the canonical order between variants.
enum class Kind : std::uint8_t {
  Name,   // player name
  Text,   // text constant, public or private
  Nonce,
  Key,    // symmetric key
  Pk,
  Sk,
  Var,
  Sym,
  Enc,
  Tuple,
  Star,   // placeholder used by black-box restriction
};

class Term;

struct TermNode {
  Kind kind;
  std::string name;          // Name, Text, Key, Var
  std::uint32_t a = 0;       // Nonce owner, Sym serial
  std::uint32_t b = 0;       // Nonce serial
  bool pub = false;          // Text only
  std::vector<Term> args;    // Pk/Sk: 1, Enc: payload,key, Tuple: >= 2
  std::size_t hash = 0;
  std::uint32_t height = 1;
};

class Term {
 public:
  Term();  // the Star placeholder

  static Term name(std::string n);
  static Term text(std::string n, bool pub);
  static Term nonce(std::uint32_t owner, std::uint32_t serial);
  static Term key(std::string n);
  static Term pk(Term owner);
  static Term sk(Term owner);
  static Term var(std::string n);
  static Term sym(std::uint32_t serial);
  static Term enc(Term payload, Term key);
  // A single element collapses to the element itself.
  static Term tuple(std::vector<Term> elems);
  static Term star();

  Kind kind() const { return n_->kind; }
  const std::string& str() const { return n_->name; }
  std::uint32_t serial() const { return n_->kind == Kind::Nonce ? n_->b : n_->a; }
  std::uint32_t owner() const { return n_->a; }
  bool isPublic() const { return n_->pub; }
  const std::vector<Term>& args() const { return n_->args; }
  const Term& arg(std::size_t i) const { return n_->args[i]; }
  const Term& payload() const { return n_->args[0]; }
  const Term& encKey() const { return n_->args[1]; }
  std::size_t hash() const { return n_->hash; }
  std::uint32_t height() const { return n_->height; }

  bool is(Kind k) const { return n_->kind == k; }
  bool isSym() const { return is(Kind::Sym); }
  bool isVar() const { return is(Kind::Var); }
  bool isAtom() const;
  bool isKey() const { return is(Kind::Key) || is(Kind::Pk) || is(Kind::Sk); }

  std::string render() const;

  friend int compare(const Term& x, const Term& y);
  friend bool operator==(const Term& x, const Term& y) { return compare(x, y) == 0; }
  friend bool operator<(const Term& x, const Term& y) { return compare(x, y) < 0; }

 private:
  explicit Term(std::shared_ptr<const TermNode> n) : n_(std::move(n)) {}
  static Term make(TermNode node);
  std::shared_ptr<const TermNode> n_;
};

std::ostream& operator<<(std::ostream& os, const Term& t);

using TermSet = std::set<Term>;
using Subst = std::map<Term, Term>;
using VarSubst = Subst;
using SymSubst = Subst;

bool isGround(const Term& t);
bool isSymbolic(const Term& t);
bool isGuessable(const Term& t);

// Throws std::invalid_argument("not a key") for anything but Key/Pk/Sk.
Term inverseKey(const Term& k);
// Key needed to open enc(_, k). Atoms other than keys act as symmetric keys.
Term decryptionKey(const Term& k);

TermSet symbolsOf(const Term& t);
TermSet variablesOf(const Term& t);
bool occurs(const Term& leaf, const Term& t);
bool contains(const Term& t, const Term& sub);
void subterms(const Term& t, std::vector<Term>& out);

Term apply(const Subst& s, const Term& t);
Term applyVarSubst(const VarSubst& s, const Term& t);
Term applySymSubst(const SymSubst& s, const Term& t);
TermSet apply(const Subst& s, const TermSet& ts);
// Sequential composition: result maps x to second(first(x)), plus second's own bindings.
Subst compose(const Subst& first, const Subst& second);

// Syntactic most general unifier, symbols act as unification variables.
// With allowVars, Variables are unifiable as well. Bindings map a left-side
// symbol to a right-side symbol when both are symbols.
std::optional<Subst> unify(const std::vector<std::pair<Term, Term>>& eqs, bool allowVars = false);
std::optional<Subst> unify(const Term& a, const Term& b, bool allowVars = false);

// One-sided matching: binds symbols of pattern only, target is left untouched.
std::optional<Subst> match(const Term& pattern, const Term& target, Subst seed = {});

std::string render(const TermSet& s);
std::string render(const Subst& s);

}  // namespace timeq

template <>
struct std::hash<timeq::Term> {
  std::size_t operator()(const timeq::Term& t) const noexcept { return t.hash(); }
};
