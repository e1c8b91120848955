#include "timeq/protocol.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace timeq {

namespace {

bool sameTc(const std::optional<TimeConstraint>& a, const std::optional<TimeConstraint>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->lhs == b->lhs && a->rel == b->rel && a->rhs == b->rhs;
}

}  // namespace

bool operator==(const Cmd& a, const Cmd& b) {
  return a.kind == b.kind && a.var == b.var && a.term == b.term && a.rhs == b.rhs &&
         sameTc(a.tc, b.tc) && a.thenBranch == b.thenBranch && a.elseBranch == b.elseBranch;
}

ParseError::ParseError(int l, int c, const std::string& msg)
    : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg),
      line(l),
      col(c) {}

const Scenario& ProtocolFile::scenario(const std::string& name) const {
  for (const auto& s : scenarios)
    if (s.name == name) return s;
  throw std::runtime_error("unknown scenario '" + name + "'");
}

namespace {

struct Token {
  enum Type { Ident, Number, Sym, End } type = End;
  std::string text;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : s_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip();
      Token t;
      t.line = line_;
      t.col = col_;
      if (i_ >= s_.size()) {
        out.push_back(t);
        return out;
      }
      char c = s_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.type = Token::Ident;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) ||
                                  s_[i_] == '_' || s_[i_] == '\''))
          t.text += take();
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.type = Token::Number;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) t.text += take();
        if (i_ + 1 < s_.size() && (s_[i_] == '.' || s_[i_] == '/') &&
            std::isdigit(static_cast<unsigned char>(s_[i_ + 1]))) {
          t.text += take();
          while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_])))
            t.text += take();
        }
      } else {
        t.type = Token::Sym;
        std::string two = s_.substr(i_, 2);
        if (two == ":=" || two == "<=" || two == ">=") {
          t.text = two;
          take();
          take();
        } else if (std::string("{}()[]<>,;:#=+-*").find(c) != std::string::npos) {
          t.text = std::string(1, take());
        } else {
          throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
        }
      }
      out.push_back(t);
    }
  }

 private:
  char take() {
    char c = s_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  void skip() {
    while (i_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
        take();
      } else if (s_.compare(i_, 2, "//") == 0) {
        while (i_ < s_.size() && s_[i_] != '\n') take();
      } else {
        break;
      }
    }
  }
  const std::string& s_;
  std::size_t i_ = 0;
  int line_ = 1, col_ = 1;
};

Rational parseNumber(const std::string& text) {
  auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(text);
  std::string frac = text.substr(dot + 1);
  mpz_class den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  Rational r(mpz_class(text.substr(0, dot) + frac), den);
  r.canonicalize();
  return r;
}

const std::set<std::string> kReserved = {"role",  "scenario", "new",    "send",  "recv",
                                         "if",    "then",     "else",   "enc",   "pk",
                                         "sk",    "key",      "cur",    "players", "knowledge",
                                         "public", "param",   "as",     "keys"};

class Parser {
 public:
  explicit Parser(const std::string& src) : toks_(Lexer(src).run()) {}

  ProtocolFile file() {
    ProtocolFile f;
    while (!atEnd()) {
      if (isWord("role")) {
        Role r = role();
        if (f.roles.count(r.name)) fail("duplicate role '" + r.name + "'");
        f.roles.emplace(r.name, std::move(r));
      } else if (isWord("scenario")) {
        f.scenarios.push_back(scenario());
      } else {
        fail("expected 'role' or 'scenario'");
      }
    }
    return f;
  }

  Role role() {
    word("role");
    Role r;
    r.name = ident();
    sym("{");
    std::set<std::string> bound;
    while (!isSym("}")) r.body.push_back(cmd(bound));
    sym("}");
    return r;
  }

  Scenario scenario() {
    word("scenario");
    Scenario s;
    s.name = ident();
    sym("{");
    word("players");
    sym(":");
    sym("[");
    do {
      PlayerSpec p;
      p.name = ident();
      word("as");
      p.role = ident();
      if (isWord("keys")) {
        next();
        p.keys = termBlock();
      }
      s.players.push_back(std::move(p));
    } while (acceptSym(","));
    sym("]");
    sym(";");
    word("knowledge");
    sym(":");
    s.knowledge = termBlock();
    sym(";");
    if (isWord("public")) {
      next();
      sym(":");
      sym("{");
      while (!isSym("}")) {
        s.publics.insert(ident());
        acceptSym(",");
      }
      sym("}");
      sym(";");
    }
    while (isWord("param")) {
      next();
      s.params.push_back(tcon());
      sym(";");
    }
    sym("}");
    return s;
  }

  bool atEnd() const { return cur().type == Token::End; }

 private:
  const Token& cur() const { return toks_[pos_]; }
  void next() {
    if (pos_ + 1 < toks_.size()) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(cur().line, cur().col,
                     msg + (cur().type == Token::End ? " at end of input"
                                                     : " near '" + cur().text + "'"));
  }
  bool isSym(const char* s) const { return cur().type == Token::Sym && cur().text == s; }
  bool isWord(const char* s) const { return cur().type == Token::Ident && cur().text == s; }
  bool acceptSym(const char* s) {
    if (!isSym(s)) return false;
    next();
    return true;
  }
  void sym(const char* s) {
    if (!acceptSym(s)) fail(std::string("expected '") + s + "'");
  }
  void word(const char* s) {
    if (!isWord(s)) fail(std::string("expected '") + s + "'");
    next();
  }
  std::string ident() {
    if (cur().type != Token::Ident || kReserved.count(cur().text)) fail("expected identifier");
    std::string s = cur().text;
    next();
    return s;
  }

  std::vector<Term> termBlock() {
    sym("{");
    std::vector<Term> out;
    while (!isSym("}")) {
      out.push_back(term());
      acceptSym(",");
    }
    sym("}");
    return out;
  }

  Cmd cmd(std::set<std::string>& bound) {
    Cmd c;
    if (isWord("new")) {
      next();
      c.kind = Cmd::New;
      int line = cur().line, col = cur().col;
      c.var = ident();
      if (bound.count(c.var)) throw ParseError(line, col, "variable '" + c.var + "' already bound");
      bound.insert(c.var);
      c.tc = topt();
      sym(";");
    } else if (isWord("send") || isWord("recv")) {
      c.kind = isWord("send") ? Cmd::Send : Cmd::Recv;
      next();
      c.term = term();
      if (c.kind == Cmd::Recv) bindAll(c.term, bound);
      c.tc = topt();
      sym(";");
    } else if (isWord("if")) {
      next();
      c.kind = Cmd::If;
      c.term = term();
      sym(":=");
      c.rhs = term();
      c.tc = topt();
      std::set<std::string> inner = bound;
      bindAll(c.term, inner);
      word("then");
      sym("{");
      while (!isSym("}")) c.thenBranch.push_back(cmd(inner));
      sym("}");
      word("else");
      sym("{");
      std::set<std::string> other = bound;
      while (!isSym("}")) c.elseBranch.push_back(cmd(other));
      sym("}");
    } else {
      fail("expected command");
    }
    return c;
  }

  static void bindAll(const Term& t, std::set<std::string>& bound) {
    for (const Term& v : variablesOf(t)) bound.insert(v.str());
  }

  std::optional<TimeConstraint> topt() {
    if (!acceptSym("#")) return std::nullopt;
    return tcon();
  }

  Term term() {
    if (isWord("enc")) {
      next();
      sym("(");
      Term m = term();
      sym(",");
      Term k = term();
      sym(")");
      return Term::enc(m, k);
    }
    if (isWord("pk") || isWord("sk")) {
      bool pk = isWord("pk");
      next();
      sym("(");
      Term a = Term::var(ident());
      sym(")");
      return pk ? Term::pk(a) : Term::sk(a);
    }
    if (isWord("key")) {
      next();
      return Term::key(ident());
    }
    if (acceptSym("<")) {
      std::vector<Term> elems{term()};
      while (acceptSym(",")) elems.push_back(term());
      if (elems.size() < 2) fail("tuple needs at least two elements");
      sym(">");
      return Term::tuple(std::move(elems));
    }
    return Term::var(ident());
  }

  TimeConstraint tcon() {
    TimeConstraint c;
    c.lhs = texpr();
    if (acceptSym("="))
      c.rel = Rel::Eq;
    else if (acceptSym("<="))
      c.rel = Rel::Le;
    else if (acceptSym(">="))
      c.rel = Rel::Ge;
    else if (acceptSym("<"))
      c.rel = Rel::Lt;
    else if (acceptSym(">"))
      c.rel = Rel::Gt;
    else
      fail("expected relation");
    c.rhs = texpr();
    return c;
  }

  TimeExpr texpr() {
    TimeExpr e = tterm();
    for (;;) {
      if (acceptSym("+"))
        e += tterm();
      else if (acceptSym("-"))
        e -= tterm();
      else
        return e;
    }
  }

  TimeExpr tterm() {
    if (acceptSym("-")) return tterm() * Rational(-1);
    if (cur().type == Token::Number) {
      Rational r = parseNumber(cur().text);
      next();
      if (acceptSym("*")) return tterm() * r;
      return TimeExpr::constant(r);
    }
    if (acceptSym("(")) {
      TimeExpr e = texpr();
      sym(")");
      return e;
    }
    if (isWord("cur")) {
      next();
      return TimeExpr::variable("cur");
    }
    return TimeExpr::variable(ident());
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

ProtocolFile parseProtocol(const std::string& text) {
  Parser p(text);
  ProtocolFile f = p.file();
  for (const auto& s : f.scenarios)
    for (const auto& pl : s.players)
      if (!f.roles.count(pl.role))
        throw ParseError(0, 0, "scenario '" + s.name + "': unknown role '" + pl.role + "'");
  return f;
}

Role parseRole(const std::string& text) {
  Parser p(text);
  Role r = p.role();
  if (!p.atEnd()) throw ParseError(0, 0, "trailing input after role");
  return r;
}

Scenario parseScenario(const std::string& text) {
  Parser p(text);
  Scenario s = p.scenario();
  if (!p.atEnd()) throw ParseError(0, 0, "trailing input after scenario");
  return s;
}

ProtocolFile loadProtocolFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parseProtocol(ss.str());
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ":" + e.what());
  }
}

std::pair<ProtocolFile, Scenario> loadScenario(const std::string& spec) {
  std::string path = spec, name;
  auto colon = spec.rfind(':');
  if (colon != std::string::npos && spec.find('/', colon) == std::string::npos) {
    path = spec.substr(0, colon);
    name = spec.substr(colon + 1);
  }
  ProtocolFile f = loadProtocolFile(path);
  if (!name.empty()) {
    Scenario s = f.scenario(name);
    return {std::move(f), std::move(s)};
  }
  if (f.scenarios.size() != 1)
    throw std::runtime_error(path + ": expected exactly one scenario, name one with " + path +
                             ":<scenario>");
  Scenario s = f.scenarios.front();
  return {std::move(f), std::move(s)};
}

std::string renderTerm(const Term& t) {
  switch (t.kind()) {
    case Kind::Key:
      return "key " + t.str();
    case Kind::Pk:
      return "pk(" + renderTerm(t.arg(0)) + ")";
    case Kind::Sk:
      return "sk(" + renderTerm(t.arg(0)) + ")";
    case Kind::Enc:
      return "enc(" + renderTerm(t.payload()) + ", " + renderTerm(t.encKey()) + ")";
    case Kind::Tuple: {
      std::string out = "<";
      for (std::size_t i = 0; i < t.args().size(); ++i)
        out += (i ? ", " : "") + renderTerm(t.arg(i));
      return out + ">";
    }
    default:
      return t.render();
  }
}

std::string renderTimeConstraint(const TimeConstraint& c) { return c.render(); }

namespace {

void renderCmds(const std::vector<Cmd>& cmds, int indent, std::ostringstream& os) {
  std::string pad(indent, ' ');
  for (const Cmd& c : cmds) {
    std::string tc = c.tc ? " # " + renderTimeConstraint(*c.tc) : "";
    switch (c.kind) {
      case Cmd::New:
        os << pad << "new " << c.var << tc << ";\n";
        break;
      case Cmd::Send:
        os << pad << "send " << renderTerm(c.term) << tc << ";\n";
        break;
      case Cmd::Recv:
        os << pad << "recv " << renderTerm(c.term) << tc << ";\n";
        break;
      case Cmd::If:
        os << pad << "if " << renderTerm(c.term) << " := " << renderTerm(c.rhs) << tc
           << " then {\n";
        renderCmds(c.thenBranch, indent + 2, os);
        os << pad << "} else {\n";
        renderCmds(c.elseBranch, indent + 2, os);
        os << pad << "}\n";
        break;
    }
  }
}

}  // namespace

std::string renderRole(const Role& r) {
  std::ostringstream os;
  os << "role " << r.name << " {\n";
  renderCmds(r.body, 2, os);
  os << "}\n";
  return os.str();
}

std::set<std::string> paramNames(const Scenario& s) {
  std::set<std::string> out;
  for (const auto& c : s.params) {
    auto v = c.vars();
    out.insert(v.begin(), v.end());
  }
  return out;
}

ScenarioContext contextOf(const ProtocolFile&, const Scenario& s) {
  ScenarioContext ctx;
  for (const auto& p : s.players) {
    ctx.players.insert(p.name);
    for (const Term& k : p.keys)
      if (k.isVar() || k.is(Kind::Key)) ctx.keyNames.insert(k.str());
  }
  ctx.publics = s.publics;
  ctx.params = paramNames(s);
  return ctx;
}

Term resolveScenarioTerm(const Term& raw, const ScenarioContext& ctx) {
  switch (raw.kind()) {
    case Kind::Var: {
      const std::string& n = raw.str();
      if (ctx.players.count(n)) return Term::name(n);
      if (ctx.keyNames.count(n)) return Term::key(n);
      return Term::text(n, ctx.publics.count(n) > 0);
    }
    case Kind::Pk:
      return Term::pk(raw.arg(0).isVar() ? Term::name(raw.arg(0).str()) : raw.arg(0));
    case Kind::Sk:
      return Term::sk(raw.arg(0).isVar() ? Term::name(raw.arg(0).str()) : raw.arg(0));
    case Kind::Enc:
      return Term::enc(resolveScenarioTerm(raw.payload(), ctx),
                       resolveScenarioTerm(raw.encKey(), ctx));
    case Kind::Tuple: {
      std::vector<Term> out;
      for (const Term& a : raw.args()) out.push_back(resolveScenarioTerm(a, ctx));
      return Term::tuple(std::move(out));
    }
    default:
      return raw;
  }
}

namespace {

class Resolver {
 public:
  Resolver(const PlayerSpec& p, const ScenarioContext& ctx) : p_(p), ctx_(ctx) {
    for (const Term& k : p.keys)
      if (k.isVar() || k.is(Kind::Key)) keys_.insert(k.str());
  }

  std::vector<Cmd> cmds(const std::vector<Cmd>& in, std::set<std::string> bound) {
    std::vector<Cmd> out;
    for (const Cmd& c : in) {
      Cmd r;
      r.kind = c.kind;
      r.var = c.var;
      if (c.tc) r.tc = time(*c.tc);
      switch (c.kind) {
        case Cmd::New:
          bound.insert(c.var);
          break;
        case Cmd::Send:
          r.term = term(c.term, bound, false);
          break;
        case Cmd::Recv:
          r.term = term(c.term, bound, true);
          break;
        case Cmd::If: {
          std::set<std::string> inner = bound;
          r.term = term(c.term, inner, true);
          r.rhs = term(c.rhs, inner, false);
          r.thenBranch = cmds(c.thenBranch, inner);
          r.elseBranch = cmds(c.elseBranch, bound);
          break;
        }
      }
      out.push_back(std::move(r));
    }
    return out;
  }

 private:
  Term term(const Term& raw, std::set<std::string>& bound, bool pattern) {
    switch (raw.kind()) {
      case Kind::Var: {
        const std::string& n = raw.str();
        if (bound.count(n)) return raw;
        if (keys_.count(n)) return Term::key(n);
        if (ctx_.players.count(n)) return Term::name(n);
        if (ctx_.publics.count(n)) return Term::text(n, true);
        if (pattern) {
          bound.insert(n);
          return raw;
        }
        return Term::text(n, false);
      }
      case Kind::Pk:
      case Kind::Sk: {
        const Term& a = raw.arg(0);
        Term r = a.isVar() && !bound.count(a.str()) ? Term::name(a.str()) : a;
        return raw.is(Kind::Pk) ? Term::pk(r) : Term::sk(r);
      }
      case Kind::Enc: {
        Term m = term(raw.payload(), bound, pattern);
        Term k = term(raw.encKey(), bound, pattern);
        return Term::enc(m, k);
      }
      case Kind::Tuple: {
        std::vector<Term> out;
        for (const Term& a : raw.args()) out.push_back(term(a, bound, pattern));
        return Term::tuple(std::move(out));
      }
      default:
        return raw;
    }
  }

  TimeConstraint time(const TimeConstraint& c) {
    std::map<std::string, std::string> m;
    for (const auto& v : c.vars())
      if (v != "cur" && !ctx_.params.count(v)) m[v] = p_.name + "." + v;
    return c.rename(m);
  }

  const PlayerSpec& p_;
  const ScenarioContext& ctx_;
  std::set<std::string> keys_;
};

}  // namespace

std::vector<Cmd> instantiateRole(const Role& role, const PlayerSpec& player,
                                 const ScenarioContext& ctx) {
  return Resolver(player, ctx).cmds(role.body, {});
}

}  // namespace timeq
