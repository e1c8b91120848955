#include "timeq/semantics.hpp"

#include <map>

#include "timeq/intruder.hpp"

namespace timeq {

bool Configuration::quiescent() const {
  for (const auto& p : players)
    if (!p.program.empty()) return false;
  return true;
}

std::vector<Cmd> apply(const Subst& s, const std::vector<Cmd>& cmds) {
  if (s.empty()) return cmds;
  std::vector<Cmd> out = cmds;
  for (Cmd& c : out) {
    c.term = timeq::apply(s, c.term);
    c.rhs = timeq::apply(s, c.rhs);
    c.thenBranch = timeq::apply(s, c.thenBranch);
    c.elseBranch = timeq::apply(s, c.elseBranch);
  }
  return out;
}

Configuration initialConfiguration(const ProtocolFile& f, const Scenario& s) {
  ScenarioContext ctx = contextOf(f, s);
  Configuration c;
  std::uint32_t idx = 0;
  for (const PlayerSpec& p : s.players) {
    PlayerState st;
    st.name = p.name;
    st.index = idx++;
    st.program = instantiateRole(f.roles.at(p.role), p, ctx);
    for (const Term& k : p.keys) st.keys.insert(resolveScenarioTerm(k, ctx));
    c.players.push_back(std::move(st));
  }
  TermSet ik;
  for (const Term& t : s.knowledge) ik.insert(resolveScenarioTerm(t, ctx));
  c.ik = normalize(std::move(ik));
  c.clock = c.startClock = "tG0";
  c.tc.constraints = s.params;
  c.tc.clocks.insert(c.clock);
  c.tc.globalClock = c.clock;
  c.params = ctx.params;
  return c;
}

bool isReceivable(const Term& p, const Term& m, const MinimalSet& ks) {
  if (p.isVar() || p.kind() != m.kind()) return true;
  if (p.is(Kind::Tuple)) {
    if (p.args().size() != m.args().size()) return true;
    for (std::size_t i = 0; i < p.args().size(); ++i)
      if (!isReceivable(p.arg(i), m.arg(i), ks)) return false;
    return true;
  }
  if (p.is(Kind::Enc)) {
    const Term& k = m.encKey();
    if (!p.encKey().isVar() && !k.isSym()) {
      Term dk = decryptionKey(k);
      if (!ks.count(dk) && !isGuessable(dk)) return false;
    }
    return isReceivable(p.payload(), m.payload(), ks);
  }
  return true;
}

namespace {

void readableKeys(const Term& m, const MinimalSet& ks, MinimalSet& out) {
  switch (m.kind()) {
    case Kind::Key:
    case Kind::Sk:
      out.insert(m);
      break;
    case Kind::Tuple:
      for (const Term& a : m.args()) readableKeys(a, ks, out);
      break;
    case Kind::Enc:
      if (!m.encKey().isSym()) {
        Term dk = decryptionKey(m.encKey());
        if (ks.count(dk) || isGuessable(dk)) readableKeys(m.payload(), ks, out);
      }
      break;
    default:
      break;
  }
}

std::string nextClock(Configuration& c) { return "tG" + std::to_string(c.nextClock++); }

// Advances the global clock and adds the command's constraint.
void advance(Configuration& c, const std::optional<TimeConstraint>& tc) {
  std::string clk = nextClock(c);
  c.tc.constraints.push_back(
      {TimeExpr::variable(clk), Rel::Ge, TimeExpr::variable(c.clock)});
  if (tc) c.tc.constraints.push_back(tc->substitute("cur", TimeExpr::variable(clk)));
  c.tc.clocks.insert(clk);
  c.tc.globalClock = clk;
  c.clock = clk;
}

// Applies a symbol substitution to the whole configuration.
void applyEverywhere(Configuration& c, const Subst& ssb) {
  if (ssb.empty()) return;
  for (auto& p : c.players) {
    p.program = timeq::apply(ssb, p.program);
    p.keys = timeq::apply(ssb, p.keys);
  }
  c.ik = normalize(timeq::apply(ssb, c.ik));
  c.eq = timeq::apply(ssb, c.eq);
  for (auto& l : c.labels) l.term = timeq::apply(ssb, l.term);
}

std::vector<Cmd> concat(std::vector<Cmd> a, const std::vector<Cmd>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

using Succ = std::vector<std::pair<Configuration, Step>>;

void stepPlayer(const Configuration& c, std::size_t pi, Succ& out) {
  const PlayerState& ps = c.players[pi];
  const Cmd& head = ps.program.front();
  std::vector<Cmd> rest(ps.program.begin() + 1, ps.program.end());
  Step step;
  step.player = ps.index;

  switch (head.kind) {
    case Cmd::New: {
      Configuration n = c;
      PlayerState& p = n.players[pi];
      Term nonce = Term::nonce(p.index, p.nonces++);
      p.program = timeq::apply(Subst{{Term::var(head.var), nonce}}, rest);
      advance(n, head.tc);
      out.emplace_back(std::move(n), step);
      break;
    }
    case Cmd::Send: {
      Configuration n = c;
      n.players[pi].program = rest;
      n.ik = normalizeUnion(n.ik, {head.term});
      advance(n, head.tc);
      step.label = {Label::Send, head.term, n.clock, ps.index};
      n.labels.push_back(step.label);
      out.emplace_back(std::move(n), step);
      break;
    }
    case Cmd::Recv: {
      SymbolSupply fresh{c.nextSym};
      GenResult g = sGen(head.term, c.ik, c.dc, fresh);
      Term pattern = timeq::apply(g.sb, head.term);
      for (const GenSolution& sol : g.solutions) {
        Term m = timeq::apply(sol.ssb, pattern);
        if (!isReceivable(head.term, m, timeq::apply(sol.ssb, ps.keys))) continue;
        Configuration n = c;
        n.nextSym = fresh.next;
        n.players[pi].program = timeq::apply(g.sb, rest);
        n.dc = sol.dc;
        applyEverywhere(n, sol.ssb);
        n.players[pi].keys = addKeys(m, n.players[pi].keys);
        advance(n, head.tc);
        Step s = step;
        s.ssb = sol.ssb;
        s.label = {Label::Recv, m, n.clock, ps.index};
        n.labels.push_back(s.label);
        out.emplace_back(std::move(n), s);
      }
      break;
    }
    case Cmd::If: {
      SymbolSupply fresh{c.nextSym};
      GenResult g = sGenMatch(head.term, head.rhs, c.ik, c.dc, fresh);
      for (const GenSolution& sol : g.solutions) {
        Configuration n = c;
        n.nextSym = fresh.next;
        n.players[pi].program = timeq::apply(g.sb, concat(head.thenBranch, rest));
        n.dc = sol.dc;
        n.eq.insert(
            CompConstraint::eq(timeq::apply(g.sb, head.term), timeq::apply(g.sb, head.rhs)));
        applyEverywhere(n, sol.ssb);
        advance(n, head.tc);
        Step s = step;
        s.ssb = sol.ssb;
        out.emplace_back(std::move(n), s);
      }
      // Else branch: the pattern variables range over the current knowledge.
      Configuration n = c;
      Subst sb;
      for (const Term& v : variablesOf(head.term)) {
        Term sym = Term::sym(n.nextSym++);
        sb[v] = sym;
        MinimalSet set;
        for (const Term& e : n.ik)
          if (!contains(e, sym)) set.insert(e);
        n.dc[sym] = std::move(set);
      }
      n.players[pi].program = timeq::apply(sb, concat(head.elseBranch, rest));
      n.eq.insert(CompConstraint::neq(timeq::apply(sb, head.term), head.rhs));
      advance(n, head.tc);
      out.emplace_back(std::move(n), step);
      break;
    }
  }
}

}  // namespace

MinimalSet addKeys(const Term& m, const MinimalSet& ks) {
  MinimalSet out = ks;
  for (;;) {
    MinimalSet more = out;
    readableKeys(m, out, more);
    if (more.size() == out.size()) return out;
    out = std::move(more);
  }
}

bool independentSilent(const Cmd& head) {
  if (head.tc && head.tc->vars().count("cur")) return false;
  if (head.kind == Cmd::New) return true;
  return head.kind == Cmd::If && variablesOf(head.term).empty() && variablesOf(head.rhs).empty();
}

namespace {

Succ viable(Succ all, const TimeSolver& solver) {
  Succ kept;
  for (auto& s : all) {
    if (!isAcyclic(s.first.dc)) continue;
    if (!eqCheck(s.first.eq, s.first.dc).sat) continue;
    if (!solver.sat(s.first.tc)) continue;
    kept.push_back(std::move(s));
  }
  return kept;
}

}  // namespace

Succ successors(const Configuration& c, const TimeSolver& solver, bool reduce) {
  if (reduce)
    for (std::size_t pi = 0; pi < c.players.size(); ++pi)
      if (!c.players[pi].program.empty() && independentSilent(c.players[pi].program.front())) {
        Succ alone;
        stepPlayer(c, pi, alone);
        alone = viable(std::move(alone), solver);
        // A blocked silent step must not hide the other players' moves.
        if (!alone.empty()) return alone;
      }
  Succ all;
  for (std::size_t pi = 0; pi < c.players.size(); ++pi)
    if (!c.players[pi].program.empty()) stepPlayer(c, pi, all);
  return viable(std::move(all), solver);
}

EnumerateResult enumerateTraces(const Configuration& c0, const TimeSolver& solver,
                                const EnumerateOptions& opts) {
  EnumerateResult r;
  std::vector<Configuration> stack{c0};
  while (!stack.empty()) {
    Configuration c = std::move(stack.back());
    stack.pop_back();
    ++r.states;
    if (opts.maxSteps && r.states > *opts.maxSteps) {
      r.truncated = true;
      break;
    }
    Succ next = successors(c, solver, opts.reduce);
    if (next.empty()) {
      r.leaves.push_back(std::move(c));
      continue;
    }
    if (opts.onStep)
      for (const auto& [n, step] : next) opts.onStep(c, n, step);
    // Reverse push keeps depth-first order aligned with player order.
    for (auto it = next.rbegin(); it != next.rend(); ++it) stack.push_back(std::move(it->first));
  }
  return r;
}

std::string render(const Label& l) {
  if (l.kind == Label::Silent) return "silent";
  return std::string(l.kind == Label::Send ? "+" : "-") + l.term.render() + " @ " + l.at;
}

nlohmann::json toJson(const Configuration& c) {
  nlohmann::json j;
  j["start_clock"] = c.startClock;
  j["clock"] = c.clock;
  auto& labels = j["labels"] = nlohmann::json::array();
  for (const Label& l : c.labels)
    labels.push_back({{"sign", l.kind == Label::Send ? "+" : "-"},
                      {"term", l.term.render()},
                      {"at", l.at},
                      {"player", c.players.at(l.player).name}});
  auto& ik = j["ik"] = nlohmann::json::array();
  for (const Term& t : c.ik) ik.push_back(t.render());
  auto& dc = j["dc"] = nlohmann::json::array();
  for (const auto& [sym, set] : c.dc) dc.push_back(renderConstraint(sym, set));
  auto& eq = j["eq"] = nlohmann::json::array();
  for (const auto& e : c.eq) eq.push_back(e.render());
  auto& tc = j["tc"] = nlohmann::json::array();
  for (const auto& t : c.tc.constraints) tc.push_back(t.render());
  auto& pending = j["pending"] = nlohmann::json::object();
  for (const auto& p : c.players)
    if (!p.program.empty()) pending[p.name] = p.program.size();
  return j;
}

}  // namespace timeq
