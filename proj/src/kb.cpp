#include "nexus/kb.hpp"

#include <algorithm>
#include <mutex>

#include "nexus/errors.hpp"
#include "syntax.hpp"

namespace nexus {

DatalogRule::DatalogRule(Atom head, std::vector<Atom> body)
    : head_(std::move(head)), body_(std::move(body)) {
  if (body_.empty()) throw SemanticError("rule body is empty: " + to_string(head_));
  std::set<Term> body_terms;
  for (const auto& a : body_) body_terms.insert(a.args().begin(), a.args().end());
  for (const auto& t : head_.args())
    if (t.is_variable() && !body_terms.count(t))
      throw SemanticError("unsafe rule: head variable " + to_string(t) + " does not occur in the body");
}

std::string to_string(const DatalogRule& r) {
  std::string out = to_string(r.head()) + " :- ";
  for (std::size_t i = 0; i < r.body().size(); ++i) {
    if (i) out += ", ";
    out += to_string(r.body()[i]);
  }
  return out + ".";
}

KnowledgeBase::KnowledgeBase(Dataset data, std::vector<DatalogRule> rules)
    : data_(std::move(data)), rules_(std::move(rules)) {
  if (data_.empty()) throw SemanticError("empty dataset");
  if (!is_ground(data_)) throw SemanticError("dataset atoms must be ground");
}

namespace {

class ArityTable {
 public:
  void check(const Atom& a, const syntax::Parser& p, const syntax::Token& at) {
    auto [it, fresh] = arity_.emplace(a.predicate(), a.arity());
    if (!fresh && it->second != a.arity())
      p.fail("arity conflict: predicate '" + a.predicate() + "' used with arity " +
                 std::to_string(a.arity()) + ", first declared with arity " +
                 std::to_string(it->second),
             at);
  }

 private:
  std::map<std::string, std::size_t> arity_;
};

}  // namespace

KnowledgeBase parse_kb(std::string_view facts_text, std::string_view rules_text) {
  using syntax::Tok;
  ArityTable arities;
  Dataset data;
  {
    syntax::Parser p(facts_text);
    while (!p.at_end()) {
      syntax::Token at = p.peek();
      Atom a = p.atom(syntax::TermMode::ground);
      arities.check(a, p, at);
      p.expect(Tok::dot, "'.' after fact");
      data.insert(std::move(a));
    }
    if (data.empty()) throw ParseError("empty dataset: the facts file contains no atoms", 1, 1);
  }
  std::vector<DatalogRule> rules;
  {
    syntax::Parser p(rules_text);
    while (!p.at_end()) {
      syntax::Token at = p.peek();
      Atom head = p.atom(syntax::TermMode::formula);
      arities.check(head, p, at);
      p.expect(Tok::neck, "':-'");
      std::vector<Atom> body;
      do {
        syntax::Token bt = p.peek();
        body.push_back(p.atom(syntax::TermMode::formula));
        arities.check(body.back(), p, bt);
        for (const auto& t : body.back().args())
          if (!t.index().empty()) p.fail("indexed terms are not allowed in rules", bt);
      } while (p.accept(Tok::comma));
      p.expect(Tok::dot, "'.' after rule");
      try {
        rules.emplace_back(std::move(head), std::move(body));
      } catch (const SemanticError& e) {
        p.fail(e.what(), at);
      }
    }
  }
  return KnowledgeBase(std::move(data), std::move(rules));
}

// ---------------------------------------------------------------------------
// Semi-naive evaluation

namespace {

using Bindings = std::vector<std::pair<Term, Term>>;

const Term* lookup(const Bindings& b, const Term& v) {
  for (const auto& [k, val] : b)
    if (k == v) return &val;
  return nullptr;
}

// Extends b so that pattern matches fact; returns how many bindings were added
// or -1 on mismatch (b is restored).
int unify(const Atom& pattern, const Atom& fact, Bindings& b) {
  if (pattern.predicate() != fact.predicate() || pattern.arity() != fact.arity()) return -1;
  std::size_t before = b.size();
  for (std::size_t j = 0; j < pattern.arity(); ++j) {
    const Term& t = pattern.args()[j];
    const Term& c = fact.args()[j];
    if (t.is_constant()) {
      if (t != c) {
        b.resize(before);
        return -1;
      }
    } else if (const Term* bound = lookup(b, t)) {
      if (*bound != c) {
        b.resize(before);
        return -1;
      }
    } else {
      b.emplace_back(t, c);
    }
  }
  return static_cast<int>(b.size() - before);
}

Atom instantiate(const Atom& head, const Bindings& b) {
  std::vector<Term> args;
  for (const auto& t : head.args()) args.push_back(t.is_constant() ? t : *lookup(b, t));
  return Atom(head.predicate(), std::move(args));
}

using Index = std::map<std::string, std::vector<Atom>>;

void join(const DatalogRule& r, std::size_t skip, std::size_t j, const Index& full, Bindings& b,
          std::vector<Atom>& out) {
  if (j == skip) ++j;
  if (j >= r.body().size()) {
    out.push_back(instantiate(r.head(), b));
    return;
  }
  const Atom& pattern = r.body()[j];
  auto it = full.find(pattern.predicate());
  if (it == full.end()) return;
  for (const auto& fact : it->second) {
    std::size_t before = b.size();
    if (unify(pattern, fact, b) < 0) continue;
    join(r, skip, j + 1, full, b, out);
    b.resize(before);
  }
}

}  // namespace

Dataset entailment(const KnowledgeBase& kb) {
  Dataset all = kb.data();
  Index full;
  for (const auto& a : all) full[a.predicate()].push_back(a);
  std::vector<Atom> delta(all.begin(), all.end());
  while (!delta.empty()) {
    std::vector<Atom> derived;
    for (const auto& rule : kb.rules()) {
      for (std::size_t i = 0; i < rule.body().size(); ++i) {
        for (const auto& d : delta) {
          Bindings b;
          if (unify(rule.body()[i], d, b) < 0) continue;
          join(rule, i, 0, full, b, derived);
        }
      }
    }
    std::vector<Atom> next;
    for (auto& a : derived)
      if (all.insert(a).second) next.push_back(std::move(a));
    for (const auto& a : next) full[a.predicate()].push_back(a);
    delta = std::move(next);
  }
  return all;
}

// ---------------------------------------------------------------------------
// Selectors

SelectorSpec SelectorSpec::neighborhood() { return SelectorSpec{}; }

SelectorSpec SelectorSpec::full() {
  SelectorSpec s;
  s.kind = SelectorKind::full;
  return s;
}

SelectorSpec SelectorSpec::from_table(std::map<Tuple, Dataset> table, Fallback fallback) {
  SelectorSpec s;
  s.kind = SelectorKind::table;
  s.table = std::move(table);
  s.fallback = fallback;
  return s;
}

SelectorSpec parse_summary_table(std::string_view text) {
  using syntax::Tok;
  syntax::Parser p(text);
  std::map<Tuple, Dataset> table;
  auto fallback = SelectorSpec::Fallback::minimal;
  if (p.peek().kind == Tok::ident && p.peek().text == "default") {
    p.next();
    const syntax::Token& k = p.expect(Tok::ident, "fallback kind");
    if (k.text == "minimal")
      fallback = SelectorSpec::Fallback::minimal;
    else if (k.text == "neighborhood")
      fallback = SelectorSpec::Fallback::neighborhood;
    else if (k.text == "full")
      fallback = SelectorSpec::Fallback::full;
    else
      p.fail("unknown fallback '" + k.text + "'", k);
    p.accept(Tok::dot);
  }
  while (!p.at_end()) {
    const syntax::Token& kw = p.peek();
    if (kw.kind != Tok::ident || kw.text != "summary") p.fail("expected 'summary <...>:' block", kw);
    syntax::Token at = p.next();
    p.expect(Tok::langle, "'<'");
    Tuple tau = p.constants_until(Tok::rangle);
    if (tau.empty()) p.fail("summary tuple is empty", at);
    p.expect(Tok::rangle, "'>'");
    p.expect(Tok::colon, "':'");
    Dataset atoms;
    while (!p.at_end() && !(p.peek().kind == Tok::ident && p.peek().text == "summary" &&
                            p.peek(1).kind == Tok::langle)) {
      atoms.insert(p.atom(syntax::TermMode::ground));
      p.accept(Tok::dot);
    }
    if (!table.emplace(tau, std::move(atoms)).second)
      p.fail("duplicate summary for " + to_string(tau), at);
  }
  return SelectorSpec::from_table(std::move(table), fallback);
}

std::string render_summary_table(const SelectorSpec& spec) {
  std::string out;
  switch (spec.fallback) {
    case SelectorSpec::Fallback::minimal: break;
    case SelectorSpec::Fallback::neighborhood: out += "default neighborhood.\n"; break;
    case SelectorSpec::Fallback::full: out += "default full.\n"; break;
  }
  for (const auto& [tau, atoms] : spec.table) {
    std::string head = to_string(tau);
    out += "summary " + head + ":\n";
    for (const auto& a : atoms) out += "  " + to_string(a) + ".\n";
  }
  return out;
}

struct SelectiveKB::Memo {
  std::mutex mutex;
  std::map<Tuple, std::unique_ptr<const Dataset>> cache;
  std::map<std::set<Tuple>, AtomSet> cores;
};

namespace {
constexpr std::size_t kCoreCacheLimit = 4096;
}  // namespace

std::optional<AtomSet> SelectiveKB::cached_core(const std::set<Tuple>& unit) const {
  std::lock_guard lock(memo_->mutex);
  auto it = memo_->cores.find(unit);
  if (it == memo_->cores.end()) return std::nullopt;
  return it->second;
}

void SelectiveKB::store_core(const std::set<Tuple>& unit, AtomSet body) const {
  std::lock_guard lock(memo_->mutex);
  if (memo_->cores.size() >= kCoreCacheLimit) memo_->cores.clear();
  memo_->cores.emplace(unit, std::move(body));
}

SelectiveKB::SelectiveKB(KnowledgeBase kb, SelectorSpec selector)
    : kb_(std::move(kb)), selector_(std::move(selector)), memo_(std::make_shared<Memo>()) {
  entailed_ = entailment(kb_);
  entailed_top_ = close_under_top(entailed_);
  for (const auto& t : domain_of(entailed_)) domain_.push_back(t);
  domain_set_.insert(domain_.begin(), domain_.end());
  if (selector_.kind == SelectorKind::table)
    for (const auto& [tau, s] : selector_.table) validate_summary(*this, tau, s);
}

bool SelectiveKB::knows(const Term& c) const { return domain_set_.count(c) > 0; }

KbStats SelectiveKB::stats() const {
  KbStats st;
  st.facts = kb_.data().size();
  st.entities = domain_.size();
  for (const auto& a : entailed_) {
    if (!a.is_top()) ++st.entailed;
    st.max_arity = std::max(st.max_arity, a.arity());
  }
  return st;
}

Dataset SelectiveKB::neighborhood_of(const Term& e) const {
  Dataset a_atoms;
  for (const auto& atom : entailed_)
    if (atom.arity() > 0 && atom.args()[0] == e) a_atoms.insert(atom);
  Dataset out = a_atoms;
  for (const auto& atom : a_atoms) {
    if (atom.arity() < 2 || atom.is_top() || selector_.excluded.count(atom.predicate())) continue;
    const Term& next = atom.args()[1];
    for (const auto& b : entailed_)
      if (b.arity() > 0 && b.args()[0] == next) out.insert(b);
  }
  out = close_under_top(out);
  out.insert(top_atom(e));
  return out;
}

Dataset SelectiveKB::compute_summary(const Tuple& tau) const {
  auto minimal = [&] {
    Dataset out;
    for (const auto& c : tau) out.insert(top_atom(c));
    return out;
  };
  auto neighborhood = [&] {
    Dataset out;
    for (const auto& c : tau) {
      Dataset part = neighborhood_of(c);
      out.insert(part.begin(), part.end());
    }
    return out;
  };
  switch (selector_.kind) {
    case SelectorKind::full: return entailed_top_;
    case SelectorKind::neighborhood: return neighborhood();
    case SelectorKind::table: {
      auto it = selector_.table.find(tau);
      if (it != selector_.table.end()) return it->second;
      switch (selector_.fallback) {
        case SelectorSpec::Fallback::minimal: return minimal();
        case SelectorSpec::Fallback::neighborhood: return neighborhood();
        case SelectorSpec::Fallback::full: return entailed_top_;
      }
    }
  }
  return minimal();
}

const Dataset& SelectiveKB::summary(const Tuple& tau) const {
  if (tau.empty()) throw SemanticError("summary requires a nonempty tuple");
  for (const auto& c : tau)
    if (!c.is_constant() || !knows(c)) throw SemanticError("unknown constant " + to_string(c));
  {
    std::lock_guard lock(memo_->mutex);
    auto it = memo_->cache.find(tau);
    if (it != memo_->cache.end()) return *it->second;
  }
  auto value = std::make_unique<const Dataset>(compute_summary(tau));
  std::lock_guard lock(memo_->mutex);
  auto [it, fresh] = memo_->cache.emplace(tau, std::move(value));
  return *it->second;
}

void validate_summary(const SelectiveKB& skb, const Tuple& tau, const Dataset& s) {
  std::string where = " (summary of " + to_string(tau) + ")";
  for (const auto& c : tau)
    if (!skb.knows(c)) throw SemanticError("unknown constant " + to_string(c) + where);
  for (const auto& a : s)
    if (!skb.entailed_top().count(a))
      throw SemanticError("summary contract: atom " + to_string(a) + " is not in ent(K) closed under top" + where);
  if (close_under_top(s) != s) throw SemanticError("summary contract: summary is not closed under top" + where);
  std::set<Term> dom = domain_of(s);
  for (const auto& c : tau)
    if (!dom.count(c))
      throw SemanticError("summary contract: domain does not contain " + to_string(c) + where);
}

}  // namespace nexus
