#include "nexus/charact.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <unordered_map>

#include "nexus/errors.hpp"
#include "syntax.hpp"

namespace nexus {

Unit::Unit(std::set<Tuple> tuples) : tuples_(std::move(tuples)) {
  if (tuples_.empty()) throw SemanticError("unit is empty");
  arity_ = tuples_.begin()->size();
  if (arity_ == 0) throw SemanticError("unit tuples must have arity at least 1");
  for (const auto& t : tuples_) {
    if (t.size() != arity_)
      throw SemanticError("unit tuples have different arities: " + to_string(*tuples_.begin()) +
                          " and " + to_string(t));
    for (const auto& c : t)
      if (!c.is_constant() || !c.index().empty())
        throw SemanticError("unit tuples must consist of plain constants: " + to_string(t));
  }
}

Unit Unit::with(const Tuple& t) const {
  std::set<Tuple> more = tuples_;
  more.insert(t);
  return Unit(std::move(more));
}

namespace {

Tuple parse_tuple_at(syntax::Parser& p) {
  using syntax::Tok;
  Tuple out;
  do {
    out.push_back(p.term(syntax::TermMode::ground));
  } while (p.accept(Tok::comma));
  return out;
}

}  // namespace

Tuple parse_tuple(std::string_view text) {
  syntax::Parser p(text);
  if (p.at_end()) throw ParseError("empty tuple", 1, 1);
  Tuple t = parse_tuple_at(p);
  if (!p.at_end()) p.fail("expected ',' or end of tuple, found " + syntax::describe(p.peek().kind), p.peek());
  return t;
}

Unit parse_unit(std::string_view text) {
  using syntax::Tok;
  syntax::Parser p(text);
  if (p.at_end()) throw ParseError("empty unit", 1, 1);
  std::set<Tuple> tuples;
  do {
    if (p.at_end()) break;  // tolerate a trailing ';'
    tuples.insert(parse_tuple_at(p));
  } while (p.accept(Tok::semicolon));
  if (!p.at_end()) p.fail("expected ',', ';' or end of unit, found " + syntax::describe(p.peek().kind), p.peek());
  return Unit(std::move(tuples));
}

std::string render_unit(const Unit& u) {
  std::string out;
  for (const auto& t : u.tuples()) {
    if (!out.empty()) out += ';';
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) out += ',';
      out += to_string(t[i]);
    }
  }
  return out;
}

void check_unit(const SelectiveKB& skb, const Unit& u) {
  for (const auto& t : u.tuples())
    for (const auto& c : t)
      if (!skb.knows(c)) throw SemanticError("unknown constant " + to_string(c) + " in unit");
}

// ---------------------------------------------------------------------------
// Products

Term product_term(std::vector<std::string> s) {
  if (s.empty()) throw SemanticError("product index must be nonempty");
  return Term::indexed(TermKind::constant, "d", std::move(s));
}

bool is_general(const Term& d) {
  const auto& s = d.index();
  return !s.empty() && std::all_of(s.begin(), s.end(), [&](const std::string& c) { return c == s[0]; });
}

std::vector<Term> tuple_product(const std::vector<Tuple>& taus) {
  if (taus.empty()) throw SemanticError("product of no tuples");
  std::size_t n = taus[0].size();
  for (const auto& t : taus)
    if (t.size() != n) throw SemanticError("arity mismatch in tuple product");
  std::vector<Term> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> s;
    for (const auto& t : taus) s.push_back(t[i].name());
    out.push_back(product_term(std::move(s)));
  }
  return out;
}

namespace {

using Groups = std::map<std::pair<std::string, std::size_t>, std::vector<const Atom*>>;

Groups group(const Dataset& d) {
  Groups g;
  for (const auto& a : d) g[{a.predicate(), a.arity()}].push_back(&a);
  return g;
}

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) return std::numeric_limits<std::size_t>::max();
  return a * b;
}

}  // namespace

std::size_t product_size(const std::vector<const Dataset*>& ds) {
  if (ds.empty()) return 0;
  std::vector<Groups> groups;
  for (const auto* d : ds) groups.push_back(group(*d));
  std::size_t total = 0;
  for (const auto& [key, atoms] : groups[0]) {
    std::size_t n = atoms.size();
    for (std::size_t i = 1; i < groups.size() && n; ++i) {
      auto it = groups[i].find(key);
      n = it == groups[i].end() ? 0 : saturating_mul(n, it->second.size());
    }
    total = std::min(total + n, std::numeric_limits<std::size_t>::max() - 1);
  }
  return total;
}

void for_each_product_atom(const std::vector<const Dataset*>& ds,
                           const std::function<void(const Atom&)>& visit) {
  if (ds.empty()) return;
  std::vector<Groups> groups;
  for (const auto* d : ds) groups.push_back(group(*d));
  const std::size_t m = ds.size();
  for (const auto& [key, first] : groups[0]) {
    std::vector<const std::vector<const Atom*>*> lists{&first};
    for (std::size_t i = 1; i < m; ++i) {
      auto it = groups[i].find(key);
      if (it == groups[i].end()) break;
      lists.push_back(&it->second);
    }
    if (lists.size() != m) continue;
    const std::size_t k = key.second;
    std::vector<std::size_t> pos(m, 0);
    while (true) {
      std::vector<Term> args;
      args.reserve(k);
      for (std::size_t j = 0; j < k; ++j) {
        std::vector<std::string> s;
        s.reserve(m);
        for (std::size_t i = 0; i < m; ++i) s.push_back((*lists[i])[pos[i]]->args()[j].name());
        args.push_back(product_term(std::move(s)));
      }
      visit(Atom(key.first, std::move(args)));
      std::size_t i = m;
      while (i > 0) {
        --i;
        if (++pos[i] < lists[i]->size()) break;
        pos[i] = 0;
        if (i == 0) {
          i = m + 1;
          break;
        }
      }
      if (i == m + 1) break;
    }
  }
}

Dataset dataset_product(const std::vector<Dataset>& ds, std::size_t cap) {
  std::vector<const Dataset*> ptrs;
  for (const auto& d : ds) ptrs.push_back(&d);
  std::size_t n = product_size(ptrs);
  if (n > cap) throw ResourceError("product has " + std::to_string(n) + " atoms, cap is " + std::to_string(cap), cap, n);
  Dataset out;
  for_each_product_atom(ptrs, [&](const Atom& a) { out.insert(a); });
  return out;
}

// ---------------------------------------------------------------------------
// Fr, Ge, μ, clones

ProductContext::ProductContext(const std::vector<Tuple>& taus) : free_(tuple_product(taus)) {
  fr_.insert(free_.begin(), free_.end());
}

std::vector<Term> ProductContext::free_variables() const {
  std::vector<Term> out;
  for (const auto& d : free_) out.push_back(mu(d, Marking::variable));
  return out;
}

Term ProductContext::mu(const Term& d, Marking marking) const {
  bool fr = in_fr(d);
  bool ge = in_ge(d);
  if (fr && marking == Marking::variable) return Term::indexed(TermKind::variable, "X", d.index());
  if (ge) return Term::constant(d.index()[0]);
  return Term::indexed(TermKind::variable, "Y", d.index());
}

Atom ProductContext::mu(const Atom& alpha, const std::vector<Marking>& marking) const {
  std::vector<Term> args;
  args.reserve(alpha.arity());
  for (std::size_t j = 0; j < alpha.arity(); ++j) args.push_back(mu(alpha.args()[j], marking[j]));
  return Atom(alpha.predicate(), std::move(args));
}

std::vector<Atom> ProductContext::clones(const Atom& alpha) const {
  std::vector<std::size_t> dual;
  for (std::size_t j = 0; j < alpha.arity(); ++j)
    if (in_fr(alpha.args()[j]) && in_ge(alpha.args()[j])) dual.push_back(j);
  std::vector<Atom> out;
  std::size_t variants = std::size_t{1} << dual.size();
  for (std::size_t mask = 0; mask < variants; ++mask) {
    std::vector<Marking> marking(alpha.arity(), Marking::variable);
    for (std::size_t bit = 0; bit < dual.size(); ++bit)
      if (mask >> bit & 1) marking[dual[bit]] = Marking::constant;
    out.push_back(mu(alpha, marking));
  }
  return out;
}

AtomSet near_connected_part(const AtomSet& candidates, const std::vector<Term>& free_vars) {
  std::unordered_map<Term, std::size_t, TermHash> id;
  std::vector<std::size_t> parent;
  auto get = [&](const Term& t) {
    auto [it, fresh] = id.emplace(t, parent.size());
    if (fresh) parent.push_back(parent.size());
    return it->second;
  };
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& a : candidates) {
    if (a.arity() == 0) continue;
    std::size_t first = get(a.args()[0]);
    for (const auto& t : a.args()) {
      std::size_t r1 = find(get(t)), r2 = find(first);
      if (r1 != r2) parent[std::max(r1, r2)] = std::min(r1, r2);
    }
  }
  std::set<std::size_t> roots;
  for (const auto& x : free_vars) {
    auto it = id.find(x);
    if (it != id.end()) roots.insert(find(it->second));
  }
  AtomSet out;
  for (const auto& a : candidates)
    if (a.arity() > 0 && roots.count(find(id.at(a.args()[0])))) out.insert(a);
  return out;
}

// ---------------------------------------------------------------------------
// BuildCan / BuildCore

namespace {

std::vector<const Dataset*> capped_summaries(const SelectiveKB& skb, const std::vector<Tuple>& taus,
                                             const CharactOptions& opt) {
  std::vector<const Dataset*> summaries;
  for (const auto& t : taus) summaries.push_back(&skb.summary(t));
  std::size_t n = product_size(summaries);
  if (n > opt.product_cap)
    throw ResourceError("product of summaries has " + std::to_string(n) + " atoms, cap is " +
                            std::to_string(opt.product_cap),
                        opt.product_cap, n);
  return summaries;
}

}  // namespace

ConjunctiveFormula build_can(const SelectiveKB& skb, const Unit& u, const CharactOptions& opt) {
  check_unit(skb, u);
  std::vector<Tuple> taus(u.tuples().begin(), u.tuples().end());
  std::vector<const Dataset*> summaries = capped_summaries(skb, taus, opt);
  ProductContext ctx(taus);
  std::vector<Term> free_vars = ctx.free_variables();
  AtomSet candidates;
  for (const auto& x : free_vars) candidates.insert(top_atom(x));
  for_each_product_atom(summaries, [&](const Atom& alpha) {
    for (auto& beta : ctx.clones(alpha)) candidates.insert(std::move(beta));
  });
  return ConjunctiveFormula(std::move(free_vars), near_connected_part(candidates, ctx.free_variables()));
}

ConjunctiveFormula build_core(const SelectiveKB& skb, const Unit& u, const CharactOptions& opt) {
  check_unit(skb, u);
  std::vector<Tuple> taus(u.tuples().begin(), u.tuples().end());
  if (auto body = skb.cached_core(u.tuples())) {
    // The cap still applies to cached units.
    capped_summaries(skb, taus, opt);
    return ConjunctiveFormula(ProductContext(taus).free_variables(), std::move(*body));
  }
  ConjunctiveFormula core = core_of(build_can(skb, u, opt));
  skb.store_core(u.tuples(), core.body());
  return core;
}

bool explains(const ConjunctiveFormula& f, const Unit& u, const SelectiveKB& skb) {
  if (f.arity() != u.arity())
    throw SemanticError("arity mismatch: formula has arity " + std::to_string(f.arity()) +
                        ", unit has " + std::to_string(u.arity()));
  check_unit(skb, u);
  for (const auto& t : u.tuples())
    if (!holds_at(f, skb.summary(t), t)) return false;
  return true;
}

bool characterizes(const ConjunctiveFormula& f, const Unit& u, const SelectiveKB& skb,
                   const CharactOptions& opt) {
  return explains(f, u, skb) && equivalent(f, build_can(skb, u, opt));
}

}  // namespace nexus
