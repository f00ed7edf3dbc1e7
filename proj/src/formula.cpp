#include "nexus/formula.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <unordered_map>

#include "nexus/errors.hpp"
#include "syntax.hpp"

namespace nexus {

ConjunctiveFormula::ConjunctiveFormula(std::vector<Term> free_vars, AtomSet body)
    : free_vars_(std::move(free_vars)), body_(std::move(body)) {
  if (body_.empty()) throw SemanticError("formula body is empty");
  std::set<Term> dom = domain_of(body_);
  for (const auto& x : free_vars_) {
    if (!x.is_variable()) throw SemanticError("free term " + to_string(x) + " is not a variable");
    if (!dom.count(x))
      throw SemanticError("free variable " + to_string(x) + " does not occur in the body");
  }
}

std::string_view to_string(HomRelation r) {
  switch (r) {
    case HomRelation::maps_to_only: return "maps_to_only";
    case HomRelation::mapped_from_only: return "mapped_from_only";
    case HomRelation::equivalent: return "equivalent";
    case HomRelation::incomparable: return "incomparable";
    case HomRelation::isomorphic: return "isomorphic";
  }
  return "?";
}

ConjunctiveFormula parse_formula(std::string_view text) {
  using syntax::Tok;
  syntax::Parser p(text);
  std::vector<Term> free_vars;
  std::vector<syntax::Token> free_tokens;
  if (p.peek().kind != Tok::arrow) {
    do {
      free_tokens.push_back(p.peek());
      Term x = p.term(syntax::TermMode::formula);
      if (!x.is_variable()) p.fail("free term " + to_string(x) + " is not a variable", free_tokens.back());
      free_vars.push_back(std::move(x));
    } while (p.accept(Tok::comma));
  }
  p.expect(Tok::arrow, "'<-'");
  if (p.at_end() || p.peek().kind == Tok::dot) p.fail("formula body is empty", p.peek());
  AtomSet body;
  do {
    body.insert(p.atom(syntax::TermMode::formula));
  } while (p.accept(Tok::comma));
  p.accept(Tok::dot);
  if (!p.at_end()) p.fail("expected end of formula, found " + syntax::describe(p.peek().kind), p.peek());
  std::set<Term> dom = domain_of(body);
  for (std::size_t i = 0; i < free_vars.size(); ++i)
    if (!dom.count(free_vars[i]))
      p.fail("free variable " + to_string(free_vars[i]) + " does not occur in the body",
             free_tokens[i]);
  return ConjunctiveFormula(std::move(free_vars), std::move(body));
}

std::string render_formula(const ConjunctiveFormula& f) {
  std::string out;
  for (std::size_t i = 0; i < f.arity(); ++i) {
    if (i) out += ',';
    out += to_string(f.free_vars()[i]);
  }
  out += out.empty() ? "<- " : " <- ";
  out += to_string(f.body());
  return out + ".";
}

bool is_nearly_connected(const ConjunctiveFormula& f) {
  if (f.arity() == 0) throw SemanticError("nearly-connectedness requires an open formula");
  // Union-find over terms; the free variables are joined by the dummy atom.
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
  auto unite = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };
  std::size_t anchor = get(f.free_vars()[0]);
  for (const auto& x : f.free_vars()) unite(get(x), anchor);
  for (const auto& a : f.body()) {
    if (a.arity() == 0) return false;
    std::size_t first = get(a.args()[0]);
    for (const auto& t : a.args()) unite(get(t), first);
  }
  std::size_t root = find(anchor);
  for (const auto& a : f.body())
    if (find(get(a.args()[0])) != root) return false;
  return true;
}

std::set<Tuple> evaluate(const ConjunctiveFormula& f, const Dataset& d) {
  return HomSearch(f.body(), d).project(f.free_vars());
}

namespace {

// Pins x_i -> image[i]; false when a repeated variable gets two images.
bool pin_free(const std::vector<Term>& vars, const std::vector<Term>& image, TermMapping& pins) {
  for (std::size_t i = 0; i < vars.size(); ++i) {
    auto [it, fresh] = pins.emplace(vars[i], image[i]);
    if (!fresh && it->second != image[i]) return false;
  }
  return true;
}

void require_same_arity(const ConjunctiveFormula& f, const ConjunctiveFormula& g) {
  if (f.arity() != g.arity())
    throw SemanticError("arity mismatch: " + std::to_string(f.arity()) + " vs " +
                        std::to_string(g.arity()));
}

}  // namespace

bool holds_at(const ConjunctiveFormula& f, const Dataset& d, const Tuple& tau) {
  if (tau.size() != f.arity())
    throw SemanticError("arity mismatch: formula has arity " + std::to_string(f.arity()) +
                        ", tuple has " + std::to_string(tau.size()));
  TermMapping pins;
  if (!pin_free(f.free_vars(), tau, pins)) return false;
  return find_homomorphism(f.body(), d, pins).has_value();
}

bool maps_to(const ConjunctiveFormula& f, const ConjunctiveFormula& g) {
  require_same_arity(f, g);
  TermMapping pins;
  if (!pin_free(f.free_vars(), g.free_vars(), pins)) return false;
  return find_homomorphism(f.body(), g.body(), pins).has_value();
}

bool is_isomorphic(const ConjunctiveFormula& f, const ConjunctiveFormula& g) {
  require_same_arity(f, g);
  TermMapping pins;
  if (!pin_free(f.free_vars(), g.free_vars(), pins)) return false;
  return find_isomorphism(f.body(), g.body(), pins).has_value();
}

bool equivalent(const ConjunctiveFormula& f, const ConjunctiveFormula& g) {
  return maps_to(f, g) && maps_to(g, f);
}

HomRelation hom_relation(const ConjunctiveFormula& f, const ConjunctiveFormula& g) {
  bool fg = maps_to(f, g);
  bool gf = maps_to(g, f);
  if (fg && gf) return is_isomorphic(f, g) ? HomRelation::isomorphic : HomRelation::equivalent;
  if (fg) return HomRelation::maps_to_only;
  if (gf) return HomRelation::mapped_from_only;
  return HomRelation::incomparable;
}

ConjunctiveFormula core_of(const ConjunctiveFormula& f) {
  TermMapping identity;
  for (const auto& x : f.free_vars()) identity.emplace(x, x);
  AtomSet current = f.body();
  auto engine = std::make_unique<HomSearch>(current, current);
  // One pass suffices: an atom that cannot be dropped from current cannot be
  // dropped from any retract of it either.
  for (const auto& alpha : f.body()) {
    // An atom over constants and free variables is its own image under any
    // hom fixing them, so it can never be dropped.
    bool pinned = std::all_of(alpha.args().begin(), alpha.args().end(), [&](const Term& t) {
      return t.is_constant() || identity.count(t);
    });
    if (pinned || !current.count(alpha) || current.size() == 1) continue;
    if (auto h = engine->find_avoiding(alpha, identity)) {
      // The image is equivalent to current and usually drops many atoms at once.
      current = apply_mapping(*h, current);
      engine = std::make_unique<HomSearch>(current, current);
    }
  }
  return ConjunctiveFormula(f.free_vars(), std::move(current));
}

}  // namespace nexus
