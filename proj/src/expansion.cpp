#include "nexus/expansion.hpp"

#include <algorithm>
#include <map>

#include "nexus/errors.hpp"

namespace nexus {

namespace {

void check_tuple(const SelectiveKB& skb, const Tuple& tau, std::size_t arity) {
  if (tau.size() != arity)
    throw SemanticError("tuple " + to_string(tau) + " has arity " + std::to_string(tau.size()) +
                        ", expected " + std::to_string(arity));
  for (const auto& c : tau)
    if (!c.is_constant() || !skb.knows(c)) throw SemanticError("unknown constant " + to_string(c));
}

}  // namespace

std::set<Tuple> inst(const ConjunctiveFormula& f, const SelectiveKB& skb,
                     const std::optional<std::set<Tuple>>& candidates) {
  std::set<Tuple> pool = candidates ? *candidates : evaluate(f, skb.entailed_top());
  std::set<Tuple> out;
  for (const auto& tau : pool) {
    if (tau.size() != f.arity()) continue;
    if (!std::all_of(tau.begin(), tau.end(), [&](const Term& c) { return skb.knows(c); })) continue;
    if (holds_at(f, skb.summary(tau), tau)) out.insert(tau);
  }
  return out;
}

bool in_ess(const SelectiveKB& skb, const Unit& u, const Tuple& tau, const CharactOptions& opt) {
  if (u.contains(tau)) throw SemanticError("tuple already in unit: " + to_string(tau));
  check_tuple(skb, tau, u.arity());
  ConjunctiveFormula can = build_can(skb, u, opt);
  return holds_at(can, skb.summary(tau), tau);
}

std::set<Tuple> ess(const SelectiveKB& skb, const Unit& u, const CharactOptions& opt) {
  return inst(build_core(skb, u, opt), skb);
}

std::string_view to_string(NavRelation r) {
  switch (r) {
    case NavRelation::precedes: return "precedes";
    case NavRelation::preceded_by: return "preceded_by";
    case NavRelation::similar: return "similar";
    case NavRelation::incomparable: return "incomparable";
  }
  return "?";
}

namespace {

NavRelation relation_of(bool forward, bool backward) {
  if (forward && backward) return NavRelation::similar;
  if (forward) return NavRelation::precedes;
  if (backward) return NavRelation::preceded_by;
  return NavRelation::incomparable;
}

void check_pair(const SelectiveKB& skb, const Unit& u, const Tuple& tau, const Tuple& tau_prime) {
  if (tau == tau_prime) throw SemanticError("tuples must differ: " + to_string(tau));
  for (const auto* t : {&tau, &tau_prime}) {
    if (u.contains(*t)) throw SemanticError("tuple already in unit: " + to_string(*t));
    check_tuple(skb, *t, u.arity());
  }
}

}  // namespace

Comparison compare(const SelectiveKB& skb, const Unit& u, const Tuple& tau, const Tuple& tau_prime,
                   const CharactOptions& opt) {
  check_pair(skb, u, tau, tau_prime);
  Comparison c{};
  c.tau_in_ess_prime = in_ess(skb, u.with(tau_prime), tau, opt);
  c.tau_prime_in_ess = in_ess(skb, u.with(tau), tau_prime, opt);
  c.relation = relation_of(c.tau_in_ess_prime, c.tau_prime_in_ess);
  return c;
}

NavRelation compare_by_cores(const SelectiveKB& skb, const Unit& u, const Tuple& tau,
                             const Tuple& tau_prime, const CharactOptions& opt) {
  check_pair(skb, u, tau, tau_prime);
  ConjunctiveFormula c1 = build_core(skb, u.with(tau), opt);
  ConjunctiveFormula c2 = build_core(skb, u.with(tau_prime), opt);
  // ess(u + tau) is included in ess(u + tau') iff core(u + tau') maps to core(u + tau).
  return relation_of(maps_to(c2, c1), maps_to(c1, c2));
}

std::vector<Tuple> candidate_tuples(const SelectiveKB& skb, std::size_t arity, std::size_t cap,
                                    bool allow_partial, bool* truncated) {
  const auto& dom = skb.domain();
  std::size_t total = 1;
  bool overflow = false;
  for (std::size_t i = 0; i < arity; ++i) {
    if (dom.size() && total > SIZE_MAX / dom.size()) overflow = true;
    total = overflow ? SIZE_MAX : total * dom.size();
  }
  if (truncated) *truncated = false;
  if (total > cap) {
    if (!allow_partial)
      throw ResourceError("candidate set has " + (overflow ? std::string("too many") : std::to_string(total)) +
                              " tuples, cap is " + std::to_string(cap),
                          cap, total);
    if (truncated) *truncated = true;
    total = cap;
  }
  std::vector<Tuple> out;
  if (dom.empty() || arity == 0) return out;
  out.reserve(total);
  std::vector<std::size_t> pos(arity, 0);
  while (out.size() < total) {
    Tuple t;
    for (std::size_t p : pos) t.push_back(dom[p]);
    out.push_back(std::move(t));
    std::size_t i = arity;
    while (i > 0 && ++pos[i - 1] == dom.size()) pos[--i] = 0;
    if (i == 0) break;
  }
  return out;
}

ExpansionGraph build_expansion_graph(const SelectiveKB& skb, const Unit& u, const GraphOptions& opt) {
  check_unit(skb, u);
  ExpansionGraph g;
  g.arity = u.arity();
  std::vector<Tuple> tuples = candidate_tuples(skb, u.arity(), opt.candidate_cap, opt.allow_partial, &g.partial);
  std::set<Tuple> all(tuples.begin(), tuples.end());

  std::vector<ConjunctiveFormula> cores{build_core(skb, u, opt.charact)};
  std::set<Tuple> base_ess = inst(cores[0], skb, all);
  for (const auto& tau : tuples) {
    if (u.contains(tau) || base_ess.count(tau)) continue;
    ConjunctiveFormula c = build_core(skb, u.with(tau), opt.charact);
    bool merged = std::any_of(cores.begin(), cores.end(), [&](const ConjunctiveFormula& k) {
      return k.size() == c.size() && equivalent(k, c);
    });
    if (!merged) cores.push_back(std::move(c));
  }

  const std::size_t n = cores.size();
  std::vector<std::set<Tuple>> instances;
  for (const auto& c : cores) instances.push_back(inst(c, skb, all));

  // Source first, then fewer instances first, then formula text.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::vector<std::string> text;
  for (const auto& c : cores) text.push_back(render_formula(c));
  std::sort(order.begin() + 1, order.end(), [&](std::size_t a, std::size_t b) {
    if (instances[a].size() != instances[b].size()) return instances[a].size() < instances[b].size();
    return text[a] < text[b];
  });

  // more_general[i][j]: node j maps into node i (j strictly more general).
  std::vector<std::vector<char>> more_general(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) more_general[i][j] = maps_to(cores[order[j]], cores[order[i]]);

  for (std::size_t i = 0; i < n; ++i) {
    ExpansionGraph::Node node{i, cores[order[i]], {}, i == 0};
    node.direct_instances = instances[order[i]];
    for (std::size_t k = 0; k < n; ++k)
      if (more_general[k][i])
        for (const auto& t : instances[order[k]]) node.direct_instances.erase(t);
    g.nodes.push_back(std::move(node));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!more_general[i][j]) continue;
      bool covered = false;
      for (std::size_t k = 0; k < n && !covered; ++k)
        covered = more_general[i][k] && more_general[k][j];
      if (!covered) g.arcs.emplace_back(i, j);
    }
  g.source = 0;
  return g;
}

Neighbors neighbors(const ExpansionGraph& g, std::size_t node) {
  if (node >= g.nodes.size()) throw SemanticError("unknown node " + std::to_string(node));
  Neighbors out;
  for (const auto& [from, to] : g.arcs) {
    if (from == node) out.generalizations.push_back(to);
    if (to == node) out.specializations.push_back(from);
  }
  std::sort(out.generalizations.begin(), out.generalizations.end());
  std::sort(out.specializations.begin(), out.specializations.end());
  return out;
}

std::string check_graph_shape(const ExpansionGraph& g) {
  const std::size_t n = g.nodes.size();
  if (n == 0) return "graph has no nodes";
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<std::size_t>> out(n);
  for (const auto& [a, b] : g.arcs) {
    if (a >= n || b >= n) return "arc endpoint out of range";
    if (a == b) return "self loop";
    indegree[b]++;
    out[a].push_back(b);
  }
  std::vector<std::size_t> sources;
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) sources.push_back(i);
  if (sources.size() != 1) return "expected a unique source, found " + std::to_string(sources.size());
  if (sources[0] != g.source) return "source index does not match the node without incoming arcs";
  for (std::size_t i = 0; i < n; ++i)
    if (g.nodes[i].is_source != (i == g.source)) return "is_source flag mismatch";
  std::vector<std::size_t> deg = indegree, queue = sources;
  std::size_t seen = 0;
  while (!queue.empty()) {
    std::size_t v = queue.back();
    queue.pop_back();
    ++seen;
    for (std::size_t w : out[v])
      if (--deg[w] == 0) queue.push_back(w);
  }
  if (seen != n) return "graph has a directed cycle";
  std::set<Tuple> union_of;
  for (const auto& node : g.nodes)
    for (const auto& t : node.direct_instances)
      if (!union_of.insert(t).second) return "tuple " + to_string(t) + " is a direct instance of two nodes";
  return "";
}

}  // namespace nexus
