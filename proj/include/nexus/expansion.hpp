#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nexus/charact.hpp"
#include "nexus/formula.hpp"
#include "nexus/kb.hpp"

namespace nexus {

inline constexpr std::size_t kDefaultCandidateCap = 50'000;

// Candidates default to evaluate(f, ent(K) closed under top).
std::set<Tuple> inst(const ConjunctiveFormula& f, const SelectiveKB& skb,
                     const std::optional<std::set<Tuple>>& candidates = std::nullopt);

// tau in ess(u); throws SemanticError when tau is already in u.
bool in_ess(const SelectiveKB& skb, const Unit& u, const Tuple& tau, const CharactOptions& opt = {});
std::set<Tuple> ess(const SelectiveKB& skb, const Unit& u, const CharactOptions& opt = {});

enum class NavRelation { precedes, preceded_by, similar, incomparable };
std::string_view to_string(NavRelation r);

struct Comparison {
  NavRelation relation;
  bool tau_in_ess_prime;  // tau in ess(u + tau')
  bool tau_prime_in_ess;  // tau' in ess(u + tau)
};

Comparison compare(const SelectiveKB& skb, const Unit& u, const Tuple& tau, const Tuple& tau_prime,
                   const CharactOptions& opt = {});

// Same relation computed from the cores of u + tau and u + tau' and maps_to.
NavRelation compare_by_cores(const SelectiveKB& skb, const Unit& u, const Tuple& tau,
                             const Tuple& tau_prime, const CharactOptions& opt = {});

struct ExpansionGraph {
  struct Node {
    std::size_t id = 0;
    ConjunctiveFormula formula;
    std::set<Tuple> direct_instances;
    bool is_source = false;

    friend bool operator==(const Node&, const Node&) = default;
  };

  std::size_t arity = 0;
  std::vector<Node> nodes;
  // (specific, general): the general formula maps into the specific one.
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  std::size_t source = 0;
  bool partial = false;  // candidate set truncated at the cap

  friend bool operator==(const ExpansionGraph&, const ExpansionGraph&) = default;
};

struct GraphOptions {
  std::size_t candidate_cap = kDefaultCandidateCap;
  bool allow_partial = false;
  CharactOptions charact;
};

// All n-ary tuples over the constants of ent(K), in order. Throws
// ResourceError past `cap` unless allow_partial.
std::vector<Tuple> candidate_tuples(const SelectiveKB& skb, std::size_t arity, std::size_t cap,
                                    bool allow_partial, bool* truncated = nullptr);

ExpansionGraph build_expansion_graph(const SelectiveKB& skb, const Unit& u, const GraphOptions& opt = {});

struct Neighbors {
  std::vector<std::size_t> generalizations;
  std::vector<std::size_t> specializations;
};

Neighbors neighbors(const ExpansionGraph& g, std::size_t node);

// Structural checks: DAG, unique source without incoming arcs, and direct
// instances pairwise disjoint. Returns an empty string when all hold.
std::string check_graph_shape(const ExpansionGraph& g);

enum class GraphFormat { json, dot };
std::string export_graph(const ExpansionGraph& g, GraphFormat format);
ExpansionGraph parse_graph_json(std::string_view text);

}  // namespace nexus
