#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nexus/relcore.hpp"

namespace nexus {

// head :- body. Positive, safe: every head variable occurs in the body.
class DatalogRule {
 public:
  DatalogRule(Atom head, std::vector<Atom> body);

  const Atom& head() const { return head_; }
  const std::vector<Atom>& body() const { return body_; }

  friend bool operator==(const DatalogRule&, const DatalogRule&) = default;

 private:
  Atom head_;
  std::vector<Atom> body_;
};

std::string to_string(const DatalogRule& r);

class KnowledgeBase {
 public:
  KnowledgeBase(Dataset data, std::vector<DatalogRule> rules);

  const Dataset& data() const { return data_; }
  const std::vector<DatalogRule>& rules() const { return rules_; }

 private:
  Dataset data_;
  std::vector<DatalogRule> rules_;
};

// Facts: one ground atom per line, `pred(c1,...,ck).`; every identifier is a
// constant. Rules: `head(...) :- b1(...), ..., bk(...).` with uppercase
// variables. `%` comments. The first occurrence of a predicate fixes its arity
// across both texts.
KnowledgeBase parse_kb(std::string_view facts_text, std::string_view rules_text);

// Least fixpoint of the rules over the data, by semi-naive evaluation.
Dataset entailment(const KnowledgeBase& kb);

enum class SelectorKind { neighborhood, full, table };

// Neighborhood: per entity e, A(e) = ent(K) atoms with e first; B(e) = atoms
// whose first argument e' appears second in some A(e) atom with a predicate
// outside `excluded`; C = top atoms over both domains and e itself. Tuples take
// the union over their components.
//
// Table: explicit summaries per tuple; tuples without an entry fall back to
// `fallback` (minimal = top atoms of the tuple's constants).
struct SelectorSpec {
  enum class Fallback { minimal, neighborhood, full };

  SelectorKind kind = SelectorKind::neighborhood;
  std::set<std::string> excluded = {"isa"};
  std::map<Tuple, Dataset> table;
  Fallback fallback = Fallback::minimal;

  static SelectorSpec neighborhood();
  static SelectorSpec full();
  static SelectorSpec from_table(std::map<Tuple, Dataset> table, Fallback fallback = Fallback::minimal);
};

// Summary table file: blocks `summary <c1,...,cn>:` followed by ground atom
// lines; an optional leading `default minimal|neighborhood|full.` line sets the
// fallback.
SelectorSpec parse_summary_table(std::string_view text);
std::string render_summary_table(const SelectorSpec& spec);

struct KbStats {
  std::size_t facts = 0;
  std::size_t entailed = 0;  // non-top atoms of ent(K)
  std::size_t entities = 0;
  std::size_t max_arity = 0;
};

class SelectiveKB {
 public:
  SelectiveKB(KnowledgeBase kb, SelectorSpec selector);

  const KnowledgeBase& kb() const { return kb_; }
  const SelectorSpec& selector() const { return selector_; }
  const Dataset& entailed() const { return entailed_; }
  const Dataset& entailed_top() const { return entailed_top_; }
  // Constants of ent(K), in term order.
  const std::vector<Term>& domain() const { return domain_; }
  bool knows(const Term& c) const;
  KbStats stats() const;

  // ς(K, tau). Memoized; safe for concurrent callers.
  const Dataset& summary(const Tuple& tau) const;

  // Core bodies already computed for a unit, keyed by its tuples. Safe for
  // concurrent callers; the cache is bounded and cleared when full.
  std::optional<AtomSet> cached_core(const std::set<Tuple>& unit) const;
  void store_core(const std::set<Tuple>& unit, AtomSet body) const;

 private:
  Dataset compute_summary(const Tuple& tau) const;
  Dataset neighborhood_of(const Term& e) const;

  KnowledgeBase kb_;
  SelectorSpec selector_;
  Dataset entailed_;
  Dataset entailed_top_;
  std::vector<Term> domain_;
  std::set<Term> domain_set_;
  struct Memo;
  std::shared_ptr<Memo> memo_;
};

// Checks the summary contract for tau; throws SemanticError naming the clause.
void validate_summary(const SelectiveKB& skb, const Tuple& tau, const Dataset& s);

}  // namespace nexus
