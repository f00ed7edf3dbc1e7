#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nexus/relcore.hpp"

namespace nexus {

// x1..xn <- body. The body is a nonempty atom set; every free variable occurs
// in it. Free variables may repeat: a canonical characterization whose unit
// has two identical columns uses the same variable at both positions.
class ConjunctiveFormula {
 public:
  ConjunctiveFormula(std::vector<Term> free_vars, AtomSet body);

  const std::vector<Term>& free_vars() const { return free_vars_; }
  const AtomSet& body() const { return body_; }
  std::size_t arity() const { return free_vars_.size(); }
  std::size_t size() const { return body_.size(); }

  friend bool operator==(const ConjunctiveFormula&, const ConjunctiveFormula&) = default;

 private:
  std::vector<Term> free_vars_;
  AtomSet body_;
};

enum class HomRelation { maps_to_only, mapped_from_only, equivalent, incomparable, isomorphic };

std::string_view to_string(HomRelation r);

// Grammar: `X1,...,Xn <- atom, ..., atom .` (trailing dot optional).
ConjunctiveFormula parse_formula(std::string_view text);
std::string render_formula(const ConjunctiveFormula& f);

bool is_nearly_connected(const ConjunctiveFormula& f);

std::set<Tuple> evaluate(const ConjunctiveFormula& f, const Dataset& d);

// True iff d admits a constant-fixing hom of f's body sending x_i to tau[i].
bool holds_at(const ConjunctiveFormula& f, const Dataset& d, const Tuple& tau);

bool maps_to(const ConjunctiveFormula& f, const ConjunctiveFormula& g);
bool is_isomorphic(const ConjunctiveFormula& f, const ConjunctiveFormula& g);
bool equivalent(const ConjunctiveFormula& f, const ConjunctiveFormula& g);
HomRelation hom_relation(const ConjunctiveFormula& f, const ConjunctiveFormula& g);

ConjunctiveFormula core_of(const ConjunctiveFormula& f);

}  // namespace nexus
