#pragma once

#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nexus/formula.hpp"
#include "nexus/kb.hpp"
#include "nexus/relcore.hpp"

namespace nexus {

inline constexpr std::size_t kDefaultProductCap = 10'000'000;

// A finite nonempty set of same-arity constant tuples.
class Unit {
 public:
  explicit Unit(std::set<Tuple> tuples);
  Unit(std::initializer_list<Tuple> tuples) : Unit(std::set<Tuple>(tuples)) {}

  std::size_t arity() const { return arity_; }
  std::size_t size() const { return tuples_.size(); }
  const std::set<Tuple>& tuples() const { return tuples_; }
  bool contains(const Tuple& t) const { return tuples_.count(t) > 0; }
  Unit with(const Tuple& t) const;

  friend bool operator==(const Unit&, const Unit&) = default;

 private:
  std::size_t arity_ = 0;
  std::set<Tuple> tuples_;
};

// "a,b;c,d" -> {<a,b>, <c,d>}. Every identifier is a constant.
Tuple parse_tuple(std::string_view text);
Unit parse_unit(std::string_view text);
std::string render_unit(const Unit& u);

// Throws SemanticError unless every constant of u is known to skb.
void check_unit(const SelectiveKB& skb, const Unit& u);

// Product constant d_s: a constant named "d" indexed by s.
Term product_term(std::vector<std::string> s);
bool is_general(const Term& product_term);  // all entries of s identical

std::vector<Term> tuple_product(const std::vector<Tuple>& taus);

// Number of atoms the product of `ds` would have.
std::size_t product_size(const std::vector<const Dataset*>& ds);

// Streams the product atoms; an atom p(d_s1..d_sk) appears iff its i-th
// projection is in ds[i] for every i.
void for_each_product_atom(const std::vector<const Dataset*>& ds,
                           const std::function<void(const Atom&)>& visit);
Dataset dataset_product(const std::vector<Dataset>& ds, std::size_t cap = kDefaultProductCap);

enum class Marking { variable, constant };

// Fr, Ge and the μ renaming for a fixed unit.
class ProductContext {
 public:
  explicit ProductContext(const std::vector<Tuple>& taus);

  const std::vector<Term>& free_terms() const { return free_; }
  std::vector<Term> free_variables() const;
  bool in_fr(const Term& d) const { return fr_.count(d) > 0; }
  static bool in_ge(const Term& d) { return is_general(d); }

  Term mu(const Term& d, Marking marking = Marking::variable) const;
  Atom mu(const Atom& alpha, const std::vector<Marking>& marking) const;

  // μ-images of all 2^k markings over the k positions holding Fr ∩ Ge terms;
  // the all-variable marking (alpha itself) comes first.
  std::vector<Atom> clones(const Atom& alpha) const;

 private:
  std::vector<Term> free_;
  std::set<Term> fr_;
};

// Atoms of `candidates` whose component (adjacency: shared terms, constants
// included) contains one of `free_vars`.
AtomSet near_connected_part(const AtomSet& candidates, const std::vector<Term>& free_vars);

struct CharactOptions {
  std::size_t product_cap = kDefaultProductCap;
};

ConjunctiveFormula build_can(const SelectiveKB& skb, const Unit& u, const CharactOptions& opt = {});
ConjunctiveFormula build_core(const SelectiveKB& skb, const Unit& u, const CharactOptions& opt = {});

bool explains(const ConjunctiveFormula& f, const Unit& u, const SelectiveKB& skb);
bool characterizes(const ConjunctiveFormula& f, const Unit& u, const SelectiveKB& skb,
                   const CharactOptions& opt = {});

}  // namespace nexus
