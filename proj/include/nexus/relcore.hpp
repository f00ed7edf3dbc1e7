#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace nexus {

inline constexpr std::string_view kTop = "top";

enum class TermKind : std::uint8_t { constant, variable };

// A constant or variable. Terms derived from a direct product carry the
// index s of d_s / x_s / y_s: one source constant name per unit tuple.
class Term {
 public:
  Term() = default;

  static Term constant(std::string name);
  static Term variable(std::string name);
  static Term indexed(TermKind kind, std::string name, std::vector<std::string> index);

  TermKind kind() const { return kind_; }
  bool is_constant() const { return kind_ == TermKind::constant; }
  bool is_variable() const { return kind_ == TermKind::variable; }
  const std::string& name() const { return name_; }
  const std::vector<std::string>& index() const { return index_; }

  // Order: name, then index, then kind.
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);
  friend bool operator==(const Term& a, const Term& b) = default;

 private:
  TermKind kind_ = TermKind::constant;
  std::string name_;
  std::vector<std::string> index_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept;
};

class Atom {
 public:
  Atom() = default;
  Atom(std::string predicate, std::vector<Term> args);

  const std::string& predicate() const { return predicate_; }
  const std::vector<Term>& args() const { return args_; }
  std::size_t arity() const { return args_.size(); }
  bool is_top() const { return predicate_ == kTop; }
  bool is_ground() const;

  friend std::strong_ordering operator<=>(const Atom& a, const Atom& b);
  friend bool operator==(const Atom& a, const Atom& b) = default;

 private:
  std::string predicate_;
  std::vector<Term> args_;
};

Atom top_atom(Term t);

// Atom sets are kept in canonical order (predicate, then arguments).
using AtomSet = std::set<Atom>;
// A ground atom set. The type is shared with AtomSet; groundness is checked
// at the boundaries that require it (see is_ground).
using Dataset = AtomSet;
using Tuple = std::vector<Term>;
using TermMapping = std::map<Term, Term>;

bool is_ground(const AtomSet& s);
std::set<Term> domain_of(const AtomSet& s);
AtomSet close_under_top(const AtomSet& s);

// Throws SemanticError("empty structure") on empty input.
bool is_connected(const AtomSet& s);

AtomSet apply_mapping(const TermMapping& h, const AtomSet& s);
Term apply_mapping(const TermMapping& h, const Term& t);

// True iff h is total on domain_of(src), fixes constants and maps every atom
// of src into dst.
bool is_homomorphism(const AtomSet& src, const AtomSet& dst, const TermMapping& h);

struct HomOptions {
  bool injective = false;
};

// Backtracking search for constant-fixing homomorphisms src -> dst. The
// destination is indexed once; queries with different pins reuse it.
// Variables are chosen by fewest remaining candidates, then by atom degree,
// then by term order, so results are deterministic.
class HomSearch {
 public:
  HomSearch(const AtomSet& src, const AtomSet& dst, HomOptions options = {});
  ~HomSearch();
  HomSearch(HomSearch&&) noexcept;
  HomSearch& operator=(HomSearch&&) noexcept;

  std::optional<TermMapping> find(const TermMapping& pins = {}) const;
  // As find, with `excluded` removed from the destination.
  std::optional<TermMapping> find_avoiding(const Atom& excluded, const TermMapping& pins = {}) const;

  // Distinct images of `keys` over all homomorphisms extending pins.
  std::set<Tuple> project(const Tuple& keys, const TermMapping& pins = {}) const;

  // Number of homomorphisms extending pins, stopping at `limit`.
  std::size_t count(const TermMapping& pins = {}, std::size_t limit = SIZE_MAX) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::optional<TermMapping> find_homomorphism(const AtomSet& src, const AtomSet& dst,
                                             const TermMapping& pins = {});

bool is_isomorphic(const AtomSet& s1, const AtomSet& s2);

// Bijection search with pins, used for formula isomorphism.
std::optional<TermMapping> find_isomorphism(const AtomSet& s1, const AtomSet& s2,
                                            const TermMapping& pins = {});

// Surface rendering. Constants are bare when they look like identifiers
// starting with a lowercase letter, digit or underscore, otherwise quoted.
std::string to_string(const Term& t);
std::string to_string(const Atom& a);
std::string to_string(const AtomSet& s);
std::string to_string(const Tuple& t);

}  // namespace nexus
