#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "nexus/charact.hpp"
#include "nexus/kb.hpp"

namespace nexus {

// A generated instance together with the text files it was parsed from.
struct Fixture {
  SelectiveKB skb;
  Unit unit;
  std::string facts_text;
  std::string rules_text;
  std::string summaries_text;  // only for table selectors
  std::string selector;        // CLI spelling: neighborhood | full | table
};

Fixture make_themepark();

inline constexpr int kMaxPrimeCycles = 5;

// Cycle i has length pr_i (the i-th prime) over constants c<i>_1..c<i>_<pr_i>;
// the table selector maps <c<i>_1> to cycle i with its top atoms.
Fixture make_prime_cycles(int m);

struct RandomSpec {
  std::uint64_t seed = 0;
  std::size_t entities = 6;
  std::size_t predicates = 2;
  double density = 0.2;
  std::size_t max_arity = 2;
  std::size_t rules = 0;
  SelectorKind selector = SelectorKind::full;
  std::size_t unit_size = 2;
  std::size_t unit_arity = 1;
};

Fixture make_random(const RandomSpec& spec);

// Writes facts.nx, rules.nx and, for table selectors, summaries.nx.
void write_fixture(const Fixture& f, const std::filesystem::path& dir);

}  // namespace nexus
