#pragma once

// Seeded randomized property suites shared by the unit tests and the
// acceptance binary. Each runs `instances` cases and reports disagreements.

#include <cstddef>
#include <cstdint>
#include <string>

#include "nexus/fixtures.hpp"

namespace nexus::suites {

struct Result {
  std::size_t instances = 0;
  std::size_t failures = 0;
  std::string first_failure;

  bool ok() const { return failures == 0; }
  void fail(const std::string& why) {
    if (failures++ == 0) first_failure = why;
  }
};

// Small random SKB with a unit of one or two tuples; arity 2 on some seeds.
Fixture random_instance(std::uint64_t seed);

Result hom_engine(std::uint64_t seed, std::size_t instances);
Result core_search(std::uint64_t seed, std::size_t instances);
Result ess_bridge(std::uint64_t seed, std::size_t instances);
Result trichotomy(std::uint64_t seed, std::size_t instances);
Result inst_monotonicity(std::uint64_t seed, std::size_t instances);
Result graph_invariants(std::uint64_t seed, std::size_t instances);
Result size_bound(std::uint64_t seed, std::size_t instances);

}  // namespace nexus::suites
