#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nexus/errors.hpp"
#include "nexus/fixtures.hpp"

namespace nexus {
namespace {

Term c(const std::string& n) { return Term::constant(n); }

TEST(ThemeparkFixture, Shape) {
  Fixture fx = make_themepark();
  EXPECT_EQ(fx.unit, parse_unit("discovery_cove;epcot"));
  EXPECT_EQ(fx.selector, "neighborhood");
  EXPECT_EQ(fx.skb.entailed().size(), fx.skb.kb().data().size() + 3);
  EXPECT_EQ(fx.skb.domain().size(), 13u);
  EXPECT_EQ(fx.skb.summary({c("epcot")}).size(), 9u);
}

TEST(PrimeCycles, Summaries) {
  const std::size_t primes[] = {2, 3, 5};
  for (int m = 1; m <= 3; ++m) {
    Fixture fx = make_prime_cycles(m);
    EXPECT_EQ(fx.unit.size(), static_cast<std::size_t>(m));
    EXPECT_EQ(fx.selector, "table");
    std::size_t i = 0;
    for (const auto& t : fx.unit.tuples()) EXPECT_EQ(fx.skb.summary(t).size(), 2 * primes[i++]);
  }
}

TEST(PrimeCycles, Limits) {
  EXPECT_THROW(make_prime_cycles(0), SemanticError);
  EXPECT_THROW(make_prime_cycles(kMaxPrimeCycles + 1), ResourceError);
  EXPECT_NO_THROW(make_prime_cycles(kMaxPrimeCycles));
}

TEST(Random, Reproducible) {
  RandomSpec spec;
  spec.seed = 42;
  spec.rules = 3;
  Fixture a = make_random(spec), b = make_random(spec);
  EXPECT_EQ(a.facts_text, b.facts_text);
  EXPECT_EQ(a.rules_text, b.rules_text);
  EXPECT_EQ(a.unit, b.unit);
  EXPECT_EQ(a.skb.entailed(), b.skb.entailed());
  spec.seed = 43;
  EXPECT_NE(make_random(spec).facts_text, a.facts_text);
}

TEST(Random, ZeroDensityGivesTopAtomsOnly) {
  RandomSpec spec;
  spec.density = 0;
  Fixture fx = make_random(spec);
  for (const auto& a : fx.skb.kb().data()) EXPECT_TRUE(a.is_top());
}

TEST(Random, SummariesSatisfyContract) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomSpec spec;
    spec.seed = seed;
    spec.selector = SelectorKind::neighborhood;
    spec.rules = 2;
    Fixture fx = make_random(spec);
    for (const auto& t : fx.unit.tuples()) EXPECT_NO_THROW(validate_summary(fx.skb, t, fx.skb.summary(t)));
  }
}

TEST(Fixture, WrittenFilesParseBack) {
  auto dir = std::filesystem::temp_directory_path() / "nexus_fixture_test";
  std::filesystem::remove_all(dir);
  Fixture fx = make_prime_cycles(2);
  write_fixture(fx, dir);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  KnowledgeBase kb = parse_kb(slurp(dir / "facts.nx"), slurp(dir / "rules.nx"));
  EXPECT_EQ(kb.data(), fx.skb.kb().data());
  SelectorSpec spec = parse_summary_table(slurp(dir / "summaries.nx"));
  EXPECT_EQ(spec.table, fx.skb.selector().table);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace nexus
