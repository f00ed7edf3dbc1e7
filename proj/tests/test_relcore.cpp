#include <gtest/gtest.h>

#include "nexus/errors.hpp"
#include "nexus/relcore.hpp"
#include "oracles.hpp"

namespace nexus {
namespace {

Term c(const std::string& n) { return Term::constant(n); }
Term v(const std::string& n) { return Term::variable(n); }
Atom A(const std::string& p, std::vector<Term> args) { return Atom(p, std::move(args)); }

AtomSet directed_cycle(std::size_t n, const std::string& prefix, bool vars) {
  AtomSet s;
  for (std::size_t i = 0; i < n; ++i) {
    auto t = [&](std::size_t k) {
      std::string name = prefix + std::to_string(k % n);
      return vars ? v(name) : c(name);
    };
    s.insert(A("edge", {t(i), t(i + 1)}));
  }
  return s;
}

TEST(Term, EqualityCoversKindNameAndIndex) {
  EXPECT_EQ(c("a"), c("a"));
  EXPECT_NE(c("a"), v("a"));
  EXPECT_NE(Term::indexed(TermKind::variable, "X", {"a", "b"}), Term::indexed(TermKind::variable, "X", {"a", "c"}));
  EXPECT_EQ(Term::indexed(TermKind::constant, "d", {"a"}), Term::indexed(TermKind::constant, "d", {"a"}));
  EXPECT_THROW(c(""), SemanticError);
}

TEST(Term, Rendering) {
  EXPECT_EQ(to_string(c("epcot")), "epcot");
  EXPECT_EQ(to_string(c("1")), "1");
  EXPECT_EQ(to_string(c("Epcot")), "\"Epcot\"");
  EXPECT_EQ(to_string(v("X")), "X");
  EXPECT_EQ(to_string(Term::indexed(TermKind::variable, "X", {"a", "b"})), "X[a,b]");
  EXPECT_EQ(to_string(A("p", {c("a"), v("Y")})), "p(a,Y)");
}

TEST(Atom, TopHasArityOne) {
  EXPECT_THROW(A("top", {c("a"), c("b")}), SemanticError);
  EXPECT_NO_THROW(top_atom(c("a")));
  EXPECT_THROW(A("", {c("a")}), SemanticError);
}

TEST(Domain, Examples) {
  EXPECT_TRUE(domain_of({}).empty());
  EXPECT_EQ(domain_of({A("p", {c("a"), c("b")}), A("r", {c("a")})}), (std::set<Term>{c("a"), c("b")}));
  EXPECT_EQ(domain_of({A("p", {c("1"), c("2")}), top_atom(c("1"))}), (std::set<Term>{c("1"), c("2")}));
}

TEST(CloseUnderTop, Examples) {
  AtomSet s{A("p", {c("1"), c("2")}), top_atom(c("1"))};
  EXPECT_EQ(close_under_top(s), (AtomSet{A("p", {c("1"), c("2")}), top_atom(c("1")), top_atom(c("2"))}));
  EXPECT_TRUE(close_under_top({}).empty());
  EXPECT_EQ(close_under_top({top_atom(c("a"))}), AtomSet{top_atom(c("a"))});
}

TEST(Connectivity, Examples) {
  EXPECT_TRUE(is_connected({A("p", {c("a"), c("b")}), A("r", {c("a")})}));
  EXPECT_FALSE(is_connected({A("p", {c("a"), c("b")}), A("r", {c("a")}), A("r", {c("1")})}));
  EXPECT_TRUE(is_connected({A("q", {v("x")})}));
  EXPECT_THROW(is_connected({}), SemanticError);
}

TEST(Homomorphism, PinnedPath) {
  AtomSet src{A("p", {v("x"), v("y")}), A("q", {v("y"), v("z")}), A("r", {v("z")})};
  AtomSet dst{A("p", {c("a"), c("b")}), A("q", {c("b"), c("c")}), A("r", {c("c")}),
              A("p", {c("d"), c("e")}), A("q", {c("e"), c("f")}), A("r", {c("f")})};
  auto h = find_homomorphism(src, dst, {{v("x"), c("a")}});
  ASSERT_TRUE(h);
  EXPECT_EQ(*h, (TermMapping{{v("x"), c("a")}, {v("y"), c("b")}, {v("z"), c("c")}}));
  EXPECT_TRUE(is_homomorphism(src, dst, *h));
  EXPECT_FALSE(find_homomorphism(src, dst, {{v("x"), c("b")}}));
}

TEST(Homomorphism, IdentityOnEqualStructures) {
  AtomSet s{A("p", {v("x"), c("a")}), A("q", {v("x")})};
  TermMapping id{{v("x"), v("x")}, {c("a"), c("a")}};
  auto h = find_homomorphism(s, s, id);
  ASSERT_TRUE(h);
  EXPECT_EQ(h->at(v("x")), v("x"));
}

TEST(Homomorphism, ConstantsAreFixed) {
  EXPECT_FALSE(find_homomorphism({A("p", {c("a")})}, {A("p", {c("b")})}));
  EXPECT_TRUE(find_homomorphism({A("p", {c("a")})}, {A("p", {c("a")}), A("p", {c("b")})}));
}

TEST(Homomorphism, OddCycleColoring) {
  AtomSet cycle;
  for (int i = 0; i < 7; ++i) {
    Term a = v("n" + std::to_string(i)), b = v("n" + std::to_string((i + 1) % 7));
    cycle.insert(A("edge", {a, b}));
    cycle.insert(A("edge", {b, a}));
  }
  AtomSet clique;
  for (const char* x : {"r", "g", "b"})
    for (const char* y : {"r", "g", "b"})
      if (std::string(x) != y) clique.insert(A("edge", {c(x), c(y)}));
  auto h = find_homomorphism(cycle, clique);
  ASSERT_TRUE(h);
  EXPECT_TRUE(is_homomorphism(cycle, clique, *h));
  HomSearch search(cycle, clique);
  EXPECT_EQ(search.count(), oracle::count_homs(cycle, clique));

  AtomSet two{A("edge", {c("r"), c("g")}), A("edge", {c("g"), c("r")})};
  EXPECT_FALSE(find_homomorphism(cycle, two));
  EXPECT_FALSE(oracle::exists_hom(cycle, two));
}

TEST(Homomorphism, Projection) {
  AtomSet src{A("p", {v("x"), v("y")})};
  AtomSet dst{A("p", {c("a"), c("b")}), A("p", {c("a"), c("c")}), A("p", {c("d"), c("b")})};
  HomSearch s(src, dst);
  EXPECT_EQ(s.project({v("x")}), (std::set<Tuple>{{c("a")}, {c("d")}}));
  EXPECT_EQ(s.project({v("y"), v("x")}), (std::set<Tuple>{{c("b"), c("a")}, {c("c"), c("a")}, {c("b"), c("d")}}));
  EXPECT_EQ(s.count(), 3u);
  EXPECT_EQ(s.count({}, 2), 2u);
}

TEST(Isomorphism, Examples) {
  AtomSet s{A("p", {v("x"), v("y")}), A("q", {v("y")})};
  EXPECT_TRUE(is_isomorphic(s, s));
  EXPECT_FALSE(is_isomorphic(directed_cycle(2, "u", true), directed_cycle(3, "w", true)));
  EXPECT_FALSE(oracle::isomorphic(directed_cycle(2, "u", true), directed_cycle(3, "w", true)));
  EXPECT_TRUE(is_isomorphic({A("p", {v("x"), v("y")})}, {A("p", {v("u"), v("v")})}));
  // Homomorphically equivalent but not isomorphic.
  EXPECT_FALSE(is_isomorphic({A("p", {v("x"), v("y")})}, {A("p", {v("x"), v("y")}), A("p", {v("x"), v("z")})}));
}

TEST(Isomorphism, VariablesNeverLandOnConstants) {
  // The injective map y -> k is a hom, but its inverse would move a constant.
  AtomSet s1{A("q", {v("x")}), A("r", {v("z"), v("y")})};
  AtomSet s2{A("q", {v("x")}), A("r", {v("z"), c("k")})};
  EXPECT_FALSE(is_isomorphic(s1, s2));
  EXPECT_FALSE(is_isomorphic(s2, s1));
  EXPECT_FALSE(oracle::isomorphic(s1, s2));
}

TEST(Homomorphism, AgreesWithExhaustiveEnumeration) {
  oracle::Gen gen(17);
  for (int round = 0; round < 150; ++round) {
    std::vector<Term> sv, dv;
    std::size_t ns = gen.uniform(1, 4), nd = gen.uniform(1, 4);
    for (std::size_t i = 0; i < ns; ++i) sv.push_back(gen.variable(i));
    for (std::size_t i = 0; i < nd; ++i) dv.push_back(gen.constant(i));
    if (gen.coin(0.5)) sv.push_back(gen.constant(0));
    AtomSet src = gen.structure(sv, gen.uniform(1, 4));
    AtomSet dst = gen.structure(dv, gen.uniform(1, 8));
    HomSearch s(src, dst);
    ASSERT_EQ(s.count(), oracle::count_homs(src, dst)) << to_string(src) << " -> " << to_string(dst);
    ASSERT_EQ(s.find().has_value(), oracle::exists_hom(src, dst));
    if (auto h = s.find()) ASSERT_TRUE(is_homomorphism(src, dst, *h));
  }
}

}  // namespace
}  // namespace nexus
