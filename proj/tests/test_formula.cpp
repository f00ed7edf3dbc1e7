#include <gtest/gtest.h>

#include "nexus/errors.hpp"
#include "nexus/formula.hpp"
#include "oracles.hpp"
#include "themepark_expected.hpp"

namespace nexus {
namespace {

using expected::kFormulaA;
using expected::kFormulaB;
using expected::kFormulaC;
using expected::kFormulaD;
using expected::kFormulaE;
using expected::kFormulaF;

Term c(const std::string& n) { return Term::constant(n); }
Term v(const std::string& n) { return Term::variable(n); }
ConjunctiveFormula F(const char* text) { return parse_formula(text); }

TEST(ParseFormula, Examples) {
  ConjunctiveFormula f = F("X <- city(X), located(X,europe).");
  EXPECT_EQ(f.arity(), 1u);
  EXPECT_EQ(f.size(), 2u);
  EXPECT_TRUE(f.body().count(Atom("located", {v("X"), c("europe")})));

  ConjunctiveFormula top = F("X <- top(X).");
  EXPECT_EQ(top.body(), AtomSet{top_atom(v("X"))});
  EXPECT_THROW(F("X <-"), ParseError);
  EXPECT_THROW(F("X <- p(X"), ParseError);
  EXPECT_THROW(F("X <- p(Y)."), ParseError);
}

TEST(ParseFormula, LineAndColumn) {
  try {
    F("X <- p(X),\n  q(X");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 0u);
  }
}

TEST(ParseFormula, RoundTrip) {
  for (const char* text : {kFormulaA, kFormulaB, kFormulaC, kFormulaD, kFormulaE, kFormulaF,
                           "X,Y <- p(X,Y), q(Y,\"Big Apple\")."}) {
    ConjunctiveFormula f = F(text);
    EXPECT_EQ(parse_formula(render_formula(f)), f) << text;
  }
}

TEST(ParseFormula, RepeatedFreeVariables) {
  ConjunctiveFormula f = F("X,X <- p(X).");
  EXPECT_EQ(f.arity(), 2u);
  EXPECT_EQ(evaluate(f, {Atom("p", {c("a")})}), (std::set<Tuple>{{c("a"), c("a")}}));
}

TEST(NearlyConnected, Examples) {
  EXPECT_TRUE(is_nearly_connected(F(kFormulaD)));
  EXPECT_FALSE(is_nearly_connected(F("X <- p(X), q(a,b).")));
  EXPECT_TRUE(is_nearly_connected(F("X <- p(X).")));
  // Constants connect: florida links partOf(florida,us) to X.
  EXPECT_TRUE(is_nearly_connected(F(kFormulaA)));
  EXPECT_FALSE(is_nearly_connected(F("X <- p(X), q(Y,Z).")));
}

TEST(Evaluate, PathExample) {
  Dataset d{Atom("p", {c("a"), c("b")}), Atom("q", {c("b"), c("c")}), Atom("r", {c("c")}),
            Atom("p", {c("d"), c("e")}), Atom("q", {c("e"), c("f")}), Atom("r", {c("f")})};
  ConjunctiveFormula f = F("X <- p(X,Y), q(Y,Z), r(Z).");
  EXPECT_EQ(evaluate(f, d), (std::set<Tuple>{{c("a")}, {c("d")}}));
  EXPECT_TRUE(holds_at(f, d, {c("a")}));
  EXPECT_FALSE(holds_at(f, d, {c("b")}));
  EXPECT_TRUE(evaluate(F("X <- s(X)."), d).empty());
}

TEST(Evaluate, AgreesWithExhaustiveEnumeration) {
  oracle::Gen gen(5);
  for (int round = 0; round < 200; ++round) {
    ConjunctiveFormula f = gen.formula(gen.uniform(1, 2), gen.uniform(1, 3), gen.uniform(0, 1), gen.uniform(1, 4));
    std::vector<Term> dom;
    for (std::size_t i = 0; i < gen.uniform(1, 4); ++i) dom.push_back(gen.constant(i));
    Dataset d = close_under_top(gen.structure(dom, gen.uniform(1, 10)));
    ASSERT_EQ(evaluate(f, d), oracle::evaluate(f, d)) << render_formula(f) << " on " << to_string(d);
  }
}

TEST(HomRelation, FigureExamples) {
  EXPECT_TRUE(maps_to(F(kFormulaE), F(kFormulaA)));
  EXPECT_FALSE(maps_to(F(kFormulaA), F(kFormulaE)));
  EXPECT_TRUE(maps_to(F(kFormulaA), F(kFormulaA)));
  EXPECT_FALSE(maps_to(F(kFormulaB), F(kFormulaC)));
  EXPECT_FALSE(maps_to(F(kFormulaC), F(kFormulaB)));

  ConjunctiveFormula renamed = F("Z <- isa(Z,amusement_park), located(Z,W), top(Z), top(W), top(amusement_park).");
  EXPECT_EQ(hom_relation(F(kFormulaD), renamed), HomRelation::isomorphic);
  EXPECT_EQ(hom_relation(F(kFormulaE), F(kFormulaA)), HomRelation::maps_to_only);
  EXPECT_EQ(hom_relation(F(kFormulaA), F(kFormulaE)), HomRelation::mapped_from_only);
  EXPECT_EQ(hom_relation(F(kFormulaB), F(kFormulaC)), HomRelation::incomparable);
  EXPECT_EQ(hom_relation(F("X <- p(X,Y)."), F("X <- p(X,Y), p(X,Z).")), HomRelation::equivalent);
  EXPECT_THROW(maps_to(F("X <- p(X)."), F("X,Y <- p(X), p(Y).")), SemanticError);
}

TEST(Core, Examples) {
  EXPECT_EQ(core_of(F("X <- p(X,Y), p(X,Z).")).size(), 1u);
  EXPECT_TRUE(is_isomorphic(core_of(F("X <- p(X,Y), p(X,Z).")), F("X <- p(X,Y).")));
  EXPECT_EQ(core_of(F(kFormulaF)), F(kFormulaF));
  ConjunctiveFormula cycle = F("X <- r(X,Y), r(Y,X), r(Z,U), r(U,V), r(V,Z).");
  EXPECT_EQ(core_of(cycle).size(), cycle.size());
  // Free variables are never folded.
  EXPECT_EQ(core_of(F("X,Y <- p(X,Z), p(Y,Z).")).size(), 2u);
}

TEST(Core, AgreesWithExhaustiveSearch) {
  oracle::Gen gen(11);
  for (int round = 0; round < 150; ++round) {
    ConjunctiveFormula f = gen.formula(gen.uniform(1, 2), gen.uniform(2, 5), gen.uniform(0, 1), gen.uniform(2, 6));
    ConjunctiveFormula got = core_of(f);
    ConjunctiveFormula want = oracle::core(f);
    ASSERT_EQ(got.size(), want.size()) << render_formula(f);
    ASSERT_TRUE(oracle::isomorphic(got, want)) << render_formula(f);
    ASSERT_TRUE(equivalent(got, f));
  }
}

}  // namespace
}  // namespace nexus
