#include "nexus/fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "nexus/errors.hpp"

namespace nexus {

namespace {

// Edges of the theme-park knowledge graph.
constexpr const char* kThemeparkFacts = R"(% Theme parks and their locations.
located(discovery_cove, florida).
located(epcot, florida).
located(prater, austria).
located(pacific_park, california).
located(gardaland, italy).
located(leolandia, italy).
partOf(florida, us).
partOf(california, us).
isa(discovery_cove, theme_park).
isa(theme_park, amusement_park).
isa(epcot, theme_park).
isa(prater, amusement_park).
isa(pacific_park, amusement_park).
isa(leolandia, amusement_park).
isa(gardaland, theme_park).
)";

constexpr const char* kThemeparkRules = "isa(X, Z) :- isa(X, Y), isa(Y, Z).\n";

std::vector<int> first_primes(int m) {
  std::vector<int> out;
  for (int n = 2; static_cast<int>(out.size()) < m; ++n) {
    bool prime = true;
    for (int p : out)
      if (n % p == 0) {
        prime = false;
        break;
      }
    if (prime) out.push_back(n);
  }
  return out;
}

Fixture assemble(std::string facts, std::string rules, std::string summaries, std::string selector,
                 const Unit& unit) {
  SelectorSpec spec = selector == "table"  ? parse_summary_table(summaries)
                      : selector == "full" ? SelectorSpec::full()
                                           : SelectorSpec::neighborhood();
  SelectiveKB skb(parse_kb(facts, rules), std::move(spec));
  return Fixture{std::move(skb), unit, std::move(facts), std::move(rules), std::move(summaries), std::move(selector)};
}

Term c(const std::string& name) { return Term::constant(name); }

}  // namespace

Fixture make_themepark() {
  return assemble(kThemeparkFacts, kThemeparkRules, "", "neighborhood",
                  Unit{{c("discovery_cove")}, {c("epcot")}});
}

Fixture make_prime_cycles(int m) {
  if (m < 1) throw SemanticError("prime-cycle family needs m >= 1");
  if (m > kMaxPrimeCycles)
    throw ResourceError("prime-cycle family is limited to m <= " + std::to_string(kMaxPrimeCycles),
                        kMaxPrimeCycles, static_cast<std::size_t>(m));
  std::string facts;
  std::map<Tuple, Dataset> table;
  std::set<Tuple> unit;
  std::vector<int> primes = first_primes(m);
  for (int i = 1; i <= m; ++i) {
    int p = primes[i - 1];
    auto name = [&](int j) { return "c" + std::to_string(i) + "_" + std::to_string((j - 1) % p + 1); };
    Dataset cycle;
    for (int j = 1; j <= p; ++j) {
      cycle.insert(Atom("r", {c(name(j)), c(name(j + 1))}));
      cycle.insert(top_atom(c(name(j))));
    }
    for (const auto& a : cycle) facts += to_string(a) + ".\n";
    table.emplace(Tuple{c(name(1))}, std::move(cycle));
    unit.insert(Tuple{c(name(1))});
  }
  std::string summaries = render_summary_table(SelectorSpec::from_table(std::move(table)));
  return assemble(std::move(facts), "", std::move(summaries), "table", Unit(std::move(unit)));
}

Fixture make_random(const RandomSpec& spec) {
  if (spec.entities == 0) throw SemanticError("random fixture needs at least one entity");
  if (spec.max_arity == 0) throw SemanticError("random fixture needs max_arity >= 1");
  if (spec.unit_arity == 0 || spec.unit_size == 0) throw SemanticError("random fixture needs a nonempty unit");
  std::mt19937_64 rng(spec.seed);
  auto uniform = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::bernoulli_distribution coin(std::clamp(spec.density, 0.0, 1.0));

  std::vector<std::string> entities;
  for (std::size_t i = 0; i < spec.entities; ++i) entities.push_back("e" + std::to_string(i));
  std::vector<std::pair<std::string, std::size_t>> preds;
  for (std::size_t i = 0; i < spec.predicates; ++i)
    preds.emplace_back("p" + std::to_string(i), uniform(1, spec.max_arity));

  Dataset data;
  for (const auto& e : entities) data.insert(top_atom(c(e)));
  for (const auto& [p, k] : preds) {
    std::vector<std::size_t> pos(k, 0);
    while (true) {
      if (coin(rng)) {
        std::vector<Term> args;
        for (std::size_t q : pos) args.push_back(c(entities[q]));
        data.insert(Atom(p, std::move(args)));
      }
      std::size_t i = k;
      while (i > 0 && ++pos[i - 1] == entities.size()) pos[--i] = 0;
      if (i == 0) break;
    }
  }
  std::string facts;
  for (const auto& a : data) facts += to_string(a) + ".\n";

  std::vector<std::string> binary, unary;
  for (const auto& [p, k] : preds) {
    if (k == 1) unary.push_back(p);
    if (k == 2) binary.push_back(p);
  }
  std::string rules;
  for (std::size_t r = 0; r < spec.rules; ++r) {
    std::size_t kind = uniform(0, 2);
    if (!binary.empty() && kind == 0) {
      const auto& p = binary[uniform(0, binary.size() - 1)];
      rules += p + "(X, Z) :- " + p + "(X, Y), " + p + "(Y, Z).\n";
    } else if (binary.size() >= 1 && kind == 1) {
      const auto& p = binary[uniform(0, binary.size() - 1)];
      const auto& q = binary[uniform(0, binary.size() - 1)];
      rules += q + "(Y, X) :- " + p + "(X, Y).\n";
    } else if (!binary.empty() && !unary.empty()) {
      const auto& p = binary[uniform(0, binary.size() - 1)];
      const auto& q = unary[uniform(0, unary.size() - 1)];
      rules += q + "(X) :- " + p + "(X, Y).\n";
    } else if (unary.size() >= 2) {
      const auto& p = unary[uniform(0, unary.size() - 1)];
      const auto& q = unary[uniform(0, unary.size() - 1)];
      if (p != q) rules += q + "(X) :- " + p + "(X).\n";
    }
  }

  std::size_t possible = 1;
  for (std::size_t i = 0; i < spec.unit_arity && possible <= spec.unit_size; ++i) possible *= entities.size();
  std::size_t want = std::min(spec.unit_size, possible);
  std::set<Tuple> unit;
  while (unit.size() < want) {
    Tuple t;
    for (std::size_t i = 0; i < spec.unit_arity; ++i) t.push_back(c(entities[uniform(0, entities.size() - 1)]));
    unit.insert(std::move(t));
  }
  std::string selector = spec.selector == SelectorKind::neighborhood ? "neighborhood" : "full";
  return assemble(std::move(facts), std::move(rules), "", std::move(selector), Unit(std::move(unit)));
}

void write_fixture(const Fixture& f, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw SemanticError("cannot write " + (dir / name).string());
    out << text;
  };
  put("facts.nx", f.facts_text);
  put("rules.nx", f.rules_text);
  if (!f.summaries_text.empty()) put("summaries.nx", f.summaries_text);
}

}  // namespace nexus
