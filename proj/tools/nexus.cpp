// Command-line front end. Exit codes: 0 ok, 2 parse/usage, 3 semantic,
// 4 cap exceeded.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nexus/charact.hpp"
#include "nexus/errors.hpp"
#include "nexus/expansion.hpp"
#include "nexus/fixtures.hpp"
#include "nexus/kb.hpp"
#include "nexus/service.hpp"

namespace {

using namespace nexus;

constexpr int kExitParse = 2;
constexpr int kExitSemantic = 3;
constexpr int kExitCap = 4;

struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write " + path);
  out << text;
}

struct KbArgs {
  std::string facts;
  std::string rules;
  std::string selector = "neighborhood";
  std::string unit;
  std::size_t product_cap = kDefaultProductCap;

  void attach(CLI::App* cmd, bool needs_unit = true) {
    cmd->add_option("--facts", facts, "facts file")->required();
    cmd->add_option("--rules", rules, "rules file");
    cmd->add_option("--selector", selector, "neighborhood | full | table:PATH");
    auto* u = cmd->add_option("--unit", unit, "unit tuples, e.g. \"a,b;c,d\"");
    if (needs_unit) u->required();
    cmd->add_option("--product-cap", product_cap, "maximum product size");
  }

  SelectiveKB load() const {
    std::string rules_text = rules.empty() ? "" : slurp(rules);
    SelectorSpec spec;
    if (selector == "neighborhood")
      spec = SelectorSpec::neighborhood();
    else if (selector == "full")
      spec = SelectorSpec::full();
    else if (selector.rfind("table:", 0) == 0)
      spec = parse_summary_table(slurp(selector.substr(6)));
    else
      throw ParseError("unknown selector '" + selector + "'");
    return SelectiveKB(parse_kb(slurp(facts), rules_text), std::move(spec));
  }
  CharactOptions options() const { return CharactOptions{product_cap}; }
};

template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ResourceError& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return kExitCap;
  } catch (const SemanticError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSemantic;
  }
}

std::string tuple_text(const Tuple& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) out += (i ? "," : "") + to_string(t[i]);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nexus: characterize and expand entity tuples over a knowledge base"};
  app.require_subcommand(1);

  KbArgs can_args, core_args, ess_args, cmp_args, graph_args, expl_args;
  auto* can = app.add_subcommand("can", "print the canonical characterization");
  can_args.attach(can);
  auto* core = app.add_subcommand("core", "print the core characterization");
  core_args.attach(core);

  auto* ess_cmd = app.add_subcommand("ess", "essential expansion, or membership with --tuple");
  ess_args.attach(ess_cmd);
  std::string ess_tuple;
  ess_cmd->add_option("--tuple", ess_tuple, "tuple to test");

  auto* cmp = app.add_subcommand("compare", "relate two candidate tuples");
  cmp_args.attach(cmp);
  std::string tau, tau_prime;
  cmp->add_option("--tau", tau)->required();
  cmp->add_option("--tau-prime", tau_prime)->required();

  auto* expl = app.add_subcommand("explains", "check whether a formula explains / characterizes the unit");
  expl_args.attach(expl);
  std::string formula_text;
  expl->add_option("--formula", formula_text)->required();

  auto* graph = app.add_subcommand("graph", "build the expansion graph");
  graph_args.attach(graph);
  std::string out_json, out_dot;
  std::size_t cap = kDefaultCandidateCap;
  bool partial = false;
  graph->add_option("--out", out_json, "JSON output file");
  graph->add_option("--dot", out_dot, "DOT output file");
  graph->add_option("--cap", cap, "candidate tuple cap");
  graph->add_flag("--partial", partial, "truncate the candidate set at the cap instead of failing");

  auto* serve = app.add_subcommand("serve", "run the HTTP service on loopback");
  ServiceConfig scfg = ServiceConfig::from_env();
  serve->add_option("--port", scfg.port, "port (default NEXUS_PORT or 7878)");
  serve->add_option("--host", scfg.host, "bind address");

  auto* fixture = app.add_subcommand("fixture", "emit a generated instance as files");
  std::string kind;
  int m = 2;
  RandomSpec rspec;
  std::string out_dir = ".";
  fixture->add_option("kind", kind, "themepark | prime-cycles | random")->required();
  fixture->add_option("-m", m, "number of cycles (prime-cycles)");
  fixture->add_option("--seed", rspec.seed, "random seed");
  fixture->add_option("--entities", rspec.entities);
  fixture->add_option("--predicates", rspec.predicates);
  fixture->add_option("--density", rspec.density);
  fixture->add_option("--rules", rspec.rules, "number of random rules");
  fixture->add_option("--out-dir", out_dir, "directory for facts.nx / rules.nx / summaries.nx");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  if (can->parsed() || core->parsed()) {
    const KbArgs& a = can->parsed() ? can_args : core_args;
    return guarded([&] {
      SelectiveKB skb = a.load();
      Unit u = parse_unit(a.unit);
      ConjunctiveFormula f = can->parsed() ? build_can(skb, u, a.options()) : build_core(skb, u, a.options());
      std::cout << render_formula(f) << "\n";
      return 0;
    });
  }
  if (ess_cmd->parsed()) {
    return guarded([&] {
      SelectiveKB skb = ess_args.load();
      Unit u = parse_unit(ess_args.unit);
      if (!ess_tuple.empty()) {
        std::cout << (in_ess(skb, u, parse_tuple(ess_tuple), ess_args.options()) ? "true" : "false") << "\n";
      } else {
        for (const auto& t : ess(skb, u, ess_args.options())) std::cout << tuple_text(t) << "\n";
      }
      return 0;
    });
  }
  if (cmp->parsed()) {
    return guarded([&] {
      SelectiveKB skb = cmp_args.load();
      Comparison c = compare(skb, parse_unit(cmp_args.unit), parse_tuple(tau), parse_tuple(tau_prime), cmp_args.options());
      std::cout << to_string(c.relation) << "\n";
      return 0;
    });
  }
  if (expl->parsed()) {
    return guarded([&] {
      SelectiveKB skb = expl_args.load();
      Unit u = parse_unit(expl_args.unit);
      ConjunctiveFormula f = parse_formula(formula_text);
      bool e = explains(f, u, skb);
      bool c = e && characterizes(f, u, skb, expl_args.options());
      std::cout << "explains " << (e ? "true" : "false") << "\ncharacterizes " << (c ? "true" : "false") << "\n";
      return 0;
    });
  }
  if (graph->parsed()) {
    return guarded([&] {
      SelectiveKB skb = graph_args.load();
      GraphOptions opt;
      opt.candidate_cap = cap;
      opt.allow_partial = partial;
      opt.charact = graph_args.options();
      ExpansionGraph g = build_expansion_graph(skb, parse_unit(graph_args.unit), opt);
      std::string json = export_graph(g, GraphFormat::json);
      if (!out_json.empty()) spill(out_json, json);
      if (!out_dot.empty()) spill(out_dot, export_graph(g, GraphFormat::dot));
      if (out_json.empty() && out_dot.empty()) std::cout << json;
      return 0;
    });
  }
  if (serve->parsed()) {
    Service service(scfg);
    std::cerr << "nexus: serving on http://" << scfg.host << ":" << scfg.port << "\n";
    if (!service.listen()) {
      std::cerr << "error: cannot bind " << scfg.host << ":" << scfg.port << "\n";
      return 1;
    }
    return 0;
  }
  if (fixture->parsed()) {
    return guarded([&] {
      Fixture f = kind == "themepark"      ? make_themepark()
                  : kind == "prime-cycles" ? make_prime_cycles(m)
                  : kind == "random"       ? make_random(rspec)
                                           : throw ParseError("unknown fixture '" + kind + "'");
      write_fixture(f, out_dir);
      std::cout << "selector " << (f.selector == "table" ? "table:" + (std::filesystem::path(out_dir) / "summaries.nx").string() : f.selector) << "\n"
                << "unit " << render_unit(f.unit) << "\n";
      return 0;
    });
  }
  return kExitParse;
}
