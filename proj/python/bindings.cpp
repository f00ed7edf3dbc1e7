#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nexus/charact.hpp"
#include "nexus/errors.hpp"
#include "nexus/expansion.hpp"
#include "nexus/fixtures.hpp"
#include "nexus/kb.hpp"

namespace py = pybind11;
using namespace nexus;

namespace {

using PyTuple = std::vector<std::string>;

Tuple to_tuple(const py::handle& h) {
  if (py::isinstance<py::str>(h)) return parse_tuple(h.cast<std::string>());
  Tuple t;
  for (const auto& c : h) t.push_back(Term::constant(c.cast<std::string>()));
  return t;
}

Unit to_unit(const py::handle& h) {
  if (py::isinstance<py::str>(h)) return parse_unit(h.cast<std::string>());
  std::set<Tuple> ts;
  for (const auto& t : h) ts.insert(to_tuple(t));
  return Unit(std::move(ts));
}

PyTuple from_tuple(const Tuple& t) {
  PyTuple out;
  for (const auto& c : t) out.push_back(c.name());
  return out;
}

std::vector<PyTuple> from_tuples(const std::set<Tuple>& ts) {
  std::vector<PyTuple> out;
  for (const auto& t : ts) out.push_back(from_tuple(t));
  return out;
}

std::vector<std::string> atom_lines(const Dataset& d) {
  std::vector<std::string> out;
  for (const auto& a : d) out.push_back(to_string(a));
  return out;
}

SelectiveKB load(const std::string& facts, const std::string& rules, const std::string& selector,
                 const std::string& summaries) {
  SelectorSpec spec = selector == "full"           ? SelectorSpec::full()
                      : selector == "table"        ? parse_summary_table(summaries)
                      : selector == "neighborhood" ? SelectorSpec::neighborhood()
                                                   : throw ParseError("unknown selector '" + selector + "'");
  return SelectiveKB(parse_kb(facts, rules), std::move(spec));
}

py::tuple fixture_pair(Fixture f) {
  std::string unit = render_unit(f.unit);
  return py::make_tuple(std::move(f.skb), unit);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Characterizations and expansion graphs over selective knowledge bases";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<SemanticError>(m, "SemanticError", PyExc_ValueError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);

  py::class_<SelectiveKB>(m, "SelectiveKB")
      .def(py::init(&load), py::arg("facts"), py::arg("rules") = "", py::arg("selector") = "neighborhood",
           py::arg("summaries") = "")
      .def_property_readonly("stats",
                             [](const SelectiveKB& s) {
                               KbStats st = s.stats();
                               py::dict d;
                               d["facts"] = st.facts;
                               d["entailed"] = st.entailed;
                               d["entities"] = st.entities;
                               d["max_arity"] = st.max_arity;
                               return d;
                             })
      .def("entailed", [](const SelectiveKB& s) { return atom_lines(s.entailed()); })
      .def("domain",
           [](const SelectiveKB& s) {
             std::vector<std::string> out;
             for (const auto& c : s.domain()) out.push_back(c.name());
             return out;
           })
      .def("summary", [](const SelectiveKB& s, const py::object& t) { return atom_lines(s.summary(to_tuple(t))); })
      .def(
          "can", [](const SelectiveKB& s, const py::object& u) { return render_formula(build_can(s, to_unit(u))); },
          py::arg("unit"))
      .def(
          "core", [](const SelectiveKB& s, const py::object& u) { return render_formula(build_core(s, to_unit(u))); },
          py::arg("unit"))
      .def(
          "ess", [](const SelectiveKB& s, const py::object& u) { return from_tuples(ess(s, to_unit(u))); },
          py::arg("unit"))
      .def(
          "in_ess",
          [](const SelectiveKB& s, const py::object& u, const py::object& t) { return in_ess(s, to_unit(u), to_tuple(t)); },
          py::arg("unit"), py::arg("tuple"))
      .def(
          "compare",
          [](const SelectiveKB& s, const py::object& u, const py::object& t, const py::object& tp) {
            Comparison c = compare(s, to_unit(u), to_tuple(t), to_tuple(tp));
            return py::make_tuple(std::string(to_string(c.relation)), c.tau_in_ess_prime, c.tau_prime_in_ess);
          },
          py::arg("unit"), py::arg("tau"), py::arg("tau_prime"))
      .def(
          "explains",
          [](const SelectiveKB& s, const py::object& u, const std::string& f) {
            return explains(parse_formula(f), to_unit(u), s);
          },
          py::arg("unit"), py::arg("formula"))
      .def(
          "characterizes",
          [](const SelectiveKB& s, const py::object& u, const std::string& f) {
            return characterizes(parse_formula(f), to_unit(u), s);
          },
          py::arg("unit"), py::arg("formula"))
      .def(
          "graph",
          [](const SelectiveKB& s, const py::object& u, std::size_t cap, bool partial, const std::string& format) {
            GraphOptions opt;
            opt.candidate_cap = cap;
            opt.allow_partial = partial;
            ExpansionGraph g = build_expansion_graph(s, to_unit(u), opt);
            return export_graph(g, format == "dot" ? GraphFormat::dot : GraphFormat::json);
          },
          py::arg("unit"), py::arg("cap") = kDefaultCandidateCap, py::arg("partial") = false,
          py::arg("format") = "json");

  m.def("core_of", [](const std::string& f) { return render_formula(core_of(parse_formula(f))); });
  m.def("maps_to", [](const std::string& f, const std::string& g) { return maps_to(parse_formula(f), parse_formula(g)); });
  m.def("equivalent",
        [](const std::string& f, const std::string& g) { return equivalent(parse_formula(f), parse_formula(g)); });
  m.def("is_isomorphic",
        [](const std::string& f, const std::string& g) { return is_isomorphic(parse_formula(f), parse_formula(g)); });
  m.def("evaluate", [](const std::string& f, const std::string& facts) {
    return from_tuples(evaluate(parse_formula(f), parse_kb(facts, "").data()));
  });

  m.def("themepark", [] { return fixture_pair(make_themepark()); });
  m.def(
      "prime_cycles", [](int k) { return fixture_pair(make_prime_cycles(k)); }, py::arg("m"));
  m.def(
      "random_fixture",
      [](std::uint64_t seed, std::size_t entities, std::size_t predicates, double density, std::size_t rules) {
        RandomSpec spec;
        spec.seed = seed;
        spec.entities = entities;
        spec.predicates = predicates;
        spec.density = density;
        spec.rules = rules;
        return fixture_pair(make_random(spec));
      },
      py::arg("seed") = 0, py::arg("entities") = 6, py::arg("predicates") = 2, py::arg("density") = 0.2,
      py::arg("rules") = 0);
}
