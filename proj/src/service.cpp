#include "nexus/service.hpp"

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <json.hpp>
#include <map>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <thread>
#include <vector>

#include "nexus/errors.hpp"

namespace nexus {

using json = nlohmann::ordered_json;

namespace {

std::size_t env_size(const char* name, std::size_t fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  try {
    return static_cast<std::size_t>(std::stoull(v));
  } catch (const std::exception&) {
    return fallback;
  }
}

// Carries a ready-made HTTP error out of the handlers.
struct HttpError {
  int status;
  std::string code;
  std::string message;
  json detail = json::object();
};

HttpReply error_reply(const HttpError& e) {
  json body{{"code", e.code}, {"message", e.message}, {"detail", e.detail}};
  return HttpReply{e.status, body.dump()};
}

HttpReply ok(int status, const json& body) { return HttpReply{status, body.dump()}; }

json tuple_json(const Tuple& t) {
  json arr = json::array();
  for (const auto& c : t) arr.push_back(c.name());
  return arr;
}

json tuples_json(const std::set<Tuple>& ts) {
  json arr = json::array();
  for (const auto& t : ts) arr.push_back(tuple_json(t));
  return arr;
}

Tuple tuple_from(const json& v) {
  if (v.is_string()) return parse_tuple(v.get<std::string>());
  if (!v.is_array() || v.empty()) throw HttpError{422, "invalid_unit", "tuple must be a nonempty array of constants"};
  Tuple t;
  for (const auto& c : v) {
    if (!c.is_string()) throw HttpError{422, "invalid_unit", "tuple entries must be strings"};
    t.push_back(Term::constant(c.get<std::string>()));
  }
  return t;
}

Unit unit_from(const json& body) {
  if (!body.contains("unit")) throw HttpError{422, "invalid_unit", "missing field 'unit'"};
  const json& v = body["unit"];
  try {
    if (v.is_string()) return parse_unit(v.get<std::string>());
    if (!v.is_array() || v.empty()) throw HttpError{422, "invalid_unit", "unit must be a nonempty array of tuples"};
    std::set<Tuple> tuples;
    for (const auto& t : v) tuples.insert(tuple_from(t));
    return Unit(std::move(tuples));
  } catch (const SemanticError& e) {
    throw HttpError{422, "invalid_unit", e.what()};
  } catch (const ParseError& e) {
    throw HttpError{422, "invalid_unit", e.what()};
  }
}

struct Job {
  std::string status = "running";
  HttpReply reply;
};

struct Session {
  std::string id;
  std::shared_ptr<const SelectiveKB> skb;
  std::chrono::system_clock::time_point created;
  std::size_t candidate_cap;
  std::size_t product_cap;

  std::mutex mutex;  // guards jobs and graphs
  std::map<std::string, Job> jobs;
  std::map<std::string, std::shared_ptr<const ExpansionGraph>> graphs;
  std::size_t next_job = 1;
};

json graph_node_json(const ExpansionGraph& g, std::size_t id) {
  const auto& n = g.nodes.at(id);
  return json{{"id", n.id},
              {"formula", render_formula(n.formula)},
              {"direct_instances", tuples_json(n.direct_instances)},
              {"is_source", n.is_source}};
}

}  // namespace

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig c;
  c.port = static_cast<int>(env_size("NEXUS_PORT", static_cast<std::size_t>(c.port)));
  c.candidate_cap = env_size("NEXUS_CAP_TUPLES", c.candidate_cap);
  c.product_cap = env_size("NEXUS_CAP_PRODUCT", c.product_cap);
  return c;
}

struct Service::Impl {
  ServiceConfig config;
  std::shared_mutex registry_mutex;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  std::atomic<std::size_t> counter{0};
  std::mt19937_64 rng{std::random_device{}()};
  std::mutex rng_mutex;

  std::mutex workers_mutex;
  std::vector<std::thread> workers;

  httplib::Server server;
  std::thread server_thread;

  std::string fresh_id() {
    std::lock_guard lock(rng_mutex);
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%zu-%08llx", ++counter, static_cast<unsigned long long>(rng() & 0xffffffffu));
    return buf;
  }

  std::shared_ptr<Session> session(const std::string& id) {
    std::shared_lock lock(registry_mutex);
    auto it = sessions.find(id);
    if (it == sessions.end()) throw HttpError{404, "unknown_session", "no session '" + id + "'"};
    return it->second;
  }

  HttpReply create_session(const json& body);
  HttpReply session_info(const Session& s);
  HttpReply run(Session& s, const std::string& op, const json& body);
  std::shared_ptr<const ExpansionGraph> graph_for(Session& s, const Unit& u, std::size_t cap);
  HttpReply job_status(Session& s, const std::string& job);
  HttpReply dispatch(std::string_view method, std::string_view path, std::string_view body);
};

HttpReply Service::Impl::create_session(const json& body) {
  auto text = [&](const char* key, bool required) -> std::string {
    if (!body.contains(key)) {
      if (required) throw HttpError{400, "parse_error", std::string("missing field '") + key + "'"};
      return "";
    }
    if (!body[key].is_string()) throw HttpError{400, "parse_error", std::string("field '") + key + "' must be a string"};
    return body[key].get<std::string>();
  };
  std::string facts = text("facts", true);
  std::string rules = text("rules", false);
  std::string selector = body.contains("selector") && body["selector"].is_string()
                             ? body["selector"].get<std::string>()
                             : "neighborhood";
  SelectorSpec spec;
  try {
    if (selector == "neighborhood")
      spec = SelectorSpec::neighborhood();
    else if (selector == "full")
      spec = SelectorSpec::full();
    else if (selector == "table")
      spec = parse_summary_table(text("summaries", true));
    else
      throw HttpError{400, "parse_error", "unknown selector '" + selector + "'"};
    auto skb = std::make_shared<const SelectiveKB>(parse_kb(facts, rules), std::move(spec));
    auto s = std::make_shared<Session>();
    s->id = fresh_id();
    s->skb = std::move(skb);
    s->created = std::chrono::system_clock::now();
    s->candidate_cap = config.candidate_cap;
    s->product_cap = config.product_cap;
    {
      std::unique_lock lock(registry_mutex);
      sessions.emplace(s->id, s);
    }
    HttpReply r = session_info(*s);
    r.status = 201;
    return r;
  } catch (const ParseError& e) {
    throw HttpError{400, "parse_error", e.bare_message(), json{{"line", e.line()}, {"column", e.column()}}};
  } catch (const SemanticError& e) {
    throw HttpError{400, "parse_error", e.what()};
  }
}

HttpReply Service::Impl::session_info(const Session& s) {
  KbStats st = s.skb->stats();
  auto created = std::chrono::duration_cast<std::chrono::seconds>(s.created.time_since_epoch()).count();
  return ok(200, json{{"session_id", s.id},
                      {"stats",
                       {{"facts", st.facts}, {"entailed", st.entailed}, {"entities", st.entities}, {"max_arity", st.max_arity}}},
                      {"created", created}});
}

std::shared_ptr<const ExpansionGraph> Service::Impl::graph_for(Session& s, const Unit& u, std::size_t cap) {
  std::string key = render_unit(u) + "#" + std::to_string(cap);
  {
    std::lock_guard lock(s.mutex);
    auto it = s.graphs.find(key);
    if (it != s.graphs.end()) return it->second;
  }
  GraphOptions opt;
  opt.candidate_cap = cap;
  opt.charact.product_cap = s.product_cap;
  auto g = std::make_shared<const ExpansionGraph>(build_expansion_graph(*s.skb, u, opt));
  std::lock_guard lock(s.mutex);
  return s.graphs.emplace(key, g).first->second;
}

HttpReply Service::Impl::run(Session& s, const std::string& op, const json& body) {
  const SelectiveKB& skb = *s.skb;
  CharactOptions copt{s.product_cap};
  Unit u = unit_from(body);
  auto cap = [&] {
    if (!body.contains("cap")) return s.candidate_cap;
    if (!body["cap"].is_number_unsigned()) throw HttpError{400, "parse_error", "field 'cap' must be a nonnegative integer"};
    return body["cap"].get<std::size_t>();
  };
  if (op == "can" || op == "core") {
    ConjunctiveFormula f = op == "can" ? build_can(skb, u, copt) : build_core(skb, u, copt);
    return ok(200, json{{"formula", render_formula(f)}, {"atom_count", f.size()}});
  }
  if (op == "ess") {
    if (body.contains("tuple")) return ok(200, json{{"in_ess", in_ess(skb, u, tuple_from(body["tuple"]), copt)}});
    return ok(200, json{{"ess", tuples_json(ess(skb, u, copt))}});
  }
  if (op == "explains") {
    if (!body.contains("formula") || !body["formula"].is_string())
      throw HttpError{400, "parse_error", "missing string field 'formula'"};
    ConjunctiveFormula f = parse_formula(body["formula"].get<std::string>());
    bool e = explains(f, u, skb);
    bool c = e && characterizes(f, u, skb, copt);
    return ok(200, json{{"explains", e}, {"characterizes", c}});
  }
  if (op == "compare") {
    if (!body.contains("tau") || !body.contains("tau_prime"))
      throw HttpError{422, "invalid_unit", "fields 'tau' and 'tau_prime' are required"};
    Comparison c = compare(skb, u, tuple_from(body["tau"]), tuple_from(body["tau_prime"]), copt);
    return ok(200, json{{"relation", std::string(to_string(c.relation))},
                        {"witness", {{"tau_in_ess_prime", c.tau_in_ess_prime}, {"tau_prime_in_ess", c.tau_prime_in_ess}}}});
  }
  if (op == "graph") {
    std::size_t c = cap();
    if (body.value("async", false)) {
      std::string job_id;
      {
        std::lock_guard lock(s.mutex);
        job_id = "j" + std::to_string(s.next_job++);
        s.jobs[job_id] = Job{};
      }
      std::shared_ptr<Session> keep = session(s.id);
      std::lock_guard wl(workers_mutex);
      workers.emplace_back([this, keep, u, c, job_id] {
        HttpReply r;
        try {
          r = ok(200, json::parse(export_graph(*graph_for(*keep, u, c), GraphFormat::json)));
        } catch (const HttpError& e) {
          r = error_reply(e);
        } catch (const ResourceError& e) {
          r = error_reply(HttpError{413, "cap_exceeded", e.what(), json{{"limit", e.limit()}, {"requested", e.requested()}}});
        } catch (const std::exception& e) {
          r = error_reply(HttpError{422, "semantic_error", e.what()});
        }
        std::lock_guard lock(keep->mutex);
        Job& job = keep->jobs[job_id];
        job.status = r.status == 200 ? "done" : "failed";
        job.reply = std::move(r);
      });
      return ok(202, json{{"job_id", job_id}, {"status", "running"}});
    }
    return ok(200, json::parse(export_graph(*graph_for(s, u, c), GraphFormat::json)));
  }
  if (op == "neighbors") {
    auto g = graph_for(s, u, cap());
    std::size_t node = body.contains("node") ? body["node"].get<std::size_t>() : g->source;
    Neighbors nb = neighbors(*g, node);
    json gens = json::array(), specs = json::array();
    for (auto i : nb.generalizations) gens.push_back(graph_node_json(*g, i));
    for (auto i : nb.specializations) specs.push_back(graph_node_json(*g, i));
    return ok(200, json{{"node", graph_node_json(*g, node)}, {"generalizations", gens}, {"specializations", specs}});
  }
  throw HttpError{404, "not_found", "unknown operation '" + op + "'"};
}

HttpReply Service::Impl::job_status(Session& s, const std::string& job) {
  std::lock_guard lock(s.mutex);
  auto it = s.jobs.find(job);
  if (it == s.jobs.end()) throw HttpError{404, "unknown_job", "no job '" + job + "'"};
  json out{{"job_id", job}, {"status", it->second.status}};
  if (it->second.status != "running") {
    json payload = json::parse(it->second.reply.body);
    out[it->second.status == "done" ? "result" : "error"] = payload;
  }
  return ok(200, out);
}

HttpReply Service::Impl::dispatch(std::string_view method, std::string_view path, std::string_view body_text) {
  try {
    std::vector<std::string> parts;
    std::size_t i = 0;
    while (i < path.size()) {
      while (i < path.size() && path[i] == '/') ++i;
      std::size_t j = path.find('/', i);
      if (j == std::string_view::npos) j = path.size();
      if (j > i) parts.emplace_back(path.substr(i, j - i));
      i = j;
    }
    auto body = [&] {
      if (body_text.empty()) return json::object();
      json b = json::parse(body_text);
      if (!b.is_object()) throw HttpError{400, "parse_error", "request body must be a JSON object"};
      return b;
    };
    if (parts.empty() || parts[0] != "sessions") throw HttpError{404, "not_found", "no route for " + std::string(path)};
    if (parts.size() == 1) {
      if (method != "POST") throw HttpError{405, "method_not_allowed", "use POST /sessions"};
      return create_session(body());
    }
    auto s = session(parts[1]);
    if (parts.size() == 2) {
      if (method != "GET") throw HttpError{405, "method_not_allowed", "use GET /sessions/{id}"};
      return session_info(*s);
    }
    if (parts.size() == 4 && parts[2] == "jobs") {
      if (method != "GET") throw HttpError{405, "method_not_allowed", "use GET for jobs"};
      return job_status(*s, parts[3]);
    }
    if (parts.size() == 3) {
      if (method != "POST") throw HttpError{405, "method_not_allowed", "use POST for session operations"};
      return run(*s, parts[2], body());
    }
    throw HttpError{404, "not_found", "no route for " + std::string(path)};
  } catch (const HttpError& e) {
    return error_reply(e);
  } catch (const json::exception& e) {
    return error_reply(HttpError{400, "parse_error", std::string("malformed JSON: ") + e.what()});
  } catch (const ParseError& e) {
    return error_reply(HttpError{400, "parse_error", e.bare_message(), json{{"line", e.line()}, {"column", e.column()}}});
  } catch (const ResourceError& e) {
    return error_reply(HttpError{413, "cap_exceeded", e.what(), json{{"limit", e.limit()}, {"requested", e.requested()}}});
  } catch (const SemanticError& e) {
    return error_reply(HttpError{422, "invalid_unit", e.what()});
  } catch (const std::exception& e) {
    return error_reply(HttpError{500, "internal_error", e.what()});
  }
}

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    HttpReply r = impl_->dispatch(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
}

Service::~Service() {
  stop();
  std::lock_guard lock(impl_->workers_mutex);
  for (auto& w : impl_->workers)
    if (w.joinable()) w.join();
}

HttpReply Service::handle(std::string_view method, std::string_view path, std::string_view body) {
  return impl_->dispatch(method, path, body);
}

bool Service::listen() { return impl_->server.listen(impl_->config.host, impl_->config.port); }

int Service::start_background() {
  int port = impl_->config.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(impl_->config.host);
  } else if (!impl_->server.bind_to_port(impl_->config.host, port)) {
    port = -1;
  }
  if (port < 0) return -1;
  impl_->server_thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void Service::stop() {
  impl_->server.stop();
  if (impl_->server_thread.joinable()) impl_->server_thread.join();
}

const ServiceConfig& Service::config() const { return impl_->config; }

}  // namespace nexus
