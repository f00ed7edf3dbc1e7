#include <gtest/gtest.h>
#include <httplib.h>

#include <chrono>
#include <json.hpp>
#include <thread>

#include "nexus/fixtures.hpp"
#include "nexus/service.hpp"
#include "themepark_expected.hpp"

namespace nexus {
namespace {

using nlohmann::json;

struct Reply {
  int status;
  json body;
};

class ServiceTest : public ::testing::Test {
 protected:
  Service service_;

  Reply call(const std::string& method, const std::string& path, const json& body = json()) {
    HttpReply r = service_.handle(method, path, body.is_null() ? "" : body.dump());
    return {r.status, json::parse(r.body)};
  }

  std::string themepark_session() {
    Fixture fx = make_themepark();
    Reply r = call("POST", "/sessions", {{"facts", fx.facts_text}, {"rules", fx.rules_text}, {"selector", "neighborhood"}});
    EXPECT_EQ(r.status, 201);
    return r.body["session_id"].get<std::string>();
  }
};

TEST_F(ServiceTest, CreateSession) {
  Fixture fx = make_themepark();
  json payload{{"facts", fx.facts_text}, {"rules", fx.rules_text}, {"selector", "neighborhood"}};
  Reply a = call("POST", "/sessions", payload);
  Reply b = call("POST", "/sessions", payload);
  ASSERT_EQ(a.status, 201);
  EXPECT_NE(a.body["session_id"], b.body["session_id"]);
  EXPECT_EQ(a.body["stats"]["entailed"], 18);
  EXPECT_EQ(a.body["stats"]["facts"], 15);
  EXPECT_EQ(a.body["stats"]["max_arity"], 2);
  Reply info = call("GET", "/sessions/" + a.body["session_id"].get<std::string>());
  EXPECT_EQ(info.status, 200);
  EXPECT_EQ(info.body["stats"], a.body["stats"]);
}

TEST_F(ServiceTest, CreateSessionErrors) {
  Reply empty = call("POST", "/sessions", {{"facts", ""}});
  EXPECT_EQ(empty.status, 400);
  EXPECT_EQ(empty.body["code"], "parse_error");
  EXPECT_TRUE(empty.body.contains("message"));
  EXPECT_TRUE(empty.body.contains("detail"));
  Reply bad = call("POST", "/sessions", {{"facts", "p(a).\nq(b"}});
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(bad.body["detail"]["line"], 2);
  HttpReply garbage = service_.handle("POST", "/sessions", "{not json");
  EXPECT_EQ(garbage.status, 400);
  EXPECT_EQ(call("POST", "/sessions", {{"facts", "p(a)."}, {"selector", "weird"}}).status, 400);
}

TEST_F(ServiceTest, CoreAndCan) {
  std::string id = themepark_session();
  Reply core = call("POST", "/sessions/" + id + "/core", {{"unit", "discovery_cove;epcot"}});
  ASSERT_EQ(core.status, 200);
  EXPECT_EQ(core.body["atom_count"], 9);
  Fixture fx = make_themepark();
  EXPECT_EQ(core.body["formula"], render_formula(build_core(fx.skb, fx.unit)));
  EXPECT_TRUE(is_isomorphic(parse_formula(core.body["formula"].get<std::string>()), parse_formula(expected::kFormulaA)));

  Reply can = call("POST", "/sessions/" + id + "/can", {{"unit", json::array({{"discovery_cove"}, {"epcot"}})}});
  EXPECT_EQ(can.body["formula"], render_formula(build_can(fx.skb, fx.unit)));

  Reply single = call("POST", "/sessions/" + id + "/core", {{"unit", "theme_park"}});
  EXPECT_EQ(single.body["formula"], render_formula(build_core(fx.skb, parse_unit("theme_park"))));

  EXPECT_EQ(call("POST", "/sessions/" + id + "/core", {{"unit", "disneyland"}}).status, 422);
  EXPECT_EQ(call("POST", "/sessions/" + id + "/core", json::object()).status, 422);
  EXPECT_EQ(call("POST", "/sessions/nope/core", {{"unit", "epcot"}}).status, 404);
}

TEST_F(ServiceTest, Compare) {
  std::string id = themepark_session();
  auto cmp = [&](const char* t, const char* tp) {
    return call("POST", "/sessions/" + id + "/compare", {{"unit", "discovery_cove;epcot"}, {"tau", t}, {"tau_prime", tp}});
  };
  Reply a = cmp("gardaland", "leolandia");
  EXPECT_EQ(a.body["relation"], "precedes");
  EXPECT_EQ(a.body["witness"], (json{{"tau_in_ess_prime", true}, {"tau_prime_in_ess", false}}));
  Reply b = cmp("prater", "leolandia");
  EXPECT_EQ(b.body["relation"], "similar");
  EXPECT_EQ(b.body["witness"], (json{{"tau_in_ess_prime", true}, {"tau_prime_in_ess", true}}));
  Reply c = cmp("pacific_park", "gardaland");
  EXPECT_EQ(c.body["relation"], "incomparable");
  EXPECT_EQ(c.body["witness"], (json{{"tau_in_ess_prime", false}, {"tau_prime_in_ess", false}}));
  EXPECT_EQ(cmp("prater", "prater").status, 422);
  EXPECT_EQ(cmp("epcot", "prater").status, 422);
}

TEST_F(ServiceTest, EssAndExplains) {
  std::string id = themepark_session();
  Reply e = call("POST", "/sessions/" + id + "/ess", {{"unit", "discovery_cove;epcot"}});
  EXPECT_EQ(e.body["ess"], json::parse(R"([["discovery_cove"],["epcot"]])"));
  Reply m = call("POST", "/sessions/" + id + "/ess", {{"unit", "discovery_cove;epcot;prater"}, {"tuple", "leolandia"}});
  EXPECT_EQ(m.body["in_ess"], true);
  Reply x = call("POST", "/sessions/" + id + "/explains", {{"unit", "discovery_cove;epcot"}, {"formula", expected::kGeneralizationOne}});
  EXPECT_EQ(x.body["explains"], true);
  EXPECT_EQ(x.body["characterizes"], false);
  EXPECT_EQ(call("POST", "/sessions/" + id + "/explains", {{"unit", "epcot"}, {"formula", "X <-"}}).status, 400);
}

TEST_F(ServiceTest, GraphAndNeighbors) {
  std::string id = themepark_session();
  Reply g = call("POST", "/sessions/" + id + "/graph", {{"unit", "discovery_cove;epcot"}});
  ASSERT_EQ(g.status, 200);
  EXPECT_EQ(g.body["nodes"].size(), 6u);
  EXPECT_EQ(g.body["arcs"].size(), 6u);
  ExpansionGraph parsed = parse_graph_json(g.body.dump());
  EXPECT_EQ(expected::check_figure_graph(parsed), "");
  Fixture fx = make_themepark();
  EXPECT_EQ(parsed, build_expansion_graph(fx.skb, fx.unit));

  Reply cap = call("POST", "/sessions/" + id + "/graph", {{"unit", "discovery_cove;epcot"}, {"cap", 1}});
  EXPECT_EQ(cap.status, 413);
  EXPECT_EQ(cap.body["code"], "cap_exceeded");

  Reply nb = call("POST", "/sessions/" + id + "/neighbors", {{"unit", "discovery_cove;epcot"}});
  ASSERT_EQ(nb.status, 200);
  EXPECT_EQ(nb.body["node"]["is_source"], true);
  EXPECT_TRUE(nb.body["specializations"].empty());
  EXPECT_EQ(nb.body["generalizations"].size(), 2u);
  EXPECT_EQ(call("POST", "/sessions/" + id + "/neighbors", {{"unit", "discovery_cove;epcot"}, {"node", 42}}).status, 422);
}

TEST_F(ServiceTest, AsyncGraphJob) {
  std::string id = themepark_session();
  Reply start = call("POST", "/sessions/" + id + "/graph", {{"unit", "discovery_cove;epcot"}, {"async", true}});
  ASSERT_EQ(start.status, 202);
  std::string job = start.body["job_id"];
  Reply poll;
  for (int i = 0; i < 500; ++i) {
    poll = call("GET", "/sessions/" + id + "/jobs/" + job);
    if (poll.body["status"] != "running") break;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  EXPECT_EQ(poll.body["status"], "done");
  EXPECT_EQ(poll.body["result"]["nodes"].size(), 6u);
  EXPECT_EQ(call("GET", "/sessions/" + id + "/jobs/zzz").status, 404);
}

TEST_F(ServiceTest, SessionsAreIsolated) {
  std::string a = themepark_session();
  Reply b = call("POST", "/sessions", {{"facts", "p(a,b). p(b,c)."}, {"selector", "full"}});
  std::string id_b = b.body["session_id"];
  EXPECT_EQ(call("POST", "/sessions/" + id_b + "/core", {{"unit", "epcot"}}).status, 422);
  EXPECT_EQ(call("POST", "/sessions/" + a + "/core", {{"unit", "epcot"}}).status, 200);
  EXPECT_EQ(call("GET", "/sessions/" + a).body["stats"]["entailed"], 18);
}

TEST_F(ServiceTest, TableSelector) {
  Fixture fx = make_prime_cycles(2);
  Reply r = call("POST", "/sessions", {{"facts", fx.facts_text}, {"selector", "table"}, {"summaries", fx.summaries_text}});
  ASSERT_EQ(r.status, 201);
  Reply core = call("POST", "/sessions/" + r.body["session_id"].get<std::string>() + "/core", {{"unit", render_unit(fx.unit)}});
  EXPECT_EQ(core.body["atom_count"], 12);
}

TEST_F(ServiceTest, UnknownRoutes) {
  EXPECT_EQ(call("GET", "/nothing").status, 404);
  std::string id = themepark_session();
  EXPECT_EQ(call("POST", "/sessions/" + id + "/frobnicate", {{"unit", "epcot"}}).status, 404);
}

TEST(ServiceHttp, ServesOverLoopback) {
  ServiceConfig cfg;
  cfg.port = 0;
  Service service(cfg);
  int port = service.start_background();
  ASSERT_GT(port, 0);
  httplib::Client client("127.0.0.1", port);
  Fixture fx = make_themepark();
  json payload{{"facts", fx.facts_text}, {"rules", fx.rules_text}, {"selector", "neighborhood"}};
  auto res = client.Post("/sessions", payload.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  EXPECT_NE(res->get_header_value("Content-Type").find("application/json"), std::string::npos);
  std::string id = json::parse(res->body)["session_id"];
  auto core = client.Post("/sessions/" + id + "/core", json{{"unit", "discovery_cove;epcot"}}.dump(), "application/json");
  ASSERT_TRUE(core);
  EXPECT_EQ(json::parse(core->body)["atom_count"], 9);
  auto missing = client.Get("/sessions/none");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  service.stop();
}

TEST(ServiceConfig, Environment) {
  setenv("NEXUS_PORT", "9191", 1);
  setenv("NEXUS_CAP_TUPLES", "12", 1);
  ServiceConfig cfg = ServiceConfig::from_env();
  EXPECT_EQ(cfg.port, 9191);
  EXPECT_EQ(cfg.candidate_cap, 12u);
  EXPECT_EQ(cfg.host, "127.0.0.1");
  unsetenv("NEXUS_PORT");
  unsetenv("NEXUS_CAP_TUPLES");
  EXPECT_EQ(ServiceConfig::from_env().port, 7878);
}

}  // namespace
}  // namespace nexus
