#include <gtest/gtest.h>

#include <cstdio>
#include <random>
#include <thread>

#include "generators.hpp"
#include "http_routes.hpp"
#include "json.hpp"
#include "palms/label_api.hpp"

namespace palms {
namespace {

using Json = nlohmann::json;

struct Fixture {
  Dataset truth;
  std::string csv;
};

Fixture make_pool() {
  std::mt19937_64 gen(6);
  const auto blobs = testing::gaussian_blobs(gen, 20, 2.0, 1.0);
  Fixture f;
  std::vector<LabeledPoint> pts;
  f.csv = "f1,f2\n";
  char buf[64];
  for (std::size_t i = 0; i < blobs.size(); ++i) {
    pts.push_back({i, blobs[i].x, blobs[i].y});
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", blobs[i].x[0], blobs[i].x[1]);
    f.csv += buf;
  }
  f.truth = Dataset(2, pts);
  return f;
}

std::string create_body(const Fixture& f, std::size_t budget) {
  return Json{{"pool_csv", f.csv}, {"budget", budget}, {"seed", 5}}.dump();
}

Json body(const ApiResponse& r) { return Json::parse(r.body); }

class Api : public ::testing::Test {
 protected:
  Api() : f_(make_pool()) {}

  std::string create(std::size_t budget) {
    const auto r = handle_request(store_, "POST", "/sessions", create_body(f_, budget));
    EXPECT_EQ(r.status, 201) << r.body;
    return body(r)["session_id"];
  }

  ApiResponse answer(const std::string& id) {
    const auto q = body(handle_request(store_, "GET", "/sessions/" + id + "/query", ""));
    const PointId pid = q["point_id"];
    const int y = to_int(f_.truth[pid].y);
    return handle_request(store_, "POST", "/sessions/" + id + "/label",
                          Json{{"point_id", pid}, {"label", y}}.dump());
  }

  Fixture f_;
  SessionStore store_;
};

TEST_F(Api, CreateReturnsIdAndInitialStatus) {
  const auto r = handle_request(store_, "POST", "/sessions", create_body(f_, 6));
  ASSERT_EQ(r.status, 201);
  const auto j = body(r);
  EXPECT_EQ(j["session_id"].get<std::string>().size(), 32u);
  EXPECT_EQ(j["status"]["state"], "bootstrapping");
  EXPECT_EQ(j["status"]["remaining"], 6);
  EXPECT_EQ(j["status"]["phase"], "bootstrap");
}

TEST_F(Api, QueryCarriesRawFeaturesAndProgress) {
  const auto id = create(6);
  const auto r = handle_request(store_, "GET", "/sessions/" + id + "/query", "");
  ASSERT_EQ(r.status, 200);
  const auto j = body(r);
  const PointId pid = j["point_id"];
  EXPECT_EQ(j["features"].get<std::vector<double>>(), f_.truth[pid].x);
  EXPECT_EQ(j["progress"]["labels_used"], 0);
}

TEST_F(Api, FullLabelingFlow) {
  const auto id = create(8);
  for (int i = 0; i < 8; ++i) ASSERT_EQ(answer(id).status, 200);
  auto s = body(handle_request(store_, "GET", "/sessions/" + id, ""));
  EXPECT_EQ(s["state"], "ready");
  EXPECT_EQ(s["remaining"], 0);
  EXPECT_EQ(s["labels_per_class"]["0"].get<int>() + s["labels_per_class"]["1"].get<int>(), 8);
  EXPECT_EQ(handle_request(store_, "GET", "/sessions/" + id + "/query", "").status, 409);
  EXPECT_EQ(handle_request(store_, "GET", "/sessions/" + id + "/outcome", "").status, 404);

  const auto fin = handle_request(store_, "POST", "/sessions/" + id + "/finalize", "");
  ASSERT_EQ(fin.status, 200) << fin.body;
  const auto o = body(fin);
  EXPECT_EQ(o["method"], "PALMS_FWC");
  EXPECT_EQ(o["scores"].size(), 20u);
  EXPECT_EQ(o["training_ids"].size(), 8u);
  EXPECT_EQ(o["predictions"].size(), f_.truth.size());
  EXPECT_TRUE(o["weights"].is_object());
  EXPECT_EQ(o["weights"]["w"], 1.5);
  for (const auto& p : o["predictions"]) {
    EXPECT_EQ(p["label"].get<int>(), p["decision_value"].get<double>() > 0.0 ? 1 : 0);
  }
  EXPECT_EQ(handle_request(store_, "GET", "/sessions/" + id + "/outcome", "").body, fin.body);
  EXPECT_EQ(handle_request(store_, "POST", "/sessions/" + id + "/finalize", "").body, fin.body);
  EXPECT_EQ(handle_request(store_, "GET", "/sessions/" + id + "/query", "").status, 404);
}

TEST_F(Api, WrongPointIsAConflict) {
  const auto id = create(5);
  const auto q = body(handle_request(store_, "GET", "/sessions/" + id + "/query", ""));
  const PointId other = q["point_id"].get<PointId>() == 0 ? 1 : 0;
  const auto r = handle_request(store_, "POST", "/sessions/" + id + "/label",
                                Json{{"point_id", other}, {"label", 1}}.dump());
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(body(r)["code"], "conflict");
  EXPECT_EQ(body(handle_request(store_, "GET", "/sessions/" + id, ""))["labels_used"], 0);
}

TEST_F(Api, EarlyFinalizeExplainsTheMinimum) {
  const auto id = create(5);
  answer(id);
  const auto r = handle_request(store_, "POST", "/sessions/" + id + "/finalize", "");
  EXPECT_EQ(r.status, 409);
  EXPECT_NE(body(r)["message"].get<std::string>().find("2 labeled points"), std::string::npos);
}

TEST_F(Api, AbortStopsTheSession) {
  const auto id = create(5);
  const auto r = handle_request(store_, "POST", "/sessions/" + id + "/abort", "");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(body(r)["state"], "aborted");
  EXPECT_EQ(handle_request(store_, "GET", "/sessions/" + id + "/query", "").status, 404);
  EXPECT_EQ(handle_request(store_, "POST", "/sessions/" + id + "/abort", "").status, 409);
}

TEST_F(Api, BadRequests) {
  const auto id = create(5);
  const auto status = [&](std::string_view m, const std::string& p, std::string_view b) {
    return handle_request(store_, m, p, b).status;
  };
  EXPECT_EQ(status("POST", "/sessions", "{"), 400);
  EXPECT_EQ(status("POST", "/sessions", "{}"), 400);
  EXPECT_EQ(status("POST", "/sessions", create_body(f_, 0)), 400);
  EXPECT_EQ(status("POST", "/sessions", R"({"pool_csv": "f1\n1\nx\n"})"), 400);
  EXPECT_EQ(status("POST", "/sessions/" + id + "/label", "nope"), 400);
  EXPECT_EQ(status("POST", "/sessions/" + id + "/label", R"({"point_id": 1})"), 400);
  EXPECT_EQ(status("POST", "/sessions/" + id + "/label", R"({"point_id": -1, "label": 0})"), 400);
  EXPECT_EQ(status("POST", "/sessions/" + id + "/label", R"({"point_id": 1, "label": 2})"), 400);
  EXPECT_EQ(status("GET", "/sessions/unknown", ""), 404);
  EXPECT_EQ(status("GET", "/sessions/unknown/query", ""), 404);
  EXPECT_EQ(status("GET", "/elsewhere", ""), 404);
  EXPECT_EQ(status("GET", "/sessions/" + id + "/nothing", ""), 404);
  EXPECT_EQ(status("GET", "/sessions", ""), 405);
  EXPECT_EQ(status("DELETE", "/sessions/" + id, ""), 405);
  EXPECT_EQ(status("POST", "/sessions/" + id + "/query", ""), 405);
  const auto err = body(handle_request(store_, "GET", "/sessions/unknown", ""));
  EXPECT_TRUE(err.contains("code"));
  EXPECT_TRUE(err.contains("message"));
}

TEST(ApiJson, ConfigRoundTrip) {
  SessionConfig c;
  c.dataset = "pima";
  c.budget = 33;
  c.fixed_model = ModelParams{2.0, 0.25};
  c.method = SelectionMethod::kPalms;
  c.weight = 2.5;
  c.seed = 77;
  c.bootstrap_per_class = 3;
  c.solver.max_updates = 1234;
  const auto back = config_from_json(config_to_json(c));
  EXPECT_EQ(back.dataset, c.dataset);
  EXPECT_FALSE(back.pool_csv.has_value());
  EXPECT_EQ(back.budget, 33u);
  EXPECT_EQ(back.fixed_model, c.fixed_model);
  EXPECT_EQ(back.method, SelectionMethod::kPalms);
  EXPECT_EQ(back.weight, 2.5);
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(back.bootstrap_per_class, 3u);
  EXPECT_EQ(back.solver.max_updates, 1234u);
  EXPECT_EQ(config_to_json(back), config_to_json(c));
}

TEST(ApiHttp, RoundTripOverTheWire) {
  const auto f = make_pool();
  SessionStore store;
  httplib::Server server;
  mount_session_routes(server, store);
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client cli("127.0.0.1", port);
  auto created = cli.Post("/sessions", create_body(f, 6), "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  EXPECT_EQ(created->get_header_value("Access-Control-Allow-Origin"), "*");
  const std::string id = Json::parse(created->body)["session_id"];
  for (int i = 0; i < 6; ++i) {
    auto q = cli.Get("/sessions/" + id + "/query");
    ASSERT_TRUE(q);
    ASSERT_EQ(q->status, 200);
    const PointId pid = Json::parse(q->body)["point_id"];
    auto l = cli.Post("/sessions/" + id + "/label",
                      Json{{"point_id", pid}, {"label", to_int(f.truth[pid].y)}}.dump(),
                      "application/json");
    ASSERT_TRUE(l);
    EXPECT_EQ(l->status, 200);
  }
  auto fin = cli.Post("/sessions/" + id + "/finalize", "", "application/json");
  ASSERT_TRUE(fin);
  EXPECT_EQ(fin->status, 200);
  EXPECT_EQ(Json::parse(fin->body)["training_ids"].size(), 6u);
  auto pre = cli.Options("/sessions");
  ASSERT_TRUE(pre);
  EXPECT_EQ(pre->status, 204);
  auto missing = cli.Get("/sessions/none");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);

  server.stop();
  t.join();
}

}  // namespace
}  // namespace palms
