#include <doctest.h>

#include <random>
#include <set>

#include "geosocial/api/service.hpp"
#include "support.hpp"

using namespace geosocial;
using namespace geosocial::api;
using nlohmann::json;

namespace {

struct Fixture {
    testing::TempDir dir;
    std::shared_ptr<ManualClock> clock = testing::manual_clock();
    std::unique_ptr<Service> svc = [&] {
        auto s = Service::create(testing::test_config(dir), clock);
        REQUIRE(s);
        return std::move(*s);
    }();

    ApiResponse call(const std::string& method, const std::string& path, const json& body = nullptr,
                     const std::string& token = {}, std::map<std::string, std::string> query = {}) {
        ApiRequest r;
        r.method = method;
        r.path = path;
        r.query = std::move(query);
        if (!token.empty()) r.authorization = "Bearer " + token;
        if (!body.is_null()) r.body = body.dump();
        return svc->handle(r);
    }

    json signup_body(const std::string& email, const std::string& first = "Ada") {
        return {{"first_name", first},  {"last_name", "Obi"}, {"email", email},
                {"password", "correct-horse"}, {"country", "Nigeria"}, {"gender", "female"},
                {"date_of_birth", "1995-06-15"}};
    }

    struct Account {
        std::int64_t id;
        std::string token;
    };
    Account account(const std::string& email, const std::string& first = "Ada") {
        auto s = call("POST", "/signup", signup_body(email, first));
        REQUIRE(s.status == 201);
        auto l = call("POST", "/login", {{"email", email}, {"password", "correct-horse"}});
        REQUIRE(l.status == 200);
        return {l.body["user_id"].get<std::int64_t>(), l.body["token"].get<std::string>()};
    }
    void befriend(const Account& a, const Account& b) {
        REQUIRE(call("POST", "/friends/" + std::to_string(b.id) + "/request", json::object(), a.token).status == 201);
        REQUIRE(call("POST", "/friends/" + std::to_string(a.id) + "/respond", {{"accept", true}}, b.token).status == 200);
    }
};

}  // namespace

TEST_CASE("health") {
    Fixture f;
    auto r = f.call("GET", "/health");
    CHECK(r.status == 200);
    CHECK(r.body == json{{"status", "ok"}});
    f.svc->store().set_reachable(false);
    CHECK(f.call("GET", "/health").status == 503);
}

TEST_CASE("signup and login texts") {
    Fixture f;
    auto s = f.call("POST", "/signup", f.signup_body("ada@example.com"));
    CHECK(s.status == 201);
    CHECK(s.body["message"] == "welldone, you are good to go");

    auto body = f.signup_body("bob@example.com");
    body["password"] = "abcd1234";
    auto short_pw = f.call("POST", "/signup", body);
    CHECK(short_pw.status == 422);
    CHECK(short_pw.body["code"] == "too_short");

    CHECK(f.call("POST", "/signup", f.signup_body("ada@example.com")).status == 409);
    body.erase("country");
    auto missing = f.call("POST", "/signup", body);
    CHECK(missing.status == 422);
    CHECK(missing.body["code"] == "missing_field");
    CHECK(missing.body["detail"] == "country");

    auto bad = f.call("POST", "/login", {{"email", "ada@example.com"}, {"password", "nope-nope-nope"}});
    CHECK(bad.status == 401);
    CHECK(bad.body["message"] == "wrong email address or password");
    auto unknown = f.call("POST", "/login", {{"email", "who@example.com"}, {"password", "nope-nope-nope"}});
    CHECK(unknown.status == 401);
    CHECK(unknown.body.dump() == bad.body.dump());

    CHECK(f.call("POST", "/signup", nullptr).status == 400);
    CHECK(f.call("GET", "/nowhere").status == 404);
}

TEST_CASE("authentication is required") {
    Fixture f;
    CHECK(f.call("GET", "/friends").status == 401);
    CHECK(f.call("GET", "/friends", nullptr, "not-a-token").status == 401);
    auto a = f.account("ada@example.com");
    CHECK(f.call("GET", "/friends", nullptr, a.token).status == 200);
    f.clock->advance(std::chrono::hours{25});
    auto expired = f.call("GET", "/friends", nullptr, a.token);
    CHECK(expired.status == 401);
    CHECK(expired.body["code"] == "expired");
}

TEST_CASE("social flow") {
    Fixture f;
    auto a = f.account("ada@example.com", "Ada");
    auto b = f.account("bola@example.com", "Bola");
    auto c = f.account("chidi@example.com", "Chidi");

    auto search = f.call("GET", "/profiles", nullptr, a.token, {{"q", "bol"}});
    CHECK(search.status == 200);
    REQUIRE(search.body["matches"].size() == 1);
    CHECK(search.body["matches"][0]["user_id"] == b.id);
    CHECK(f.call("GET", "/profiles", nullptr, a.token, {{"q", ""}}).status == 422);

    auto own = f.call("GET", "/users/" + std::to_string(a.id), nullptr, a.token);
    CHECK(own.body["email"] == "ada@example.com");
    auto other = f.call("GET", "/users/" + std::to_string(a.id), nullptr, b.token);
    CHECK_FALSE(other.body.contains("email"));
    CHECK(f.call("GET", "/users/999", nullptr, a.token).status == 404);

    CHECK(f.call("POST", "/messages", {{"to", b.id}, {"body", "hi"}}, a.token).status == 403);
    f.befriend(a, b);
    CHECK(f.call("POST", "/friends/" + std::to_string(a.id) + "/request", json::object(), b.token).status == 409);

    auto m1 = f.call("POST", "/messages", {{"to", b.id}, {"body", "hi"}}, a.token);
    CHECK(m1.status == 201);
    CHECK(m1.body["seq"] == 1);
    CHECK(f.call("POST", "/messages", {{"to", a.id}, {"body", "hello"}}, b.token).body["seq"] == 2);
    auto conv = f.call("GET", "/messages/" + std::to_string(a.id), nullptr, b.token, {{"since_seq", "1"}});
    CHECK(conv.status == 200);
    REQUIRE(conv.body["messages"].size() == 1);
    CHECK(conv.body["messages"][0]["body"] == "hello");

    auto post = f.call("POST", "/posts", {{"body", "hello world"}}, a.token);
    CHECK(post.status == 201);
    CHECK(post.body["message"] == "post has been sent");
    CHECK(f.call("POST", "/posts", {{"body", ""}}, a.token).status == 422);
    auto posts = f.call("GET", "/users/" + std::to_string(a.id) + "/posts", nullptr, c.token);
    CHECK(posts.body["posts"].size() == 1);
    CHECK(posts.body["posts"][0]["media_ref"].is_null());

    auto friends = f.call("GET", "/friends", nullptr, a.token);
    REQUIRE(friends.body["friends"].size() == 1);
    CHECK(friends.body["friends"][0]["user_id"] == b.id);
}

TEST_CASE("posting while storage is down") {
    Fixture f;
    auto a = f.account("ada@example.com");
    f.svc->store().set_reachable(false);
    auto r = f.call("POST", "/posts", {{"body", "hello"}}, a.token);
    CHECK(r.status == 503);
    CHECK(r.body["code"] == "connectivity");
    f.svc->store().set_reachable(true);
    CHECK(f.call("GET", "/users/" + std::to_string(a.id) + "/posts", nullptr, a.token).body["posts"].empty());
}

TEST_CASE("location endpoints") {
    Fixture f;
    auto a = f.account("ada@example.com");
    auto b = f.account("bola@example.com", "Bola");
    auto c = f.account("chidi@example.com", "Chidi");
    f.befriend(a, b);
    const auto loc_of = [&](const Fixture::Account& who) {
        return "/users/" + std::to_string(who.id) + "/location";
    };

    CHECK(f.call("GET", loc_of(a), nullptr, b.token).status == 404);
    CHECK(f.call("POST", "/location/fixes", {{"lat", 6.34}, {"lon", 5.62}}, a.token).status == 201);
    auto seen = f.call("GET", loc_of(a), nullptr, b.token);
    CHECK(seen.status == 200);
    CHECK(seen.body["city"] == "Benin City");
    CHECK(seen.body["country"] == "Nigeria");
    CHECK(seen.body["source"] == "client_reported");
    CHECK(f.call("GET", loc_of(a), nullptr, c.token).status == 403);
    CHECK(f.call("POST", "/location/fixes", {{"lat", 95}, {"lon", 0}}, a.token).status == 422);

    json est{{"origin", {{"lat", 5.10}, {"lon", 7.36}}},
             {"rps", {{{"rp_id", "n"}, {"x", 0}, {"y", 1000}},
                      {{"rp_id", "e"}, {"x", 1000}, {"y", 0}},
                      {{"rp_id", "s"}, {"x", 0}, {"y", -1000}}}},
             {"measurements", json::array()}};
    const Eigen::Vector2d truth(300, 400);
    for (const auto& rp : est["rps"]) {
        const Eigen::Vector2d p(rp["x"].get<double>(), rp["y"].get<double>());
        est["measurements"].push_back(
            {{"rp_id", rp["rp_id"]}, {"kind", "TOA"}, {"value", (truth - p).norm() / 299792458.0}});
    }
    auto r = f.call("POST", "/location/estimate", est, c.token);
    CHECK(r.status == 200);
    CHECK(r.body["estimate"]["converged"] == true);
    CHECK(r.body["fix_id"].is_number());
    CHECK(r.body["estimate"]["x"].get<double>() == doctest::Approx(300).epsilon(1e-9));
    auto mine = f.call("GET", loc_of(c), nullptr, c.token);
    CHECK(mine.body["source"] == "estimated");
    CHECK(mine.body["city"] == "Aba");

    est["measurements"].erase(2);
    auto too_few = f.call("POST", "/location/estimate", est, c.token);
    CHECK(too_few.status == 422);
    CHECK(too_few.body["code"] == "insufficient_observations");

    auto hist = f.call("GET", loc_of(c) + "/history", nullptr, c.token);
    CHECK(hist.status == 200);
    CHECK(hist.body["fixes"].size() == 1);
}

TEST_CASE("location privacy over a random 20-user graph") {
    Fixture f;
    std::mt19937 rng(50);
    std::vector<Fixture::Account> users;
    for (int i = 0; i < 20; ++i) {
        users.push_back(f.account("u" + std::to_string(i) + "@example.com", "U" + std::to_string(i)));
        REQUIRE(f.call("POST", "/location/fixes", {{"lat", 6.3}, {"lon", 5.6}}, users.back().token).status == 201);
    }
    std::set<std::pair<std::size_t, std::size_t>> friends;
    for (std::size_t i = 0; i < users.size(); ++i)
        for (std::size_t j = i + 1; j < users.size(); ++j) {
            const auto pick = rng() % 4;
            if (pick == 0) continue;
            REQUIRE(f.call("POST", "/friends/" + std::to_string(users[j].id) + "/request", json::object(),
                           users[i].token).status == 201);
            if (pick == 1) continue;
            REQUIRE(f.call("POST", "/friends/" + std::to_string(users[i].id) + "/respond",
                           {{"accept", pick == 3}}, users[j].token).status == 200);
            if (pick == 3) friends.insert({i, j});
        }
    for (std::size_t i = 0; i < users.size(); ++i)
        for (std::size_t j = 0; j < users.size(); ++j) {
            const bool allowed = i == j || friends.count({std::min(i, j), std::max(i, j)});
            auto r = f.call("GET", "/users/" + std::to_string(users[j].id) + "/location", nullptr, users[i].token);
            CHECK(r.status == (allowed ? 200 : 403));
        }
}

TEST_CASE("repeated GETs are byte-identical and never leak secrets") {
    Fixture f;
    auto a = f.account("ada@example.com");
    auto b = f.account("bola@example.com", "Bola");
    f.befriend(a, b);
    REQUIRE(f.call("POST", "/messages", {{"to", b.id}, {"body", "hi"}}, a.token).status == 201);
    REQUIRE(f.call("POST", "/posts", {{"body", "p"}}, a.token).status == 201);
    REQUIRE(f.call("POST", "/location/fixes", {{"lat", 6.3}, {"lon", 5.6}}, a.token).status == 201);
    const std::string aid = std::to_string(a.id), bid = std::to_string(b.id);
    for (const std::string& path : std::vector<std::string>{"/users/" + aid, "/users/" + aid + "/posts", "/users/" + aid + "/location",
                                   "/users/" + aid + "/location/history", "/friends", "/messages/" + aid,
                                   "/profiles"}) {
        CAPTURE(path);
        std::map<std::string, std::string> q;
        if (path == "/profiles") q["q"] = "a";
        auto first = f.call("GET", path, nullptr, b.token, q);
        auto second = f.call("GET", path, nullptr, b.token, q);
        CHECK(first.status == 200);
        CHECK(first.body.dump() == second.body.dump());
        const auto text = first.body.dump();
        for (const char* key : {"password", "digest", "salt", "token"})
            CHECK(text.find(key) == std::string::npos);
        CHECK(text.find(a.token) == std::string::npos);
        CHECK(text.find(b.token) == std::string::npos);
    }
}

TEST_CASE("error codes map to distinct statuses") {
    CHECK(http_status(ErrorCode::bad_request) == 400);
    CHECK(http_status(ErrorCode::bad_credentials) == 401);
    CHECK(http_status(ErrorCode::not_permitted) == 403);
    CHECK(http_status(ErrorCode::no_fix_yet) == 404);
    CHECK(http_status(ErrorCode::duplicate_email) == 409);
    CHECK(http_status(ErrorCode::too_short) == 422);
    CHECK(http_status(ErrorCode::connectivity) == 503);
    CHECK(http_status(ErrorCode::internal) == 500);
}

TEST_CASE("startup config errors") {
    testing::TempDir dir;
    auto cfg = testing::test_config(dir);
    cfg.geocoder_mode = GeocoderMode::external;
    cfg.external_geocoder.base_url = "http://127.0.0.1:9";
    CHECK(Service::create(cfg).code() == ErrorCode::config);
    cfg = testing::test_config(dir);
    cfg.places_dataset_path = dir.file("missing.csv");
    CHECK_FALSE(Service::create(cfg));
}
