#include "geosocial/sim/demo.hpp"

#include <httplib.h>
#include <json.hpp>

#include <array>

namespace geosocial::sim {

using nlohmann::json;

namespace {

struct DemoUser {
    const char* first;
    const char* last;
    const char* email;
    const char* gender;
    const char* dob;
    const char* city;
    double lat;
    double lon;
};

// Fix positions sit a short way off each city centre.
constexpr std::array<DemoUser, 5> kUsers{{
    {"Osaro", "Igbinedion", "osaro@demo.example", "male", "1994-03-12", "Benin City", 6.3410, 5.6200},
    {"Chidinma", "Okafor", "chidinma@demo.example", "female", "1997-07-02", "Aba", 5.1120, 7.3710},
    {"Tamuno", "Briggs", "tamuno@demo.example", "male", "1991-11-23", "Port Harcourt", 4.8200, 7.0300},
    {"Adebola", "Adeyemi", "adebola@demo.example", "female", "1999-01-30", "Lagos", 6.5300, 3.3850},
    {"Musa", "Bello", "musa@demo.example", "male", "1988-05-17", "Abuja", 9.0700, 7.4000},
}};
constexpr const char* kPassword = "demo-password-1";

struct Session {
    std::int64_t user_id = 0;
    std::string token;
    bool created = false;
};

class Client {
public:
    explicit Client(const std::string& url) : http_(url) {
        http_.set_connection_timeout(5, 0);
        http_.set_read_timeout(30, 0);
    }

    // Returns the response, or a connectivity error if there was none.
    Result<httplib::Response> post(const std::string& path, const json& body,
                                   const std::string& token = {}) {
        httplib::Headers headers;
        if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
        auto res = http_.Post(path, headers, body.dump(), "application/json");
        if (!res)
            return Error{ErrorCode::connectivity, "POST " + path + ": " + httplib::to_string(res.error())};
        return *res;
    }

private:
    httplib::Client http_;
};

std::string describe(const std::string& step, const httplib::Response& res) {
    auto j = json::parse(res.body, nullptr, false);
    std::string code = j.is_object() && j.contains("code") && j["code"].is_string()
                           ? j["code"].get<std::string>()
                           : "http_" + std::to_string(res.status);
    return step + ": " + code;
}

}  // namespace

Result<DemoSummary> seed_demo(const std::string& server_url) {
    Client client(server_url);
    DemoSummary summary;
    std::array<Session, kUsers.size()> sessions;

    auto record = [&](const std::string& step, const httplib::Response& res, int expected) {
        if (res.status == expected) return true;
        (res.status == 409 ? summary.conflicts : summary.errors).push_back(describe(step, res));
        return false;
    };

    for (std::size_t i = 0; i < kUsers.size(); ++i) {
        const auto& u = kUsers[i];
        json signup{{"first_name", u.first}, {"last_name", u.last},     {"email", u.email},
                    {"password", kPassword}, {"country", "Nigeria"},    {"gender", u.gender},
                    {"date_of_birth", u.dob}};
        auto res = client.post("/signup", signup);
        if (!res) return res.error();
        sessions[i].created = record(std::string("signup ") + u.email, *res, 201);
        (sessions[i].created ? summary.users_created : summary.users_existing)++;

        auto login = client.post("/login", {{"email", u.email}, {"password", kPassword}});
        if (!login) return login.error();
        if (!record(std::string("login ") + u.email, *login, 200)) continue;
        auto body = json::parse(login->body, nullptr, false);
        if (!body.is_object() || !body.contains("token")) {
            summary.errors.push_back(std::string("login ") + u.email + ": malformed response");
            continue;
        }
        sessions[i].token = body["token"].get<std::string>();
        sessions[i].user_id = body["user_id"].get<std::int64_t>();
    }

    for (std::size_t i = 0; i < kUsers.size(); ++i) {
        if (sessions[i].token.empty()) continue;
        for (std::size_t j = i + 1; j < kUsers.size(); ++j) {
            if (sessions[j].token.empty()) continue;
            const std::string pair = std::string(kUsers[i].email) + " -> " + kUsers[j].email;
            auto req = client.post("/friends/" + std::to_string(sessions[j].user_id) + "/request",
                                   json::object(), sessions[i].token);
            if (!req) return req.error();
            if (!record("friend request " + pair, *req, 201)) continue;
            auto resp = client.post("/friends/" + std::to_string(sessions[i].user_id) + "/respond",
                                    {{"accept", true}}, sessions[j].token);
            if (!resp) return resp.error();
            if (record("friend accept " + pair, *resp, 200)) ++summary.friendships_created;
        }
    }

    for (std::size_t i = 0; i < kUsers.size(); ++i) {
        const auto& s = sessions[i];
        if (!s.created || s.token.empty()) continue;
        const auto& u = kUsers[i];
        auto post = client.post("/posts", {{"body", std::string("Hello from ") + u.city}}, s.token);
        if (!post) return post.error();
        if (record(std::string("post ") + u.email, *post, 201)) ++summary.posts_created;

        auto fix = client.post("/location/fixes", {{"lat", u.lat}, {"lon", u.lon}}, s.token);
        if (!fix) return fix.error();
        if (record(std::string("fix ") + u.email, *fix, 201)) ++summary.fixes_recorded;

        const auto& next = sessions[(i + 1) % kUsers.size()];
        if (next.user_id == 0) continue;
        auto msg = client.post("/messages",
                               {{"to", next.user_id},
                                {"body", std::string("Greetings from ") + u.city + "!"}},
                               s.token);
        if (!msg) return msg.error();
        if (record(std::string("message ") + u.email, *msg, 201)) ++summary.messages_sent;
    }
    return summary;
}

}  // namespace geosocial::sim
