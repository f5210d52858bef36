#include <doctest.h>

#include <thread>

#include "geosocial/ali/geocoder.hpp"
#include "support.hpp"

#include <httplib.h>

using namespace geosocial;
using namespace geosocial::ali;
using namespace std::chrono_literals;

namespace {

// Local stand-in for the reverse-geocoding service.
class FakeService {
public:
    explicit FakeService(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
        server_.Get("/api/reverse", [handler](const httplib::Request& req, httplib::Response& res) {
            handler(req, res);
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeService() {
        server_.stop();
        thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/api"; }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

ExternalGeocoderConfig config_for(const std::string& url, std::chrono::milliseconds timeout = 2000ms) {
    return {url, "secret key", timeout, 4};
}

const GeodeticPoint kNearAba{5.11, 7.37};

}  // namespace

TEST_CASE("offline geocoder") {
    OfflineGeocoder g(testing::places());
    auto r = g.resolve(kNearAba);
    REQUIRE(r);
    CHECK(r->place.city == "Aba");
    CHECK(r->source == PlaceSource::offline);
}

TEST_CASE("external geocoder passes the service answer through") {
    std::string seen_lat, seen_key;
    FakeService svc([&](const httplib::Request& req, httplib::Response& res) {
        seen_lat = req.get_param_value("lat");
        seen_key = req.get_param_value("key");
        res.set_content(R"({"city":"Aba","country":"Nigeria"})", "application/json");
    });
    ExternalGeocoder g(config_for(svc.url()), testing::places());
    auto r = g.resolve(kNearAba);
    REQUIRE(r);
    CHECK(r->source == PlaceSource::external);
    CHECK(r->place.city == "Aba");
    CHECK(r->place.country == "Nigeria");
    CHECK(r->place.distance_to_city_center_m > 0);
    CHECK(seen_lat == "5.11");
    CHECK(seen_key == "secret key");
    CHECK(g.failures() == 0);
}

TEST_CASE("external geocoder falls back on a malformed body") {
    FakeService svc([](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"town":"Aba"})", "application/json");
    });
    ExternalGeocoder g(config_for(svc.url()), testing::places());
    auto r = g.resolve(kNearAba);
    REQUIRE(r);
    CHECK(r->source == PlaceSource::offline_fallback);
    CHECK(r->place.city == "Aba");
    CHECK(g.failures() == 1);
}

TEST_CASE("external geocoder falls back on a server error") {
    FakeService svc([](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    ExternalGeocoder g(config_for(svc.url()), testing::places());
    CHECK(g.resolve(kNearAba)->source == PlaceSource::offline_fallback);
}

TEST_CASE("external geocoder falls back on a timeout") {
    FakeService svc([](const httplib::Request&, httplib::Response& res) {
        std::this_thread::sleep_for(600ms);
        res.set_content(R"({"city":"Aba","country":"Nigeria"})", "application/json");
    });
    ExternalGeocoder g(config_for(svc.url(), 150ms), testing::places());
    const auto start = std::chrono::steady_clock::now();
    auto r = g.resolve(kNearAba);
    REQUIRE(r);
    CHECK(r->source == PlaceSource::offline_fallback);
    CHECK(std::chrono::steady_clock::now() - start < 550ms);
}

TEST_CASE("external geocoder falls back when nothing listens") {
    const int port = testing::unused_port();
    ExternalGeocoder g(config_for("http://127.0.0.1:" + std::to_string(port)), testing::places());
    for (int i = 0; i < 5; ++i) {
        auto r = g.resolve(kNearAba);
        REQUIRE(r);
        CHECK(r->source == PlaceSource::offline_fallback);
    }
    CHECK(g.failures() == 5);
    CHECK(g.requests() == 5);
}

TEST_CASE("base URL parsing") {
    auto p = split_base_url("https://geo.example.com:8443/v1/");
    REQUIRE(p);
    CHECK(p->first == "https://geo.example.com:8443");
    CHECK(p->second == "/v1");
    CHECK(split_base_url("geo.example.com").code() == ErrorCode::config);
    CHECK(split_base_url("ftp://geo.example.com").code() == ErrorCode::config);
    CHECK(split_base_url("http://").code() == ErrorCode::config);
}
