#pragma once

#include <json.hpp>

#include <map>
#include <memory>
#include <string>
#include <thread>

#include "geosocial/ali/registry.hpp"
#include "geosocial/api/config.hpp"
#include "geosocial/auth/auth.hpp"
#include "geosocial/social/social_graph.hpp"

namespace httplib {
class Server;
}

namespace geosocial::api {

struct ApiRequest {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string authorization;  // raw Authorization header
    std::string body;
};

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

// Status for every domain error code: 401 auth, 403 permission, 404 missing,
// 409 conflict, 422 validation, 503 storage unreachable.
int http_status(ErrorCode code) noexcept;

// The wired-up application: storage, auth, social graph, ALI registry and the
// endpoint table. handle() is transport independent.
class Service {
public:
    static Result<std::unique_ptr<Service>> create(const ServiceConfig& config,
                                                   std::shared_ptr<const Clock> clock = nullptr);

    ApiResponse handle(const ApiRequest& request);

    Store& store() noexcept { return *store_; }
    AuthService& auth() noexcept { return auth_; }
    SocialGraph& social() noexcept { return social_; }
    ali::AliRegistry& ali() noexcept { return ali_; }
    const ServiceConfig& config() const noexcept { return config_; }

private:
    Service(ServiceConfig config, std::shared_ptr<Store> store,
            std::shared_ptr<const Clock> clock, std::shared_ptr<ali::Geocoder> geocoder);

    ServiceConfig config_;
    std::shared_ptr<Store> store_;
    std::shared_ptr<const Clock> clock_;
    AuthService auth_;
    SocialGraph social_;
    ali::AliRegistry ali_;
};

// A listening HTTP server. The port is bound before serve() returns, so bind
// failures are reported up front. stop() finishes in-flight requests.
class ServiceHandle {
public:
    ~ServiceHandle();
    ServiceHandle(const ServiceHandle&) = delete;
    ServiceHandle& operator=(const ServiceHandle&) = delete;

    int port() const noexcept { return port_; }
    std::string url() const;
    Service& service() noexcept { return *service_; }

    void stop();
    // Blocks until the listener exits.
    void wait();

private:
    friend Result<std::unique_ptr<ServiceHandle>> serve(const ServiceConfig&,
                                                        std::shared_ptr<const Clock>);
    ServiceHandle() = default;

    std::unique_ptr<Service> service_;
    std::unique_ptr<httplib::Server> server_;
    std::thread listener_;
    std::string host_;
    int port_ = 0;
};

Result<std::unique_ptr<ServiceHandle>> serve(const ServiceConfig& config,
                                             std::shared_ptr<const Clock> clock = nullptr);

}  // namespace geosocial::api
