#include "geosocial/api/service.hpp"

#include <httplib.h>

#include <charconv>
#include <limits>
#include <string_view>
#include <vector>

#include "geosocial/api/json_io.hpp"
#include "geosocial/geoloc/projection.hpp"

namespace geosocial::api {

namespace {

constexpr std::string_view kPostSentText = "post has been sent";

ApiResponse ok(int status, json body) { return {status, std::move(body)}; }

ApiResponse fail(const Error& e) { return {http_status(e.code), error_json(e)}; }

ApiResponse not_found_route() {
    return fail({ErrorCode::not_found, "no such endpoint"});
}

std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> out;
    while (!path.empty()) {
        const auto slash = path.find('/');
        auto seg = path.substr(0, slash);
        if (!seg.empty()) out.push_back(seg);
        if (slash == std::string_view::npos) break;
        path.remove_prefix(slash + 1);
    }
    return out;
}

std::optional<std::int64_t> parse_i64(std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

Result<json> parse_object(const ApiRequest& req) {
    auto j = json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        return Error{ErrorCode::bad_request, "request body must be a JSON object"};
    return j;
}

// Optional string field: absent or null -> nullopt, wrong type -> error.
Result<std::optional<std::string>> opt_string(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::optional<std::string>{};
    if (!j[key].is_string())
        return Error{ErrorCode::bad_request, std::string("'") + key + "' must be a string"};
    return std::optional<std::string>(j[key].get<std::string>());
}

Result<std::string> req_string(const json& j, const char* key) {
    auto v = opt_string(j, key);
    if (!v) return v.error();
    if (!*v) return Error{ErrorCode::bad_request, std::string("'") + key + "' is required"};
    return std::move(**v);
}

std::optional<std::string> query_param(const ApiRequest& req, const char* key) {
    auto it = req.query.find(key);
    if (it == req.query.end()) return std::nullopt;
    return it->second;
}

}  // namespace

int http_status(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::bad_request:
            return 400;
        case ErrorCode::bad_credentials:
        case ErrorCode::invalid_token:
        case ErrorCode::expired:
        case ErrorCode::unauthorized:
            return 401;
        case ErrorCode::not_permitted:
        case ErrorCode::not_addressee:
        case ErrorCode::not_participant:
        case ErrorCode::not_friends:
            return 403;
        case ErrorCode::not_found:
        case ErrorCode::unknown_user:
        case ErrorCode::no_fix_yet:
            return 404;
        case ErrorCode::duplicate_email:
        case ErrorCode::already_exists:
        case ErrorCode::not_pending:
        case ErrorCode::constraint:
            return 409;
        case ErrorCode::malformed:
        case ErrorCode::too_short:
        case ErrorCode::missing_field:
        case ErrorCode::invalid_dob:
        case ErrorCode::invalid_argument:
        case ErrorCode::empty_query:
        case ErrorCode::empty:
        case ErrorCode::empty_body:
        case ErrorCode::self_friend:
        case ErrorCode::bad_range:
        case ErrorCode::out_of_bounds:
        case ErrorCode::negative_time:
        case ErrorCode::bad_phase:
        case ErrorCode::insufficient_rps:
        case ErrorCode::collinear_rps:
        case ErrorCode::parallel_bearings:
        case ErrorCode::insufficient_observations:
        case ErrorCode::polar_region:
            return 422;
        case ErrorCode::connectivity:
            return 503;
        case ErrorCode::empty_dataset:
        case ErrorCode::io:
        case ErrorCode::version_downgrade:
        case ErrorCode::config:
        case ErrorCode::bind:
        case ErrorCode::internal:
            return 500;
    }
    return 500;
}

// --- Service ----------------------------------------------------------------

Result<std::unique_ptr<Service>> Service::create(const ServiceConfig& config,
                                                 std::shared_ptr<const Clock> clock) {
    if (auto st = validate(config); !st) return st.error();
    if (!clock) clock = std::make_shared<SystemClock>();
    auto dataset = ali::PlacesDataset::load(config.places_dataset_path);
    if (!dataset) return dataset.error();
    auto shared_dataset = std::make_shared<const ali::PlacesDataset>(std::move(*dataset));
    auto store = Store::open(config.db_path);
    if (!store) return store.error();

    std::shared_ptr<ali::Geocoder> geocoder;
    if (config.geocoder_mode == GeocoderMode::external)
        geocoder = std::make_shared<ali::ExternalGeocoder>(config.external_geocoder, shared_dataset);
    else
        geocoder = std::make_shared<ali::OfflineGeocoder>(shared_dataset);

    return std::unique_ptr<Service>(
        new Service(config, std::move(*store), std::move(clock), std::move(geocoder)));
}

Service::Service(ServiceConfig config, std::shared_ptr<Store> store,
                 std::shared_ptr<const Clock> clock, std::shared_ptr<ali::Geocoder> geocoder)
    : config_(std::move(config)),
      store_(store),
      clock_(clock),
      auth_(store, clock,
            AuthConfig{std::chrono::hours(config_.session_ttl_h), config_.pbkdf2_iterations}),
      social_(store, clock),
      ali_(store, clock, std::move(geocoder)) {}

ApiResponse Service::handle(const ApiRequest& req) {
    try {
        const auto seg = split_path(req.path);
        const bool get = req.method == "GET";
        const bool post = req.method == "POST";

        // Unauthenticated endpoints.
        if (seg.size() == 1 && seg[0] == "health" && get) {
            if (!store_->reachable())
                return {503, {{"status", "unavailable"}, {"code", "connectivity"}}};
            return ok(200, {{"status", "ok"}});
        }
        if (seg.size() == 1 && seg[0] == "signup" && post) {
            auto body = parse_object(req);
            if (!body) return fail(body.error());
            SignupFields f;
            const std::pair<const char*, std::optional<std::string>*> fields[] = {
                {"first_name", &f.first_name}, {"last_name", &f.last_name},
                {"email", &f.email},           {"password", &f.password},
                {"country", &f.country},       {"gender", &f.gender},
                {"date_of_birth", &f.date_of_birth}};
            for (auto& [key, slot] : fields) {
                auto v = opt_string(*body, key);
                if (!v) return fail(v.error());
                *slot = std::move(*v);
            }
            auto result = auth_.signup(f);
            if (!result) return fail(result.error());
            return ok(201, {{"user_id", result->user_id.value}, {"message", result->welcome_text}});
        }
        if (seg.size() == 1 && seg[0] == "login" && post) {
            auto body = parse_object(req);
            if (!body) return fail(body.error());
            auto email = opt_string(*body, "email");
            auto password = opt_string(*body, "password");
            if (!email || !password || !*email || !*password) return fail(bad_credentials_error());
            auto token = auth_.login(**email, **password);
            if (!token) return fail(token.error());
            return ok(200, {{"token", token->token},
                            {"user_id", token->user_id.value},
                            {"expires_at", format_rfc3339(token->expires_at)}});
        }

        // Everything below needs a session.
        static constexpr std::string_view kRoutes[] = {"profiles", "users",    "friends",
                                                       "posts",    "messages", "location"};
        if (seg.empty() ||
            std::find(std::begin(kRoutes), std::end(kRoutes), seg[0]) == std::end(kRoutes))
            return not_found_route();

        constexpr std::string_view kBearer = "Bearer ";
        if (req.authorization.rfind(kBearer, 0) != 0)
            return fail({ErrorCode::unauthorized, "a bearer session token is required"});
        auto me_r = auth_.verify_session(std::string_view(req.authorization).substr(kBearer.size()));
        if (!me_r) return fail(me_r.error());
        const UserId me = *me_r;

        // GET /profiles?q=&limit=
        if (seg.size() == 1 && seg[0] == "profiles" && get) {
            const auto q = query_param(req, "q").value_or("");
            std::size_t limit = 20;
            if (auto l = query_param(req, "limit")) {
                auto n = parse_i64(*l);
                if (!n || *n <= 0)
                    return fail({ErrorCode::invalid_argument, "limit must be a positive integer"});
                limit = static_cast<std::size_t>(*n);
            }
            auto r = social_.search_profiles(q, limit);
            if (!r) return fail(r.error());
            return ok(200, search_json(*r));
        }

        // /users/{id}[/posts|/location[/history]]
        if (seg.size() >= 2 && seg[0] == "users" && get) {
            auto id = parse_i64(seg[1]);
            if (!id) return fail({ErrorCode::not_found, "no such user"});
            const UserId target{*id};
            if (seg.size() == 2) {
                auto u = store_->transact([&](Transaction& tx) { return tx.get_user(target); });
                if (!u) return fail(u.error());
                return ok(200, profile_json(*u, target == me));
            }
            if (seg.size() == 3 && seg[2] == "posts") {
                auto posts = social_.list_posts(target);
                if (!posts) return fail(posts.error());
                json arr = json::array();
                for (const auto& p : *posts) arr.push_back(post_json(p));
                return ok(200, {{"posts", std::move(arr)}});
            }
            if (seg.size() == 3 && seg[2] == "location") {
                auto loc = ali_.current_location(me, target);
                if (!loc) return fail(loc.error());
                return ok(200, location_json(*loc));
            }
            if (seg.size() == 4 && seg[2] == "location" && seg[3] == "history") {
                Timestamp from = from_micros(0);
                Timestamp to = from_micros(std::numeric_limits<std::int64_t>::max());
                for (auto [key, slot] : {std::pair{"from", &from}, std::pair{"to", &to}}) {
                    if (auto v = query_param(req, key)) {
                        auto t = parse_rfc3339(*v);
                        if (!t)
                            return fail({ErrorCode::invalid_argument,
                                         std::string("'") + key + "' must be an RFC 3339 UTC time"});
                        *slot = *t;
                    }
                }
                auto fixes = ali_.location_history(me, target, from, to);
                if (!fixes) return fail(fixes.error());
                json arr = json::array();
                for (const auto& f : *fixes) arr.push_back(fix_json(f));
                return ok(200, {{"fixes", std::move(arr)}});
            }
            return not_found_route();
        }

        // GET /friends ; POST /friends/{id}/request ; POST /friends/{id}/respond
        if (seg[0] == "friends") {
            if (seg.size() == 1 && get) {
                auto ids = social_.friends_of(me);
                if (!ids) return fail(ids.error());
                auto profiles = store_->transact([&](Transaction& tx) -> Result<json> {
                    json arr = json::array();
                    for (auto id : *ids) {
                        auto u = tx.get_user(id);
                        if (!u) return u.error();
                        arr.push_back({{"user_id", id.value},
                                       {"display_name", u->display_name()},
                                       {"country", u->country}});
                    }
                    return arr;
                });
                if (!profiles) return fail(profiles.error());
                return ok(200, {{"friends", std::move(*profiles)}});
            }
            if (seg.size() == 3 && post) {
                auto id = parse_i64(seg[1]);
                if (!id) return fail({ErrorCode::unknown_user, "no such user"});
                const UserId other{*id};
                if (seg[2] == "request") {
                    auto f = social_.request_friend(me, other);
                    if (!f) return fail(f.error());
                    return ok(201, friendship_json(*f));
                }
                if (seg[2] == "respond") {
                    auto body = parse_object(req);
                    if (!body) return fail(body.error());
                    if (!body->contains("accept") || !(*body)["accept"].is_boolean())
                        return fail({ErrorCode::bad_request, "'accept' must be a boolean"});
                    auto f = social_.respond_friend(me, other, (*body)["accept"].get<bool>());
                    if (!f) return fail(f.error());
                    return ok(200, friendship_json(*f));
                }
            }
            return not_found_route();
        }

        // POST /posts
        if (seg.size() == 1 && seg[0] == "posts" && post) {
            auto body = parse_object(req);
            if (!body) return fail(body.error());
            auto text = opt_string(*body, "body");
            auto media = opt_string(*body, "media_ref");
            if (!text) return fail(text.error());
            if (!media) return fail(media.error());
            auto id = social_.create_post(me, text->value_or(""), *media);
            if (!id) return fail(id.error());
            return ok(201, {{"post_id", id->value}, {"message", kPostSentText}});
        }

        // POST /messages ; GET /messages/{other}?since_seq=
        if (seg[0] == "messages") {
            if (seg.size() == 1 && post) {
                auto body = parse_object(req);
                if (!body) return fail(body.error());
                if (!body->contains("to") || !(*body)["to"].is_number_integer())
                    return fail({ErrorCode::bad_request, "'to' must be a user id"});
                auto text = req_string(*body, "body");
                if (!text) return fail(text.error());
                auto m = social_.send_message(me, UserId{(*body)["to"].get<std::int64_t>()},
                                              std::move(*text));
                if (!m) return fail(m.error());
                return ok(201, message_json(*m));
            }
            if (seg.size() == 2 && get) {
                auto other = parse_i64(seg[1]);
                if (!other) return fail({ErrorCode::unknown_user, "no such user"});
                std::int64_t since = 0;
                if (auto s = query_param(req, "since_seq")) {
                    auto n = parse_i64(*s);
                    if (!n || *n < 0)
                        return fail({ErrorCode::invalid_argument, "since_seq must be >= 0"});
                    since = *n;
                }
                auto conv = social_.fetch_conversation(me, me, UserId{*other}, since);
                if (!conv) return fail(conv.error());
                json arr = json::array();
                for (const auto& m : conv->messages) arr.push_back(message_json(m));
                return ok(200, {{"participants", {conv->first.value, conv->second.value}},
                                {"messages", std::move(arr)}});
            }
            return not_found_route();
        }

        // POST /location/fixes ; POST /location/estimate
        if (seg.size() == 2 && seg[0] == "location" && post) {
            auto body = parse_object(req);
            if (!body) return fail(body.error());
            if (seg[1] == "fixes") {
                if (!body->contains("lat") || !(*body)["lat"].is_number() ||
                    !body->contains("lon") || !(*body)["lon"].is_number())
                    return fail({ErrorCode::bad_request, "'lat' and 'lon' must be numbers"});
                const GeodeticPoint p{(*body)["lat"].get<double>(), (*body)["lon"].get<double>()};
                auto id = ali_.record_fix(me, p, 0.0, FixSource::client_reported);
                if (!id) return fail(id.error());
                return ok(201, {{"fix_id", id->value}});
            }
            if (seg[1] == "estimate") {
                const auto& b = *body;
                if (!b.contains("origin") || !b["origin"].is_object() ||
                    !b["origin"].contains("lat") || !b["origin"]["lat"].is_number() ||
                    !b["origin"].contains("lon") || !b["origin"]["lon"].is_number())
                    return fail({ErrorCode::bad_request, "'origin' must be {lat, lon}"});
                const GeodeticPoint origin{b["origin"]["lat"].get<double>(),
                                           b["origin"]["lon"].get<double>()};
                auto rps = parse_reference_points(b.value("rps", json()));
                if (!rps) return fail(rps.error());
                auto ms = parse_measurements(b.value("measurements", json()));
                if (!ms) return fail(ms.error());
                geoloc::FusionOptions<double> opts;
                if (b.contains("path_loss")) {
                    auto pl = parse_path_loss(b["path_loss"]);
                    if (!pl) return fail(pl.error());
                    opts.path_loss = *pl;
                }
                if (b.contains("wavelength_m")) {
                    if (!b["wavelength_m"].is_number())
                        return fail({ErrorCode::bad_request, "'wavelength_m' must be a number"});
                    opts.wavelength_m = b["wavelength_m"].get<double>();
                }
                if (b.contains("poa_k_max")) {
                    if (!b["poa_k_max"].is_number_integer())
                        return fail({ErrorCode::bad_request, "'poa_k_max' must be an integer"});
                    opts.poa_k_max = b["poa_k_max"].get<int>();
                }
                auto est = geoloc::fuse_estimate<double>(*rps, *ms, opts);
                if (!est) return fail(est.error());
                auto geo = geoloc::local_to_geodetic(est->position, origin);
                if (!geo) return fail(geo.error());
                json out{{"estimate", estimate_json(*est)},
                         {"lat", geo->lat_deg},
                         {"lon", geo->lon_deg},
                         {"fix_id", nullptr}};
                // Only converged estimates become location fixes.
                if (est->converged) {
                    auto id = ali_.record_fix(me, *geo, est->rms_residual_m, FixSource::estimated);
                    if (!id) return fail(id.error());
                    out["fix_id"] = id->value;
                }
                return ok(200, std::move(out));
            }
        }
        return not_found_route();
    } catch (const std::exception& e) {
        return fail({ErrorCode::internal, e.what()});
    }
}

// --- HTTP transport -------------------------------------------------------------

ServiceHandle::~ServiceHandle() { stop(); }

std::string ServiceHandle::url() const {
    const auto host = host_ == "0.0.0.0" ? std::string("127.0.0.1") : host_;
    return "http://" + host + ":" + std::to_string(port_);
}

void ServiceHandle::stop() {
    if (server_) server_->stop();
    if (listener_.joinable()) listener_.join();
}

void ServiceHandle::wait() {
    if (listener_.joinable()) listener_.join();
}

Result<std::unique_ptr<ServiceHandle>> serve(const ServiceConfig& config,
                                             std::shared_ptr<const Clock> clock) {
    auto bind = parse_bind_address(config.bind_address);
    if (!bind) return bind.error();
    auto service = Service::create(config, std::move(clock));
    if (!service) return service.error();

    std::unique_ptr<ServiceHandle> handle(new ServiceHandle());
    handle->service_ = std::move(*service);
    handle->server_ = std::make_unique<httplib::Server>();
    handle->host_ = bind->host;
    auto& server = *handle->server_;
    Service* svc = handle->service_.get();
    const auto threads = static_cast<std::size_t>(config.worker_threads);
    server.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };

    const auto adapter = [svc](const httplib::Request& req, httplib::Response& res) {
        ApiRequest api{req.method, req.path, {}, req.get_header_value("Authorization"), req.body};
        for (const auto& [k, v] : req.params) api.query.emplace(k, v);
        const auto out = svc->handle(api);
        res.status = out.status;
        res.set_content(out.body.dump(), "application/json");
    };
    // httplib defaults to SO_REUSEPORT, which would let a second server share
    // the port silently. Plain SO_REUSEADDR keeps restarts quick and still
    // makes a live listener a bind error.
    server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Get(R"(/.*)", adapter);
    server.Post(R"(/.*)", adapter);
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Authorization, Content-Type");
        res.status = 204;
    });

    if (bind->port == 0) {
        handle->port_ = server.bind_to_any_port(bind->host);
        if (handle->port_ < 0)
            return Error{ErrorCode::bind, "cannot bind to " + bind->host};
    } else {
        if (!server.bind_to_port(bind->host, bind->port))
            return Error{ErrorCode::bind, "cannot bind to " + config.bind_address};
        handle->port_ = bind->port;
    }
    handle->listener_ = std::thread([&server] { server.listen_after_bind(); });
    server.wait_until_ready();
    return handle;
}

}  // namespace geosocial::api
