#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "geosocial/geoloc/estimators.hpp"
#include "support.hpp"

using namespace geosocial;
using namespace geosocial::geoloc;
using V = Vector2<double>;

namespace {

std::vector<ReferencePoint> rps(std::initializer_list<V> points) {
    std::vector<ReferencePoint> out;
    int i = 0;
    for (const auto& p : points) out.push_back({"rp" + std::to_string(i++), p});
    return out;
}

std::vector<double> exact_ranges(const std::vector<ReferencePoint>& r, const V& x) {
    std::vector<double> d;
    for (const auto& rp : r) d.push_back((x - rp.position).norm());
    return d;
}

template <typename F>
Eigen::RowVector2d central_difference(F f, const V& x, double h = 1e-6) {
    Eigen::RowVector2d g;
    for (int k = 0; k < 2; ++k) {
        V e = V::Zero();
        e(k) = h;
        g(k) = (f(x + e) - f(x - e)) / (2 * h);
    }
    return g;
}

double relative_error(const Eigen::RowVector2d& a, const Eigen::RowVector2d& b) {
    return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace

TEST_CASE("multilateration from three exact ranges") {
    const auto r = rps({{0, 0}, {100, 0}, {0, 100}});
    const std::vector<double> d{50.0, std::sqrt(70.0 * 70 + 40 * 40), std::sqrt(30.0 * 30 + 60 * 60)};
    auto est = estimate_multilateration<double>(r, d);
    REQUIRE(est);
    CHECK((est->position - V(30, 40)).norm() < 1e-6);
    CHECK(est->converged);
    CHECK(est->rms_residual_m < 1e-9);
    CHECK(est->used_measurements == 3);

    auto grid = testing::grid_oracle({{r[0].position, d[0]}, {r[1].position, d[1]}, {r[2].position, d[2]}},
                                     {}, {0, 0}, {100, 100}, 0.5);
    CHECK((grid.point - V(30, 40)).norm() <= 0.5);
}

TEST_CASE("terminal sitting on a reference point") {
    const auto r = rps({{0, 0}, {100, 0}, {0, 100}, {100, 100}});
    auto est = estimate_multilateration<double>(r, exact_ranges(r, V(100, 0)));
    REQUIRE(est);
    CHECK((est->position - V(100, 0)).norm() < 1e-6);
    CHECK(est->rms_residual_m < 1e-6);
}

TEST_CASE("multilateration preconditions") {
    CHECK(estimate_multilateration<double>(rps({{0, 0}, {1, 0}}), std::vector<double>{1, 1}).code() ==
          ErrorCode::insufficient_rps);
    CHECK(estimate_multilateration<double>(rps({{0, 0}, {1, 0}, {0, 1}}), std::vector<double>{1, 1}).code() ==
          ErrorCode::invalid_argument);
    const auto line = rps({{0, 0}, {10, 0}, {20, 0}});
    CHECK(estimate_multilateration<double>(line, exact_ranges(line, V(5, 5))).code() ==
          ErrorCode::collinear_rps);
    CHECK(estimate_multilateration<double>(rps({{0, 0}, {1, 0}, {0, 1}}), std::vector<double>{1, -1, 1})
              .code() == ErrorCode::invalid_argument);
    CHECK(estimate_multilateration<double>(rps({{0, 0}, {1, 0}, {0, 1}}), std::vector<double>{1, 1, 1},
                                           std::vector<double>{1, 0, 1})
              .code() == ErrorCode::invalid_argument);
}

TEST_CASE("explicit seed is honoured") {
    const auto r = rps({{0, 0}, {100, 0}, {0, 100}});
    auto est = estimate_multilateration<double>(r, exact_ranges(r, V(30, 40)), {}, V(31, 41));
    REQUIRE(est);
    CHECK((est->position - V(30, 40)).norm() < 1e-6);
}

TEST_CASE("iteration budget exhausted reports converged = false") {
    const auto r = rps({{0, 0}, {100, 0}, {0, 100}});
    SolverOptions<double> opts;
    opts.max_iterations = 1;
    auto est = estimate_multilateration<double>(r, exact_ranges(r, V(30, 40)), {}, V(500, 500), opts);
    REQUIRE(est);
    CHECK_FALSE(est->converged);
    CHECK(est->iterations == 1);
}

TEST_CASE("bearing-only fix") {
    const auto r = rps({{0, 0}, {10, 0}});
    const std::vector<double> b{std::numbers::pi / 4, 3 * std::numbers::pi / 4};
    auto est = estimate_aoa<double>(r, b);
    REQUIRE(est);
    CHECK((est->position - V(5, 5)).norm() < 1e-9);

    const auto stacked = rps({{0, 0}, {0, 10}});
    CHECK(estimate_aoa<double>(stacked, std::vector<double>{0, 0}).code() == ErrorCode::parallel_bearings);
    CHECK(estimate_aoa<double>(stacked, std::vector<double>{0, std::numbers::pi}).code() ==
          ErrorCode::parallel_bearings);
    CHECK(estimate_aoa<double>(rps({{0, 0}}), std::vector<double>{0}).code() == ErrorCode::insufficient_rps);
}

TEST_CASE("three noisy bearings land in the oracle's grid cell") {
    const V truth(40, 25);
    const auto r = rps({{0, 0}, {100, 0}, {50, 90}});
    const std::vector<double> noise{0.01, -0.015, 0.008};
    std::vector<double> b;
    std::vector<testing::BearingObs> obs;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const V d = truth - r[i].position;
        b.push_back(std::atan2(d.y(), d.x()) + noise[i]);
        obs.push_back({r[i].position, b.back()});
    }
    auto est = estimate_aoa<double>(r, b);
    REQUIRE(est);
    auto grid = testing::grid_oracle({}, obs, {0, 0}, {100, 100}, 0.5);
    CHECK(std::abs(est->position.x() - grid.point.x()) <= 0.5);
    CHECK(std::abs(est->position.y() - grid.point.y()) <= 0.5);
    CHECK(testing::oracle_cost({}, obs, est->position) <= grid.cost + 1e-9);
}

TEST_CASE("analytic Jacobians match central differences") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-500, 500);
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
    double worst_range = 0, worst_bearing = 0;
    for (int i = 0; i < 100; ++i) {
        const V anchor(u(rng), u(rng));
        V x(u(rng), u(rng));
        while ((x - anchor).norm() < 1.0) x = V(u(rng), u(rng));
        const double d = std::abs(u(rng)), theta = ang(rng);

        auto rf = [&](const V& p) { return range_residual(p, anchor, d).value; };
        worst_range = std::max(worst_range, relative_error(range_residual(x, anchor, d).jacobian,
                                                           central_difference(rf, x)));
        // Keep the finite-difference stencil away from the wrap discontinuity.
        const V delta = x - anchor;
        const double phi = std::atan2(delta.y(), delta.x());
        const double theta_safe = std::abs(wrap_angle(phi - theta)) > 3.0 ? phi : theta;
        auto bf = [&](const V& p) { return bearing_residual(p, anchor, theta_safe).value; };
        worst_bearing = std::max(worst_bearing, relative_error(bearing_residual(x, anchor, theta_safe).jacobian,
                                                               central_difference(bf, x)));
    }
    CHECK(worst_range < 1e-5);
    CHECK(worst_bearing < 1e-5);
}

TEST_CASE("fusion") {
    const V truth(30, 40);
    const auto r = rps({{0, 0}, {100, 0}, {0, 100}});

    SUBCASE("three TOA reduce to multilateration") {
        std::vector<Measurement> ms;
        for (const auto& rp : r)
            ms.push_back({rp.rp_id, MetricKind::toa, distance_to_toa((truth - rp.position).norm()), {}});
        auto fused = fuse_estimate<double>(r, ms);
        std::vector<double> d;
        for (const auto& m : ms) d.push_back(*toa_to_distance(m.value));
        auto multi = estimate_multilateration<double>(r, d);
        REQUIRE(fused);
        REQUIRE(multi);
        CHECK(fused->position == multi->position);
        CHECK(fused->iterations == multi->iterations);
    }
    SUBCASE("two TOA and one AOA") {
        std::vector<Measurement> ms{
            {"rp0", MetricKind::toa, distance_to_toa(50.0), {}},
            {"rp1", MetricKind::toa, distance_to_toa(std::sqrt(70.0 * 70 + 40 * 40)), {}},
            {"rp2", MetricKind::aoa, std::atan2(40.0 - 100.0, 30.0), {}},
        };
        auto est = fuse_estimate<double>(r, ms);
        REQUIRE(est);
        CHECK((est->position - truth).norm() < 1e-6);
        auto grid = testing::grid_oracle({{r[0].position, 50.0}, {r[1].position, std::sqrt(70.0 * 70 + 40 * 40)}},
                                         {{r[2].position, std::atan2(-60.0, 30.0)}}, {0, 0}, {100, 100}, 0.5);
        CHECK((grid.point - truth).norm() <= 0.5);
    }
    SUBCASE("RSS ranges") {
        const PathLossModel pl{-40, 1, 2.2};
        std::vector<Measurement> ms;
        for (const auto& rp : r)
            ms.push_back({rp.rp_id, MetricKind::rss, distance_to_rss((truth - rp.position).norm(), pl), {}});
        auto est = fuse_estimate<double>(r, ms, {pl});
        REQUIRE(est);
        CHECK((est->position - truth).norm() < 1e-6);
    }
    SUBCASE("phase ambiguity is resolved") {
        FusionOptions<double> opts;
        opts.wavelength_m = 30.0;
        opts.poa_k_max = 2;  // 3^3 = 27 combinations
        std::vector<Measurement> ms;
        for (const auto& rp : r) {
            const double d = (truth - rp.position).norm();
            ms.push_back({rp.rp_id, MetricKind::toa, distance_to_toa(d), 5.0});
            const double cycles = d / opts.wavelength_m;
            ms.push_back({rp.rp_id, MetricKind::poa, 2 * std::numbers::pi * (cycles - std::floor(cycles)), 0.01});
        }
        auto est = fuse_estimate<double>(r, ms, opts);
        REQUIRE(est);
        CHECK_FALSE(est->poa_dropped);
        CHECK((est->position - truth).norm() < 1e-6);
    }
    SUBCASE("too many phase combinations drop the phase data") {
        std::vector<Measurement> ms;
        for (const auto& rp : r) {
            ms.push_back({rp.rp_id, MetricKind::toa, distance_to_toa((truth - rp.position).norm()), {}});
            ms.push_back({rp.rp_id, MetricKind::poa, 1.0, {}});
        }
        auto est = fuse_estimate<double>(r, ms);  // 4^3 = 64 > 32
        REQUIRE(est);
        CHECK(est->poa_dropped);
        CHECK(est->used_measurements == 3);
        CHECK((est->position - truth).norm() < 1e-6);
    }
    SUBCASE("errors") {
        std::vector<Measurement> two{{"rp0", MetricKind::toa, 1e-7, {}}, {"rp1", MetricKind::toa, 1e-7, {}}};
        CHECK(fuse_estimate<double>(r, two).code() == ErrorCode::insufficient_observations);
        std::vector<Measurement> unknown{{"nope", MetricKind::toa, 1e-7, {}}};
        CHECK(fuse_estimate<double>(r, unknown).code() == ErrorCode::invalid_argument);
        std::vector<Measurement> neg{{"rp0", MetricKind::toa, -1e-7, {}}};
        CHECK(fuse_estimate<double>(r, neg).code() == ErrorCode::negative_time);
        std::vector<Measurement> phase{{"rp0", MetricKind::poa, 9.0, {}}};
        CHECK(fuse_estimate<double>(r, phase).code() == ErrorCode::bad_phase);
        const auto line = rps({{0, 0}, {10, 0}, {20, 0}});
        std::vector<Measurement> col;
        for (const auto& rp : line)
            col.push_back({rp.rp_id, MetricKind::toa, distance_to_toa((V(5, 5) - rp.position).norm()), {}});
        CHECK(fuse_estimate<double>(line, col).code() == ErrorCode::collinear_rps);
    }
}
