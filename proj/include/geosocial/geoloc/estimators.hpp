#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geosocial/common/result.hpp"
#include "geosocial/geoloc/metrics.hpp"
#include "geosocial/geoloc/solver.hpp"
#include "geosocial/geoloc/types.hpp"

namespace geosocial::geoloc {

inline constexpr double kDegeneracyTolerance = 1e-9;
// Phase candidate combinations tried before phase data is discarded.
inline constexpr std::size_t kMaxPoaCombinations = 32;

template <typename Scalar>
Vector2<Scalar> centroid(std::span<const Vector2<Scalar>> points) {
    Vector2<Scalar> c = Vector2<Scalar>::Zero();
    for (const auto& p : points) c += p;
    return points.empty() ? c : Vector2<Scalar>(c / Scalar(points.size()));
}

// True when every point lies within tol of a single line.
template <typename Scalar>
bool collinear(std::span<const Vector2<Scalar>> points, Scalar tol = Scalar(kDegeneracyTolerance)) {
    if (points.size() < 3) return true;
    const Vector2<Scalar> c = centroid(points);
    Eigen::Matrix<Scalar, 2, 2> scatter = Eigen::Matrix<Scalar, 2, 2>::Zero();
    for (const auto& p : points) scatter += (p - c) * (p - c).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, 2, 2>> eig(scatter);
    const Vector2<Scalar> normal = eig.eigenvectors().col(0);  // smallest eigenvalue
    for (const auto& p : points)
        if (std::abs(normal.dot(p - c)) > tol) return false;
    return true;
}

// Normal-matrix rank test at x: smallest eigenvalue of J^T J relative to the
// largest below tol.
template <typename Scalar>
bool rank_deficient_at(const ObservationSet<Scalar>& problem, const Vector2<Scalar>& x,
                       Scalar tol = Scalar(kDegeneracyTolerance)) {
    typename ObservationSet<Scalar>::Residuals r;
    typename ObservationSet<Scalar>::Jacobian J;
    problem.evaluate(x, r, J);
    const Eigen::Matrix<Scalar, 2, 2> N = J.transpose() * J;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, 2, 2>> eig(N, Eigen::EigenvaluesOnly);
    const Scalar hi = eig.eigenvalues()(1);
    return hi <= 0 || eig.eigenvalues()(0) <= tol * hi;
}

// Weighted least-squares intersection of bearing lines: minimizes the sum of
// squared perpendicular distances to each ray's supporting line.
template <typename Scalar>
std::optional<Vector2<Scalar>> bearing_intersection(std::span<const Vector2<Scalar>> anchors,
                                                    std::span<const Scalar> bearings,
                                                    std::span<const Scalar> weights) {
    Eigen::Matrix<Scalar, 2, 2> A = Eigen::Matrix<Scalar, 2, 2>::Zero();
    Vector2<Scalar> b = Vector2<Scalar>::Zero();
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        const Vector2<Scalar> n(-std::sin(bearings[i]), std::cos(bearings[i]));
        const Eigen::Matrix<Scalar, 2, 2> P = weights[i] * n * n.transpose();
        A += P;
        b += P * anchors[i];
    }
    Eigen::FullPivLU<Eigen::Matrix<Scalar, 2, 2>> lu(A);
    if (!lu.isInvertible()) return std::nullopt;
    return Vector2<Scalar>(lu.solve(b));
}

// Closed-form range fix: subtracting the mean of the squared-range equations
// |x - a_i|^2 = d_i^2 leaves a linear system in x. Exact for exact ranges,
// a good start otherwise. Empty when the anchors do not span the plane.
template <typename Scalar>
std::optional<Vector2<Scalar>> linearized_range_fix(std::span<const Vector2<Scalar>> anchors,
                                                    std::span<const Scalar> ranges,
                                                    std::span<const Scalar> weights) {
    const auto n = static_cast<Eigen::Index>(anchors.size());
    if (n < 3 || ranges.size() != anchors.size() || weights.size() != anchors.size())
        return std::nullopt;
    Vector2<Scalar> mean_a = Vector2<Scalar>::Zero();
    Scalar mean_c = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        mean_a += anchors[i];
        mean_c += anchors[i].squaredNorm() - ranges[i] * ranges[i];
    }
    mean_a /= Scalar(n);
    mean_c /= Scalar(n);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 2> A(n, 2);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Scalar sw = std::sqrt(weights[i]);
        A.row(i) = sw * Scalar(2) * (anchors[i] - mean_a).transpose();
        b(i) = sw * (anchors[i].squaredNorm() - ranges[i] * ranges[i] - mean_c);
    }
    Eigen::ColPivHouseholderQR<Eigen::Matrix<Scalar, Eigen::Dynamic, 2>> qr(A);
    qr.setThreshold(Scalar(kDegeneracyTolerance));
    if (qr.rank() < 2) return std::nullopt;
    Vector2<Scalar> x = qr.solve(b);
    if (!x.allFinite()) return std::nullopt;
    return x;
}

// Extra starts for range problems, which can hold a mirror-image local
// minimum: two rings of eight points about the anchor centroid, at half and
// full reach (farthest anchor offset plus its range).
template <typename Scalar>
std::vector<Vector2<Scalar>> spread_seeds(std::span<const Vector2<Scalar>> anchors,
                                          std::span<const Scalar> ranges) {
    std::vector<Vector2<Scalar>> out;
    if (anchors.empty() || ranges.size() != anchors.size()) return out;
    const Vector2<Scalar> c = centroid(anchors);
    Scalar reach = 0;
    for (std::size_t i = 0; i < anchors.size(); ++i)
        reach = std::max(reach, (anchors[i] - c).norm() + std::abs(ranges[i]));
    if (!(reach > 0) || !std::isfinite(reach)) return out;
    for (Scalar ring : {Scalar(0.5), Scalar(1)})
        for (int k = 0; k < 8; ++k) {
            const Scalar a = Scalar(k) * std::numbers::pi_v<Scalar> / Scalar(4);
            out.push_back(c + ring * reach * Vector2<Scalar>(std::cos(a), std::sin(a)));
        }
    return out;
}

// Runs the solver from each seed and keeps the lowest final cost; the first
// seed wins ties.
template <typename Scalar>
SolverReport<Scalar> solve_multistart(const ObservationSet<Scalar>& problem,
                                      std::span<const Vector2<Scalar>> seeds,
                                      const SolverOptions<Scalar>& opts) {
    std::optional<SolverReport<Scalar>> best;
    for (const auto& s : seeds) {
        auto rep = solve_damped_gauss_newton(problem, s, opts);
        if (!best || rep.cost < best->cost) best = std::move(rep);
    }
    return *best;
}

template <typename Scalar>
bool bearings_all_parallel(std::span<const Scalar> bearings) {
    for (std::size_t i = 0; i < bearings.size(); ++i)
        for (std::size_t j = i + 1; j < bearings.size(); ++j)
            if (std::abs(std::sin(bearings[i] - bearings[j])) >= Scalar(kDegeneracyTolerance))
                return false;
    return true;
}

namespace detail {

template <typename Scalar>
Result<Scalar> weight_from_sigma(std::optional<Scalar> sigma) {
    if (!sigma) return Scalar(1);
    if (!(*sigma > 0) || !std::isfinite(*sigma))
        return Error{ErrorCode::invalid_argument, "noise sigma must be positive"};
    return Scalar(1) / (*sigma * *sigma);
}

template <typename Scalar>
Result<std::vector<Scalar>> weights_from_sigmas(std::span<const Scalar> sigmas, std::size_t n) {
    if (!sigmas.empty() && sigmas.size() != n)
        return Error{ErrorCode::invalid_argument, "sigma count does not match observations"};
    std::vector<Scalar> w(n, Scalar(1));
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        auto wi = weight_from_sigma<Scalar>(sigmas[i]);
        if (!wi) return wi.error();
        w[i] = *wi;
    }
    return w;
}

template <typename Scalar>
BasicPositionEstimate<Scalar> to_estimate(const SolverReport<Scalar>& rep,
                                          const ObservationSet<Scalar>& problem) {
    BasicPositionEstimate<Scalar> est;
    est.position = rep.position;
    est.cost = rep.cost;
    est.gradient_norm = rep.gradient_norm;
    est.iterations = rep.iterations;
    est.converged = rep.converged;
    est.used_measurements = static_cast<int>(problem.size());
    est.rms_residual_m = problem.rms_residual_m(rep.position);
    return est;
}

template <typename Scalar>
std::vector<Vector2<Scalar>> positions_of(std::span<const BasicReferencePoint<Scalar>> rps) {
    std::vector<Vector2<Scalar>> out;
    out.reserve(rps.size());
    for (const auto& rp : rps) out.push_back(rp.position);
    return out;
}

template <typename Scalar>
bool all_finite(std::span<const BasicReferencePoint<Scalar>> rps) {
    for (const auto& rp : rps)
        if (!rp.position.allFinite()) return false;
    return true;
}

}  // namespace detail

// Range-only position fix. Minimizes sum w_i (|x - rp_i| - d_i)^2 starting
// from x0. Without a seed it starts from the reference-point centroid, the
// linearized fix and the spread seeds, and keeps the best end point.
// A run that exhausts the iteration budget still returns its best point,
// with converged = false.
template <typename Scalar>
Result<BasicPositionEstimate<Scalar>> estimate_multilateration(
    std::span<const BasicReferencePoint<Scalar>> rps, std::span<const Scalar> distances,
    std::span<const Scalar> sigmas = {}, std::optional<Vector2<Scalar>> x0 = std::nullopt,
    const SolverOptions<Scalar>& opts = {}) {
    if (rps.size() != distances.size())
        return Error{ErrorCode::invalid_argument, "one distance per reference point is required"};
    if (rps.size() < 3)
        return Error{ErrorCode::insufficient_rps, "at least 3 reference points are required"};
    if (!detail::all_finite(rps))
        return Error{ErrorCode::invalid_argument, "reference point coordinates must be finite"};
    for (Scalar d : distances)
        if (!std::isfinite(d) || d < 0)
            return Error{ErrorCode::invalid_argument, "distances must be finite and non-negative"};
    auto weights = detail::weights_from_sigmas(sigmas, rps.size());
    if (!weights) return weights.error();

    ObservationSet<Scalar> problem;
    for (std::size_t i = 0; i < rps.size(); ++i)
        problem.add({ObservationKind::range, rps[i].position, distances[i], (*weights)[i]});

    const auto anchors = detail::positions_of(rps);
    const Vector2<Scalar> seed =
        x0 ? *x0 : centroid(std::span<const Vector2<Scalar>>(anchors));
    if (collinear(std::span<const Vector2<Scalar>>(anchors)) && rank_deficient_at(problem, seed))
        return Error{ErrorCode::collinear_rps, "reference points are collinear"};

    std::vector<Vector2<Scalar>> seeds{seed};
    if (!x0) {
        const std::span<const Vector2<Scalar>> a(anchors);
        if (auto lin = linearized_range_fix(a, distances, std::span<const Scalar>(*weights)))
            seeds.push_back(*lin);
        for (const auto& s : spread_seeds(a, distances)) seeds.push_back(s);
    }
    return detail::to_estimate(
        solve_multistart(problem, std::span<const Vector2<Scalar>>(seeds), opts), problem);
}

// Bearing-only position fix, seeded by the linear least-squares intersection
// of the bearing lines.
template <typename Scalar>
Result<BasicPositionEstimate<Scalar>> estimate_aoa(std::span<const BasicReferencePoint<Scalar>> rps,
                                                   std::span<const Scalar> bearings_rad,
                                                   std::span<const Scalar> sigmas = {},
                                                   const SolverOptions<Scalar>& opts = {}) {
    if (rps.size() != bearings_rad.size())
        return Error{ErrorCode::invalid_argument, "one bearing per reference point is required"};
    if (rps.size() < 2)
        return Error{ErrorCode::insufficient_rps, "at least 2 reference points are required"};
    if (!detail::all_finite(rps))
        return Error{ErrorCode::invalid_argument, "reference point coordinates must be finite"};
    for (Scalar b : bearings_rad)
        if (!std::isfinite(b)) return Error{ErrorCode::invalid_argument, "bearing is not finite"};
    if (bearings_all_parallel(bearings_rad))
        return Error{ErrorCode::parallel_bearings, "bearings are parallel"};
    auto weights = detail::weights_from_sigmas(sigmas, rps.size());
    if (!weights) return weights.error();

    const auto anchors = detail::positions_of(rps);
    auto seed = bearing_intersection(std::span<const Vector2<Scalar>>(anchors), bearings_rad,
                                     std::span<const Scalar>(*weights));
    if (!seed) return Error{ErrorCode::parallel_bearings, "bearing lines do not intersect"};

    ObservationSet<Scalar> problem;
    for (std::size_t i = 0; i < rps.size(); ++i)
        problem.add({ObservationKind::bearing, rps[i].position, bearings_rad[i], (*weights)[i]});
    return detail::to_estimate(solve_damped_gauss_newton(problem, *seed, opts), problem);
}

template <typename Scalar>
struct FusionOptions {
    BasicPathLossModel<Scalar> path_loss{};
    Scalar wavelength_m = Scalar(0.125);  // 2.4 GHz carrier
    int poa_k_max = 3;
    SolverOptions<Scalar> solver{};
};

// Joint estimate over mixed measurements. TOA and RSS become ranges, AOA a
// bearing; each POA expands into its integer-cycle candidates and every
// candidate combination is solved, keeping the lowest final cost. When the
// combinations exceed kMaxPoaCombinations the phase data is dropped and the
// estimate is flagged.
template <typename Scalar>
Result<BasicPositionEstimate<Scalar>> fuse_estimate(
    std::span<const BasicReferencePoint<Scalar>> rps,
    std::span<const BasicMeasurement<Scalar>> measurements, const FusionOptions<Scalar>& opts = {}) {
    if (!opts.path_loss.valid())
        return Error{ErrorCode::invalid_argument, "invalid path-loss model"};
    if (!detail::all_finite(rps))
        return Error{ErrorCode::invalid_argument, "reference point coordinates must be finite"};
    std::map<std::string, Vector2<Scalar>, std::less<>> by_id;
    for (const auto& rp : rps)
        if (!by_id.emplace(rp.rp_id, rp.position).second)
            return Error{ErrorCode::invalid_argument, "duplicate reference point id: " + rp.rp_id};

    struct PhaseObs {
        Vector2<Scalar> anchor;
        std::vector<Scalar> candidates;
        Scalar weight;
    };
    ObservationSet<Scalar> fixed;
    std::vector<PhaseObs> phases;
    std::vector<Vector2<Scalar>> used_anchors;
    std::vector<Vector2<Scalar>> bearing_anchors;
    std::vector<Scalar> bearing_values, bearing_weights;
    int ranges = 0;

    for (const auto& m : measurements) {
        auto it = by_id.find(m.rp_id);
        if (it == by_id.end())
            return Error{ErrorCode::invalid_argument, "unknown reference point id: " + m.rp_id};
        if (!std::isfinite(m.value))
            return Error{ErrorCode::invalid_argument, "measurement value is not finite"};
        auto weight = detail::weight_from_sigma(m.noise_sigma);
        if (!weight) return weight.error();
        const Vector2<Scalar>& anchor = it->second;

        switch (m.kind) {
            case MetricKind::toa: {
                auto d = toa_to_distance(m.value);
                if (!d) return d.error();
                fixed.add({ObservationKind::range, anchor, *d, *weight});
                ++ranges;
                break;
            }
            case MetricKind::rss:
                fixed.add({ObservationKind::range, anchor, rss_to_distance(m.value, opts.path_loss),
                           *weight});
                ++ranges;
                break;
            case MetricKind::aoa:
                fixed.add({ObservationKind::bearing, anchor, m.value, *weight});
                bearing_anchors.push_back(anchor);
                bearing_values.push_back(m.value);
                bearing_weights.push_back(*weight);
                break;
            case MetricKind::poa: {
                auto cands = poa_to_distances(m.value, opts.wavelength_m, opts.poa_k_max);
                if (!cands) return cands.error();
                phases.push_back({anchor, std::move(*cands), *weight});
                break;
            }
        }
        used_anchors.push_back(anchor);
    }

    std::size_t combinations = 1;
    bool poa_dropped = false;
    for (const auto& p : phases) {
        combinations *= p.candidates.size();
        if (combinations > kMaxPoaCombinations) {
            poa_dropped = true;
            break;
        }
    }
    if (poa_dropped) {
        phases.clear();
        combinations = 1;
        // Drop the phase anchors from the seed geometry as well.
        used_anchors.clear();
        for (const auto& o : fixed.observations()) used_anchors.push_back(o.anchor);
    }

    const auto total = static_cast<std::size_t>(fixed.size()) + phases.size();
    if (total < 3)
        return Error{ErrorCode::insufficient_observations,
                     "at least 3 distance or bearing observations are required"};

    // Seed: bearing-line intersection for bearing-dominated sets, otherwise
    // the centroid of the contributing reference points.
    const auto range_count = static_cast<std::size_t>(ranges) + phases.size();
    Vector2<Scalar> seed = centroid(std::span<const Vector2<Scalar>>(used_anchors));
    if (range_count < 3 && bearing_anchors.size() >= 2 &&
        !bearings_all_parallel(std::span<const Scalar>(bearing_values))) {
        if (auto s = bearing_intersection(std::span<const Vector2<Scalar>>(bearing_anchors),
                                          std::span<const Scalar>(bearing_values),
                                          std::span<const Scalar>(bearing_weights)))
            seed = *s;
    }

    std::optional<BasicPositionEstimate<Scalar>> best;
    std::vector<std::size_t> pick(phases.size(), 0);
    for (std::size_t combo = 0; combo < combinations; ++combo) {
        std::size_t rest = combo;
        ObservationSet<Scalar> problem = fixed;
        for (std::size_t i = 0; i < phases.size(); ++i) {
            const auto n = phases[i].candidates.size();
            pick[i] = rest % n;
            rest /= n;
            problem.add({ObservationKind::range, phases[i].anchor, phases[i].candidates[pick[i]],
                         phases[i].weight});
        }
        if (bearing_anchors.empty() &&
            collinear(std::span<const Vector2<Scalar>>(used_anchors)) &&
            rank_deficient_at(problem, seed))
            return Error{ErrorCode::collinear_rps, "reference points are collinear"};
        std::vector<Vector2<Scalar>> seeds{seed};
        std::vector<Vector2<Scalar>> range_anchors;
        std::vector<Scalar> range_targets, range_weights;
        for (const auto& o : problem.observations())
            if (o.kind == ObservationKind::range) {
                range_anchors.push_back(o.anchor);
                range_targets.push_back(o.target);
                range_weights.push_back(o.weight);
            }
        const std::span<const Vector2<Scalar>> ra(range_anchors);
        const std::span<const Scalar> rt(range_targets);
        if (auto lin = linearized_range_fix(ra, rt, std::span<const Scalar>(range_weights)))
            seeds.push_back(*lin);
        for (const auto& s : spread_seeds(ra, rt)) seeds.push_back(s);
        auto est = detail::to_estimate(
            solve_multistart(problem, std::span<const Vector2<Scalar>>(seeds), opts.solver), problem);
        if (!best || est.cost < best->cost) best = est;
    }
    best->poa_dropped = poa_dropped;
    return *best;
}

}  // namespace geosocial::geoloc
