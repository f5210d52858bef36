#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

#include "geosocial/geoloc/metrics.hpp"
#include "geosocial/geoloc/types.hpp"

namespace geosocial::geoloc {

// Residual and its gradient with respect to the terminal position.
template <typename Scalar>
struct ResidualTerm {
    Scalar value = 0;
    Eigen::Matrix<Scalar, 1, 2> jacobian = Eigen::Matrix<Scalar, 1, 2>::Zero();
};

// r = |x - anchor| - range. At the anchor itself the gradient is undefined
// and reported as zero.
template <typename Scalar>
ResidualTerm<Scalar> range_residual(const Vector2<Scalar>& x, const Vector2<Scalar>& anchor,
                                    Scalar range) {
    const Vector2<Scalar> delta = x - anchor;
    const Scalar dist = delta.norm();
    ResidualTerm<Scalar> t;
    t.value = dist - range;
    if (dist > 0) t.jacobian = delta.transpose() / dist;
    return t;
}

// r = wrap(atan2(y - ay, x - ax) - bearing).
template <typename Scalar>
ResidualTerm<Scalar> bearing_residual(const Vector2<Scalar>& x, const Vector2<Scalar>& anchor,
                                      Scalar bearing) {
    const Vector2<Scalar> delta = x - anchor;
    const Scalar r2 = delta.squaredNorm();
    ResidualTerm<Scalar> t;
    t.value = wrap_angle(std::atan2(delta.y(), delta.x()) - bearing);
    if (r2 > 0) t.jacobian << -delta.y() / r2, delta.x() / r2;
    return t;
}

enum class ObservationKind { range, bearing };

template <typename Scalar>
struct Observation {
    ObservationKind kind = ObservationKind::range;
    Vector2<Scalar> anchor = Vector2<Scalar>::Zero();
    Scalar target = 0;  // meters for range, radians for bearing
    Scalar weight = 1;  // 1 / sigma^2
};

// Mixed range/bearing weighted least-squares objective
//   cost(x) = sum_i w_i r_i(x)^2.
template <typename Scalar>
class ObservationSet {
public:
    using Residuals = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Jacobian = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

    ObservationSet() = default;
    explicit ObservationSet(std::vector<Observation<Scalar>> obs) : obs_(std::move(obs)) {}

    void add(const Observation<Scalar>& o) { obs_.push_back(o); }
    const std::vector<Observation<Scalar>>& observations() const noexcept { return obs_; }
    Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(obs_.size()); }

    ResidualTerm<Scalar> term(const Observation<Scalar>& o, const Vector2<Scalar>& x) const {
        return o.kind == ObservationKind::range ? range_residual(x, o.anchor, o.target)
                                                : bearing_residual(x, o.anchor, o.target);
    }

    // Whitened residuals sqrt(w_i) r_i and their Jacobian.
    void evaluate(const Vector2<Scalar>& x, Residuals& r, Jacobian& J) const {
        r.resize(size());
        J.resize(size(), 2);
        for (Eigen::Index i = 0; i < size(); ++i) {
            const auto& o = obs_[static_cast<std::size_t>(i)];
            const auto t = term(o, x);
            const Scalar s = std::sqrt(o.weight);
            r(i) = s * t.value;
            J.row(i) = s * t.jacobian;
        }
    }

    Scalar cost(const Vector2<Scalar>& x) const {
        Scalar c = 0;
        for (const auto& o : obs_) {
            const Scalar v = term(o, x).value;
            c += o.weight * v * v;
        }
        return c;
    }

    // RMS of the unweighted residuals in meters. A bearing miss of r radians
    // at range rho is rho * sin(r) meters off the measured ray.
    Scalar rms_residual_m(const Vector2<Scalar>& x) const {
        if (obs_.empty()) return 0;
        Scalar sum = 0;
        for (const auto& o : obs_) {
            Scalar v = term(o, x).value;
            if (o.kind == ObservationKind::bearing) v = (x - o.anchor).norm() * std::sin(v);
            sum += v * v;
        }
        return std::sqrt(sum / Scalar(obs_.size()));
    }

private:
    std::vector<Observation<Scalar>> obs_;
};

template <typename Scalar>
struct SolverOptions {
    int max_iterations = 100;
    Scalar step_tolerance = Scalar(1e-9);       // meters
    Scalar gradient_tolerance = Scalar(1e-12);  // |J^T W r|
    Scalar initial_damping = Scalar(1e-3);
    Scalar damping_factor = Scalar(10);
};

template <typename Scalar>
struct SolverReport {
    Vector2<Scalar> position = Vector2<Scalar>::Zero();
    Scalar cost = 0;
    Scalar gradient_norm = 0;
    int iterations = 0;
    bool converged = false;
};

// Damped Gauss-Newton (Levenberg). Solves (J^T J + lambda I) dx = -J^T r on
// the whitened system; lambda shrinks by damping_factor after an accepted
// step and grows by it after a rejected one. Stops when the gradient or the
// step falls under tolerance.
template <typename Scalar, typename Problem>
SolverReport<Scalar> solve_damped_gauss_newton(const Problem& problem, Vector2<Scalar> x,
                                               const SolverOptions<Scalar>& opts = {}) {
    using Residuals = typename Problem::Residuals;
    using Jacobian = typename Problem::Jacobian;
    using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

    Residuals r;
    Jacobian J;
    problem.evaluate(x, r, J);
    Scalar cost = r.squaredNorm();
    Vector2<Scalar> grad = J.transpose() * r;
    Scalar lambda = opts.initial_damping;

    SolverReport<Scalar> report;
    int it = 0;
    while (it < opts.max_iterations) {
        if (grad.norm() < opts.gradient_tolerance) {
            report.converged = true;
            break;
        }
        ++it;
        const Matrix2 H = J.transpose() * J + lambda * Matrix2::Identity();
        const Vector2<Scalar> step = H.ldlt().solve(-grad);
        if (!step.allFinite()) {
            lambda *= opts.damping_factor;
            continue;
        }
        const Vector2<Scalar> candidate = x + step;
        Residuals r_new;
        Jacobian J_new;
        problem.evaluate(candidate, r_new, J_new);
        const Scalar cost_new = r_new.squaredNorm();
        const Vector2<Scalar> grad_new = J_new.transpose() * r_new;
        // Close to the minimum the cost change is lost in rounding long before
        // the gradient is. Once the model promises less than the cost can
        // resolve, let the gradient decide.
        const Scalar predicted = -Scalar(2) * grad.dot(step) - (J * step).squaredNorm();
        const Scalar resolution = std::sqrt(std::numeric_limits<Scalar>::epsilon()) * (Scalar(1) + cost);
        const bool accept = cost_new < cost ||
                            (predicted < resolution && grad_new.norm() < grad.norm());
        if (accept) {
            x = candidate;
            r.swap(r_new);
            J.swap(J_new);
            cost = cost_new;
            grad = grad_new;
            lambda = std::max(lambda / opts.damping_factor, std::numeric_limits<Scalar>::min());
            // Measured on the undamped step: a heavily damped one is short
            // without being anywhere near the minimum.
            const Vector2<Scalar> gn_step = (J.transpose() * J).ldlt().solve(-grad);
            if (step.norm() < opts.step_tolerance && gn_step.allFinite() &&
                gn_step.norm() < opts.step_tolerance) {
                report.converged = true;
                break;
            }
        } else {
            // No decrease even for a step below tolerance: x is a minimum to
            // working precision.
            if (step.norm() < opts.step_tolerance) {
                report.converged = true;
                break;
            }
            lambda *= opts.damping_factor;
        }
    }
    report.position = x;
    report.cost = cost;
    report.gradient_norm = grad.norm();
    report.iterations = it;
    return report;
}

}  // namespace geosocial::geoloc
