#include "liepnm/tmg.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "liepnm/error.hpp"

namespace liepnm::tmg {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TruncatedGaussianProblem::TruncatedGaussianProblem(MatrixXd F, VectorXd g) {
    if (F.rows() != g.size()) throw Error("truncated Gaussian: F has " + std::to_string(F.rows()) +
                                          " rows but g has " + std::to_string(g.size()) + " entries");
    if (!F.allFinite() || !g.allFinite()) throw Error("truncated Gaussian: non-finite constraint data");

    const VectorXd norms = F.rowwise().norm();
    const double scale = norms.size() > 0 ? norms.maxCoeff() : 0.0;
    for (Index i = 0; i < F.rows(); ++i) {
        if (norms(i) > kDegenerateRow * scale) {
            source_rows_.push_back(i);
            continue;
        }
        if (g(i) < -kSlackTolerance)
            throw InfeasibleError(static_cast<std::size_t>(i), g(i),
                                  "constraint " + std::to_string(i) + " is violated by the data (slack " +
                                      std::to_string(g(i)) + ")");
    }

    F_.resize(static_cast<Index>(source_rows_.size()), F.cols());
    g_.resize(static_cast<Index>(source_rows_.size()));
    for (std::size_t k = 0; k < source_rows_.size(); ++k) {
        F_.row(static_cast<Index>(k)) = F.row(source_rows_[k]);
        g_(static_cast<Index>(k)) = g(source_rows_[k]);
    }
    gram_ = F_ * F_.transpose();
}

TruncatedGaussianProblem TruncatedGaussianProblem::from_polytope(const gauss::WhitenedPolytope& polytope) {
    return TruncatedGaussianProblem(polytope.F, polytope.g);
}

namespace {

// Barrier objective for: maximize t subject to a_i x + c_i >= t, t <= 1,
// with unit rows a_i and a quadratic tie-breaker on x.
struct Phase1 {
    const MatrixXd& A;
    const VectorXd& c;
    double tau;

    double value(const VectorXd& x, double t) const {
        const VectorXd s = A * x + c - VectorXd::Constant(c.size(), t);
        if (s.minCoeff() <= 0.0 || t >= 1.0) return std::numeric_limits<double>::infinity();
        return -tau * t - s.array().log().sum() - std::log(1.0 - t) + 0.5 * x.squaredNorm();
    }
};

}  // namespace

VectorXd find_feasible(const TruncatedGaussianProblem& problem) {
    const Index rho = problem.rho();
    const Index K = problem.constraints();
    if (K == 0) return VectorXd::Zero(rho);

    const VectorXd norms = problem.F().rowwise().norm();
    const MatrixXd A = norms.cwiseInverse().asDiagonal() * problem.F();
    const VectorXd c = problem.g().cwiseQuotient(norms);

    VectorXd x = VectorXd::Zero(rho);
    double t = std::min(c.minCoeff(), 1.0) - 1.0;

    for (double tau = 1.0; tau < 1e12 * static_cast<double>(K + 1); tau *= 8.0) {
        const Phase1 obj{A, c, tau};
        for (int it = 0; it < 100; ++it) {
            const VectorXd s = A * x + c - VectorXd::Constant(K, t);
            const VectorXd inv = s.cwiseInverse();
            const VectorXd inv2 = inv.cwiseAbs2();

            VectorXd grad(rho + 1);
            grad.head(rho) = -A.transpose() * inv + x;
            grad(rho) = -tau + inv.sum() + 1.0 / (1.0 - t);

            MatrixXd H = MatrixXd::Zero(rho + 1, rho + 1);
            H.topLeftCorner(rho, rho) = A.transpose() * inv2.asDiagonal() * A + MatrixXd::Identity(rho, rho);
            const VectorXd cross = -A.transpose() * inv2;
            H.topRightCorner(rho, 1) = cross;
            H.bottomLeftCorner(1, rho) = cross.transpose();
            H(rho, rho) = inv2.sum() + 1.0 / ((1.0 - t) * (1.0 - t));

            const VectorXd step = -H.ldlt().solve(grad);
            const double decrement = -grad.dot(step);
            if (!std::isfinite(decrement) || decrement < 1e-12) break;

            const double f0 = obj.value(x, t);
            double alpha = 1.0;
            while (alpha > 1e-14) {
                const VectorXd xn = x + alpha * step.head(rho);
                const double tn = t + alpha * step(rho);
                if (obj.value(xn, tn) <= f0 - 0.25 * alpha * decrement) {
                    x = xn;
                    t = tn;
                    break;
                }
                alpha *= 0.5;
            }
            if (alpha <= 1e-14) break;
        }
        // Once the inscribed radius is clearly positive there is nothing left to certify.
        if (t > 0.5) break;
    }

    const VectorXd slack = problem.slack(x);
    Index worst = 0;
    const VectorXd normalized = slack.cwiseQuotient(norms);
    normalized.minCoeff(&worst);
    if (!(slack.minCoeff() > kInteriorMargin)) {
        const auto row = problem.source_rows()[static_cast<std::size_t>(worst)];
        throw InfeasibleError(static_cast<std::size_t>(row), normalized(worst),
                              "polytope has empty interior; tightest constraint is " + std::to_string(row) +
                                  " (normalized slack " + std::to_string(normalized(worst)) + ")");
    }
    return x;
}

VectorXd hmc_step_with_velocity(const TruncatedGaussianProblem& problem, const VectorXd& position, VectorXd velocity,
                                double travel_time, const BounceObserver& observer) {
    const MatrixXd& F = problem.F();
    const VectorXd& g = problem.g();
    const MatrixXd& gram = problem.gram();
    const double energy_start = position.squaredNorm() + velocity.squaredNorm();
    constexpr double two_pi = 2.0 * std::numbers::pi;
    constexpr int refresh = 64;

    VectorXd x = position;
    VectorXd v = std::move(velocity);
    // F x and F v are carried along the flow and refreshed periodically.
    VectorXd fx = F * x;
    VectorXd fv = F * v;
    double elapsed = 0.0;
    int bounces = 0;

    while (true) {
        const double remaining = travel_time - elapsed;

        double t_hit = std::numeric_limits<double>::infinity();
        Index wall = -1;
        for (Index i = 0; i < F.rows(); ++i) {
            const double amp = std::sqrt(fx(i) * fx(i) + fv(i) * fv(i));
            if (!(amp > std::abs(g(i)))) continue;
            const double phase = std::atan2(fv(i), fx(i));
            // Root where the slack amp*cos(t - phase) + g is decreasing.
            double t = phase + std::acos(-g(i) / amp);
            t = std::fmod(t, two_pi);
            if (t < 0.0) t += two_pi;
            if (t < kHitSkip) t += two_pi;
            if (t < t_hit) {
                t_hit = t;
                wall = i;
            }
        }

        if (wall < 0 || t_hit > remaining) {
            return v * std::sin(remaining) + x * std::cos(remaining);
        }

        const double sn = std::sin(t_hit);
        const double cs = std::cos(t_hit);
        VectorXd xn = v * sn + x * cs;
        const VectorXd vn = v * cs - x * sn;
        const VectorXd fxn = fv * sn + fx * cs;
        fv = fv * cs - fx * sn;
        fx = fxn;
        x = std::move(xn);

        const double alpha = 2.0 * fv(wall) / gram(wall, wall);
        VectorXd reflected = vn - alpha * F.row(wall).transpose();
        fv -= alpha * gram.col(wall);
        elapsed += t_hit;
        if (observer) observer(BounceEvent{wall, elapsed, x, vn, reflected, energy_start});
        v = std::move(reflected);

        if (++bounces > kMaxBounces)
            throw SamplerError("trajectory trapped in a corner (more than " + std::to_string(kMaxBounces) +
                               " bounces in one step)");
        if (bounces % refresh == 0) {
            fx.noalias() = F * x;
            fv.noalias() = F * v;
        }
    }
}

VectorXd hmc_step(const TruncatedGaussianProblem& problem, const VectorXd& position, CounterRng& rng,
                  double travel_time, const BounceObserver& observer) {
    std::normal_distribution<double> normal;
    VectorXd v(problem.rho());
    for (Index k = 0; k < v.size(); ++k) v(k) = normal(rng);
    return hmc_step_with_velocity(problem, position, std::move(v), travel_time, observer);
}

Chain sample(const TruncatedGaussianProblem& problem, std::size_t count, std::uint64_t seed,
             const SampleOptions& options) {
    if (count < 1) throw ConfigError("sample count must be at least 1");
    if (!(options.travel_time > 0.0)) throw ConfigError("travel time must be positive");

    CounterRng rng(seed, options.stream);
    VectorXd x = find_feasible(problem);

    Chain chain;
    chain.seed = seed;
    chain.burn_in = options.burn_in;
    chain.travel_time = options.travel_time;
    chain.samples.reserve(count);

    for (std::size_t step = 0; step < options.burn_in + count; ++step) {
        x = hmc_step(problem, x, rng, options.travel_time);
        if (step < options.burn_in) continue;
        if (problem.constraints() > 0) {
            Index worst = 0;
            const double lowest = problem.slack(x).minCoeff(&worst);
            if (lowest < -kSlackTolerance)
                throw SamplerError("sample left the polytope at constraint " + std::to_string(worst) +
                                   " (slack " + std::to_string(lowest) + ")");
        }
        chain.samples.push_back(x);
    }
    return chain;
}

}  // namespace liepnm::tmg
