#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "liepnm/gauss.hpp"
#include "liepnm/rng.hpp"

namespace liepnm::tmg {

/// Standard Gaussian on R^rho restricted to {x : F x + g >= 0}.
///
/// Rows with (numerically) zero F encode constraints that the data already
/// fixed. They are dropped when satisfied and reported as infeasible otherwise,
/// so that the remaining polytope can have a nonempty interior.
class TruncatedGaussianProblem {
public:
    TruncatedGaussianProblem(Eigen::MatrixXd F, Eigen::VectorXd g);
    static TruncatedGaussianProblem from_polytope(const gauss::WhitenedPolytope& polytope);

    Eigen::Index rho() const { return F_.cols(); }
    Eigen::Index constraints() const { return F_.rows(); }
    const Eigen::MatrixXd& F() const { return F_; }
    const Eigen::VectorXd& g() const { return g_; }
    /// Index of each kept row in the matrix given to the constructor.
    const std::vector<Eigen::Index>& source_rows() const { return source_rows_; }
    /// F F^T, used to update F v after a reflection.
    const Eigen::MatrixXd& gram() const { return gram_; }

    Eigen::VectorXd slack(const Eigen::VectorXd& x) const { return F_ * x + g_; }

private:
    Eigen::MatrixXd F_;
    Eigen::VectorXd g_;
    Eigen::MatrixXd gram_;
    std::vector<Eigen::Index> source_rows_;
};

/// Relative row norm below which a constraint counts as fixed.
inline constexpr double kDegenerateRow = 1e-10;
/// Slack tolerance for fixed rows and for retained samples.
inline constexpr double kSlackTolerance = 1e-9;
/// Minimum slack of a starting point.
inline constexpr double kInteriorMargin = 1e-8;
/// Hit times closer than this to the current time are ignored.
inline constexpr double kHitSkip = 1e-12;
inline constexpr int kMaxBounces = 10000;

/// Strictly interior point, close to the center of the largest inscribed ball
/// (radius capped at 1). Throws InfeasibleError naming the tightest constraint.
Eigen::VectorXd find_feasible(const TruncatedGaussianProblem& problem);

struct BounceEvent {
    Eigen::Index constraint;
    double time;  // travel time elapsed within the step
    Eigen::VectorXd position;
    Eigen::VectorXd velocity_in;
    Eigen::VectorXd velocity_out;
    double energy_start;  // |x|^2 + |v|^2 at the start of the step
};

using BounceObserver = std::function<void(const BounceEvent&)>;

/// One exact HMC transition with travel time T. Throws SamplerError after
/// kMaxBounces reflections.
Eigen::VectorXd hmc_step(const TruncatedGaussianProblem& problem, const Eigen::VectorXd& position, CounterRng& rng,
                         double travel_time = 1.5707963267948966, const BounceObserver& observer = {});

/// Harmonic step from a given velocity.
Eigen::VectorXd hmc_step_with_velocity(const TruncatedGaussianProblem& problem, const Eigen::VectorXd& position,
                                       Eigen::VectorXd velocity, double travel_time = 1.5707963267948966,
                                       const BounceObserver& observer = {});

struct Chain {
    std::vector<Eigen::VectorXd> samples;
    std::uint64_t seed = 0;
    std::size_t burn_in = 0;
    double travel_time = 1.5707963267948966;
};

struct SampleOptions {
    std::size_t burn_in = 1000;
    double travel_time = 1.5707963267948966;
    std::uint64_t stream = 0;
};

Chain sample(const TruncatedGaussianProblem& problem, std::size_t count, std::uint64_t seed,
             const SampleOptions& options = {});

}  // namespace liepnm::tmg
