#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>

#include "liepnm/prior.hpp"

namespace liepnm::gauss {

/// Exact linear observations Phi z = b of the hat coefficients: one
/// initial-condition row [phi_j(r0)] followed by derivative rows [phi'_j(r_i)].
struct LinearData {
    Eigen::MatrixXd Phi;
    Eigen::VectorXd b;
};

/// Knot-collision tolerance for design points.
inline constexpr double kKnotTolerance = 1e-9;

/// Build Phi and b. `data` holds the zeta' targets b_1..b_n. Throws Error for a
/// design point at a knot or outside [t_1, t_N], RankError if Phi is rank deficient.
LinearData assemble(const prior::HatBasis& basis, double r0, double b0, std::span<const double> design,
                    std::span<const double> data);

/// zeta' target from a reduced gradient value: (G - lower_slope(r)) / width.
double derivative_target(const charts::CanonicalChart& chart, double r, double g);

/// N(0, I) conditioned on Phi z = b.
struct Conditioned {
    Eigen::VectorXd mu;
    Eigen::MatrixXd Sigma;
};

/// mu = Phi^T (Phi Phi^T)^{-1} b, Sigma = I - Phi^T (Phi Phi^T)^{-1} Phi.
/// Throws RankError when cond(Phi Phi^T) > 1e12.
Conditioned condition(const LinearData& data);

/// Sigma = U Lambda^2 U^T restricted to its non-null eigenspace.
struct Reduced {
    Eigen::MatrixXd U;       // N x rho, orthonormal columns
    Eigen::VectorXd lambda;  // rho positive entries
    Eigen::Index rho = 0;
};

/// Eigenvalues below 1e-10 * max(1, largest) are dropped. When `expected_rank` is given a
/// mismatch throws RankError.
Reduced reduce(const Eigen::MatrixXd& Sigma, std::optional<Eigen::Index> expected_rank = std::nullopt);

/// The constraint set Z mapped into whitened coordinates: z = mu + M zt,
/// z in Z  <=>  F zt + g >= 0.
struct WhitenedPolytope {
    Eigen::VectorXd mu;
    Eigen::MatrixXd M;
    Eigen::MatrixXd F;  // (N+1) x rho
    Eigen::VectorXd g;  // N+1
    Eigen::Index rho = 0;

    Eigen::VectorXd reconstruct(const Eigen::VectorXd& zt) const { return mu + M * zt; }
};

WhitenedPolytope whiten(const Eigen::VectorXd& mu, const Eigen::MatrixXd& U, const Eigen::VectorXd& lambda);

}  // namespace liepnm::gauss
