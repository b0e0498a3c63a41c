#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "liepnm/charts.hpp"
#include "liepnm/gauss.hpp"
#include "liepnm/prior.hpp"

namespace liepnm::pipeline {

struct SolveConfig {
    charts::OdeFamily family;
    std::size_t n = 0;
    std::size_t N = 0;  // 0 means 2n
    double r_max = 0.0;
    std::size_t samples = 200;
    std::size_t burn_in = 1000;
    std::uint64_t seed = 0;
    double travel_time = 1.5707963267948966;
    std::size_t grid_points = 200;

    std::size_t basis_size() const { return N == 0 ? 2 * n : N; }
    /// Throws ConfigError on invalid values, including N < n + 2.
    void validate() const;
};

/// n points r_i = r0 + i (r_max - r0) / n. A point within 1e-9 of a knot moves
/// to the midpoint of the knot interval on its left (right for the first knot).
std::vector<double> design_points(double r0, double r_max, std::size_t n, const prior::HatBasis& basis);

/// Posterior samples and their images.
struct PosteriorEnsemble {
    charts::CanonicalChart chart;
    prior::HatBasis basis;
    std::vector<double> design;
    std::vector<double> G;     // reduced gradient at the design points
    std::vector<double> data;  // zeta' targets
    double b0 = 0.0;           // zeta(r0)
    Eigen::Index rho = 0;

    Eigen::MatrixXd z;  // N x samples

    std::vector<double> r_grid;
    Eigen::MatrixXd s;  // grid x samples
    Eigen::MatrixXd x;  // grid x samples, image of (r_grid, s)
    Eigen::MatrixXd y;

    /// Common x-grid [x0, min(xT, smallest x reached at r_max)].
    std::vector<double> x_grid;
    Eigen::MatrixXd y_on_x;  // x_grid x samples

    std::size_t sample_count() const { return static_cast<std::size_t>(z.cols()); }
    std::vector<double> mean_y() const;
    /// Pointwise empirical quantile of y on the common x-grid.
    std::vector<double> quantile_y(double q) const;
};

/// Full pipeline. Errors raised after validation are wrapped in StageError.
PosteriorEnsemble solve(const SolveConfig& config);

/// x on the chart's envelope at normalized height zeta (independent of r for both charts).
double x_at_zeta(const charts::CanonicalChart& chart, double zeta);
/// r where a nondecreasing hat expansion reaches `target`.
double r_at_zeta(const prior::HatBasis& basis, std::span<const double> z, double target);
/// y of a sample curve at abscissa x.
double y_at_x(const charts::CanonicalChart& chart, const prior::HatBasis& basis, std::span<const double> z, double x);

/// y(x) = x sqrt(1 + 2 ln x), the solution of y' = x/y + y/x, y(1) = 1.
double reference_first_order(double x);

/// Adaptive Runge-Kutta (Dormand-Prince) solution of
/// (x - y) y'' + 2 y' (y' + 1) + y'^{3/2} = 0 sampled at an increasing grid starting at or after x0.
std::vector<double> reference_second_order(double x0, double y0, double y0_prime, std::span<const double> grid,
                                           double tolerance = 1e-12);

double rmse(std::span<const double> estimate, std::span<const double> reference);
/// RMS of (posterior mean - reference) over the common x-grid.
double rmse(const PosteriorEnsemble& ensemble, const std::function<double(double)>& reference);
double rmse(const PosteriorEnsemble& ensemble, std::span<const double> reference_on_grid);

}  // namespace liepnm::pipeline
