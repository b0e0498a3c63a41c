#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "liepnm/error.hpp"
#include "liepnm/pipeline.hpp"

using namespace liepnm;
using namespace liepnm::pipeline;

namespace {

SolveConfig first_order(std::size_t n, std::uint64_t seed = 1) {
    SolveConfig c;
    c.family = charts::OdeFamily::first_order(expr::parse("1/r + r"), 1.0, 5.0);
    c.n = n;
    c.r_max = 2.05;
    c.samples = 40;
    c.burn_in = 50;
    c.seed = seed;
    c.grid_points = 50;
    return c;
}

SolveConfig second_order(std::size_t n) {
    SolveConfig c;
    c.family = charts::OdeFamily::second_order(5.0, 10.0, -10.0, 1.0);
    c.n = n;
    c.r_max = -0.238;
    c.samples = 40;
    c.burn_in = 50;
    c.seed = 3;
    c.grid_points = 50;
    return c;
}

double closed_form_second_order(double x) { return -4.0 - 36.0 / (x + 1.0); }

std::string stage_of(const SolveConfig& c) {
    try {
        (void)solve(c);
    } catch (const StageError& e) {
        return e.stage();
    }
    return "";
}

}  // namespace

TEST_CASE("configuration checks") {
    auto c = first_order(5);
    CHECK(c.basis_size() == 10);
    CHECK_NOTHROW(c.validate());
    c.N = 6;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.N = 7;
    CHECK_NOTHROW(c.validate());
    c = first_order(5);
    c.r_max = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = first_order(5);
    c.samples = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = first_order(0);
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = first_order(5);
    c.family.y0 = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = second_order(5);
    c.r_max = -0.31;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("design points") {
    const prior::HatBasis basis(0.0, 1.0, 9);
    const auto d = design_points(0.0, 1.0, 3, basis);
    CHECK(d.size() == 3);
    CHECK(d[0] == doctest::Approx(1.0 / 3.0));
    CHECK(d[2] == doctest::Approx(1.0 - 1.0 / 16.0));
    // Every nominal point lands on a knot when n divides N - 1.
    const prior::HatBasis coarse(0.0, 1.0, 5);
    const auto e = design_points(0.0, 1.0, 4, coarse);
    CHECK(e == std::vector<double>{0.125, 0.375, 0.625, 0.875});
    for (double r : design_points(1.0, 2.05, 40, prior::HatBasis(1.0, 2.05, 80)))
        CHECK(prior::HatBasis(1.0, 2.05, 80).knot_at(r, gauss::kKnotTolerance) < 0);
}

TEST_CASE("envelope helpers") {
    const auto c1 = charts::chart_first_order(5.0);
    CHECK(x_at_zeta(c1, 0.0) == doctest::Approx(1.0));
    CHECK(x_at_zeta(c1, 0.5) == doctest::Approx(std::sqrt(5.0)));
    CHECK(x_at_zeta(c1, 1.0) == doctest::Approx(5.0));
    const auto c2 = charts::chart_second_order(5.0, 10.0);
    CHECK(x_at_zeta(c2, 0.5) == doctest::Approx(1.0 / 0.15));
    CHECK(x_at_zeta(c2, 1.0) == doctest::Approx(10.0));

    const prior::HatBasis basis(0.0, 1.0, 3);
    const std::vector<double> z{0.0, 0.5, 1.0};
    CHECK(r_at_zeta(basis, z, 0.25) == doctest::Approx(0.25));
    CHECK(r_at_zeta(basis, z, 0.75) == doctest::Approx(0.75));
    const std::vector<double> flat{0.0, 0.4, 0.4};
    CHECK(r_at_zeta(basis, flat, 0.2) == doctest::Approx(0.25));
}

TEST_CASE("first-order reference") {
    CHECK(reference_first_order(1.0) == 1.0);
    CHECK(reference_first_order(std::numbers::e) == doctest::Approx(4.708202236182293).epsilon(1e-15));
    CHECK_THROWS_AS(reference_first_order(0.5), DomainError);
}

TEST_CASE("second-order reference against the closed form") {
    std::vector<double> grid;
    for (int i = 0; i <= 50; ++i) grid.push_back(5.0 + 0.1 * i);
    const auto y = reference_second_order(5.0, -10.0, 1.0, grid);
    REQUIRE(y.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(y[i] - closed_form_second_order(grid[i])) < 1e-9);
    CHECK(y.back() == doctest::Approx(-80.0 / 11.0).epsilon(1e-10));

    const std::vector<double> late{6.0, 7.0, 9.0};
    const auto yl = reference_second_order(5.0, -10.0, 1.0, late);
    CHECK(yl[0] == doctest::Approx(-64.0 / 7.0).epsilon(1e-10));
    CHECK(yl[1] == doctest::Approx(-8.5).epsilon(1e-10));
    CHECK(yl[2] == doctest::Approx(-7.6).epsilon(1e-10));

    // Tightening the tolerance does not move the answer.
    const auto coarse = reference_second_order(5.0, -10.0, 1.0, grid, 1e-8);
    const auto fine = reference_second_order(5.0, -10.0, 1.0, grid, 1e-13);
    CHECK(rmse(coarse, fine) < 1e-6);

    CHECK(reference_second_order(5.0, -10.0, 1.0, std::vector<double>{}).empty());
    CHECK_THROWS_AS(reference_second_order(5.0, -10.0, 1.0, std::vector<double>{4.0}), Error);
    CHECK_THROWS_AS(reference_second_order(5.0, -10.0, 1.0, std::vector<double>{6.0, 6.0}), Error);
}

TEST_CASE("rmse") {
    CHECK(rmse(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 4.0}) == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(rmse(std::vector<double>{}, std::vector<double>{}), Error);
    CHECK_THROWS_AS(rmse(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), Error);
}

TEST_CASE("first-order ensemble") {
    const auto cfg = first_order(5);
    const auto e = solve(cfg);
    CHECK(e.sample_count() == 40);
    CHECK(e.rho == 4);
    CHECK(e.b0 == 0.0);
    CHECK(e.z.rows() == 10);
    CHECK(e.design.size() == 5);
    CHECK(e.G == cfg.family.information(e.design));

    const auto linear = gauss::assemble(e.basis, 1.0, 0.0, e.design, e.data);
    for (Eigen::Index k = 0; k < e.z.cols(); ++k) {
        const Eigen::VectorXd z = e.z.col(k);
        CHECK((linear.Phi * z - linear.b).norm() < 1e-9);
        CHECK(prior::is_feasible_closed(std::vector<double>(z.data(), z.data() + z.size()), 1e-9));
        CHECK(e.x(0, k) == doctest::Approx(1.0));
        CHECK(e.y(0, k) == doctest::Approx(1.0));
        for (Eigen::Index i = 1; i < e.x.rows(); ++i) CHECK(e.x(i, k) >= e.x(i - 1, k) - 1e-12);
        // The s-curve image agrees with evaluation on the common x-grid.
        const std::span<const double> zs(e.z.col(k).data(), 10);
        for (Eigen::Index i = 0; i < e.x.rows(); i += 7) {
            if (e.x(i, k) > e.x_grid.back() || e.x(i, k) <= 1.0) continue;
            if (i + 1 < e.x.rows() && e.x(i + 1, k) == e.x(i, k)) continue;
            CHECK(std::abs(y_at_x(e.chart, e.basis, zs, e.x(i, k)) - e.y(i, k)) < 1e-8);
        }
    }
    CHECK(e.x_grid.front() == 1.0);
    CHECK(e.x_grid.size() == 50);
    const auto mean = e.mean_y();
    const auto lo = e.quantile_y(0.05);
    const auto hi = e.quantile_y(0.95);
    REQUIRE(mean.size() == e.x_grid.size());
    for (std::size_t i = 0; i < mean.size(); ++i) CHECK(lo[i] <= hi[i]);
    CHECK(mean.front() == doctest::Approx(1.0));
    CHECK(rmse(e, reference_first_order) < 0.5);
}

TEST_CASE("solve is deterministic in the seed") {
    const auto a = solve(first_order(5, 9));
    const auto b = solve(first_order(5, 9));
    const auto c = solve(first_order(5, 10));
    CHECK(a.z == b.z);
    CHECK(a.y_on_x == b.y_on_x);
    CHECK(a.z != c.z);
}

TEST_CASE("second-order ensemble tracks the solution") {
    const auto e = solve(second_order(10));
    CHECK(e.rho == 9);
    CHECK(e.x_grid.front() == 5.0);
    CHECK(e.mean_y().front() == doctest::Approx(-10.0));
    CHECK(rmse(e, closed_form_second_order) < 0.5);
}

TEST_CASE("failures are tagged with the stage") {
    auto singular = first_order(5);
    singular.family = charts::OdeFamily::first_order(expr::parse("r"), 1.0, 5.0);
    CHECK(stage_of(singular) == "information");
    auto blowup = second_order(5);
    blowup.r_max = -0.2;
    CHECK(stage_of(blowup) == "information");
    auto bad = first_order(5);
    bad.N = 3;
    CHECK_THROWS_AS(solve(bad), ConfigError);
}
