#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "liepnm/error.hpp"
#include "liepnm/tmg.hpp"

using namespace liepnm;
using namespace liepnm::tmg;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

TruncatedGaussianProblem make(std::initializer_list<std::initializer_list<double>> rows) {
    const auto K = static_cast<Eigen::Index>(rows.size());
    const auto cols = static_cast<Eigen::Index>(rows.begin()->size()) - 1;
    MatrixXd F(K, cols);
    VectorXd g(K);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (double v : row) {
            if (j < cols)
                F(i, j) = v;
            else
                g(i) = v;
            ++j;
        }
        ++i;
    }
    return {F, g};
}

VectorXd mean_of(const std::vector<VectorXd>& xs) {
    VectorXd m = VectorXd::Zero(xs.front().size());
    for (const auto& x : xs) m += x;
    return m / static_cast<double>(xs.size());
}

MatrixXd cov_of(const std::vector<VectorXd>& xs) {
    const VectorXd m = mean_of(xs);
    MatrixXd c = MatrixXd::Zero(m.size(), m.size());
    for (const auto& x : xs) c += (x - m) * (x - m).transpose();
    return c / static_cast<double>(xs.size() - 1);
}

}  // namespace

TEST_CASE("half-normal mean") {
    const auto p = make({{1.0, 0.0}});
    const auto chain = sample(p, 100000, 1, {.burn_in = 100});
    CHECK(std::abs(mean_of(chain.samples)(0) - 0.7978845608028654) < 0.02);
    for (const auto& x : chain.samples) CHECK(x(0) >= 0.0);
}

TEST_CASE("variance on [-1, 1]") {
    const auto p = make({{1.0, 1.0}, {-1.0, 1.0}});
    const auto chain = sample(p, 100000, 2, {.burn_in = 100});
    CHECK(std::abs(cov_of(chain.samples)(0, 0) - 0.29112509477279314) < 0.01);
    CHECK(std::abs(mean_of(chain.samples)(0)) < 0.01);
}

TEST_CASE("no constraints gives the standard normal") {
    const TruncatedGaussianProblem p(MatrixXd(0, 3), VectorXd(0));
    const auto chain = sample(p, 20000, 3, {.burn_in = 10});
    CHECK(mean_of(chain.samples).norm() < 0.05);
    CHECK((cov_of(chain.samples) - MatrixXd::Identity(3, 3)).norm() < 0.08);
}

TEST_CASE("moments agree with rejection sampling on five polytopes") {
    const std::vector<TruncatedGaussianProblem> problems = {
        make({{1.0, 0.0, 0.5}, {0.0, 1.0, 0.5}}),
        make({{1.0, 1.0, 0.0}, {-1.0, 0.0, 1.5}}),
        make({{1.0, 0.0, 0.0}, {-1.0, 1.0, 0.0}, {0.0, -1.0, 1.0}}),
        make({{1.0, 0.0, -0.5}, {-1.0, 0.0, 2.0}, {0.0, 1.0, 1.0}, {0.0, -1.0, 1.0}}),
        make({{2.0, -1.0, 0.3}, {-1.0, 3.0, 0.2}, {-1.0, -1.0, 1.5}}),
    };
    std::uint64_t seed = 40;
    for (const auto& p : problems) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal;
        std::vector<VectorXd> accepted;
        while (accepted.size() < 40000) {
            VectorXd x(2);
            x << normal(rng), normal(rng);
            if (p.slack(x).minCoeff() >= 0.0) accepted.push_back(x);
        }
        const auto chain = sample(p, 40000, seed++, {.burn_in = 200});
        for (const auto& x : chain.samples) CHECK(p.slack(x).minCoeff() >= -kSlackTolerance);
        CHECK((mean_of(chain.samples) - mean_of(accepted)).norm() < 0.03);
        CHECK((cov_of(chain.samples) - cov_of(accepted)).norm() < 0.04);
    }
}

TEST_CASE("bounces conserve energy and reflect across the wall") {
    const auto p = make({{1.0, 0.0, 0.0, 0.2}, {-1.0, 1.0, 0.0, 0.1}, {0.0, -1.0, 1.0, 0.1}, {0.0, 0.0, -1.0, 1.0}});
    CounterRng rng(9);
    VectorXd x = find_feasible(p);
    int events = 0;
    const BounceObserver check = [&](const BounceEvent& e) {
        ++events;
        const double energy = e.position.squaredNorm() + e.velocity_in.squaredNorm();
        CHECK(std::abs(energy - e.energy_start) < 1e-9 * std::max(1.0, e.energy_start));
        CHECK(std::abs(e.velocity_out.norm() - e.velocity_in.norm()) < 1e-9);
        const VectorXd f = p.F().row(e.constraint).transpose();
        CHECK(std::abs(p.slack(e.position)(e.constraint)) < 1e-9);
        CHECK(std::abs(f.dot(e.velocity_out) + f.dot(e.velocity_in)) < 1e-9);
        CHECK(f.dot(e.velocity_out) >= -1e-12);
        CHECK(e.time >= 0.0);
        CHECK(e.time <= std::acos(-1.0) / 2.0);
    };
    for (int step = 0; step < 500; ++step) {
        x = hmc_step(p, x, rng, std::acos(-1.0) / 2.0, check);
        CHECK(p.slack(x).minCoeff() >= -kSlackTolerance);
    }
    CHECK(events > 100);
}

TEST_CASE("free flow is a rotation") {
    const TruncatedGaussianProblem p(MatrixXd(0, 2), VectorXd(0));
    VectorXd x(2), v(2);
    x << 1.0, 2.0;
    v << -0.5, 0.25;
    const VectorXd y = hmc_step_with_velocity(p, x, v, 0.3);
    CHECK((y - (x * std::cos(0.3) + v * std::sin(0.3))).norm() < 1e-15);
}

TEST_CASE("chains are reproducible from the seed") {
    const auto p = make({{1.0, 0.0, 0.5}, {0.0, 1.0, 0.5}, {-1.0, -1.0, 2.0}});
    const auto a = sample(p, 200, 77, {.burn_in = 20});
    const auto b = sample(p, 200, 77, {.burn_in = 20});
    const auto c = sample(p, 200, 78, {.burn_in = 20});
    const auto d = sample(p, 200, 77, {.burn_in = 20, .stream = 1});
    CHECK(a.seed == 77);
    CHECK(a.burn_in == 20);
    for (std::size_t i = 0; i < 200; ++i) CHECK(a.samples[i] == b.samples[i]);
    CHECK(a.samples.back() != c.samples.back());
    CHECK(a.samples.back() != d.samples.back());
}

TEST_CASE("feasibility and degenerate rows") {
    CHECK_THROWS_AS(find_feasible(make({{1.0, -1.0}, {-1.0, -1.0}})), InfeasibleError);
    try {
        (void)find_feasible(make({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {-1.0, -1.0, -1.0}}));
        FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
        CHECK(e.constraint() <= 2);
    }

    // A thin slab with a strictly positive width still yields an interior point.
    const auto thin = make({{1.0, 0.0, 0.0}, {-1.0, 0.0, 1e-4}, {0.0, 1.0, 5.0}});
    const VectorXd x = find_feasible(thin);
    CHECK(thin.slack(x).minCoeff() > kInteriorMargin);

    MatrixXd F(3, 1);
    F << 1.0, 0.0, -1.0;
    VectorXd g(3);
    g << 1.0, -1e-12, 1.0;
    const TruncatedGaussianProblem kept(F, g);
    CHECK(kept.constraints() == 2);
    CHECK(kept.source_rows() == std::vector<Eigen::Index>{0, 2});
    CHECK((kept.gram() - kept.F() * kept.F().transpose()).norm() == 0.0);
    g(1) = -1e-3;
    try {
        (void)TruncatedGaussianProblem(F, g);
        FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
        CHECK(e.constraint() == 1);
    }
    CHECK_THROWS_AS(TruncatedGaussianProblem(F, VectorXd::Zero(2)), Error);
    CHECK_THROWS_AS(sample(kept, 0, 1), ConfigError);
    CHECK_THROWS_AS(sample(kept, 1, 1, {.travel_time = 0.0}), ConfigError);
}

TEST_CASE("polytope from whitened coordinates") {
    gauss::WhitenedPolytope w;
    w.mu = VectorXd::Constant(2, 0.5);
    w.M = MatrixXd::Identity(2, 2) * 0.1;
    w.rho = 2;
    w.F.resize(3, 2);
    w.F << 0.1, 0.0, -0.1, 0.1, 0.0, -0.1;
    w.g = VectorXd::Constant(3, 0.5);
    w.g(1) = 0.0;
    const auto p = TruncatedGaussianProblem::from_polytope(w);
    const auto chain = sample(p, 500, 5, {.burn_in = 50});
    for (const auto& zt : chain.samples) {
        const VectorXd z = w.reconstruct(zt);
        CHECK(z(0) >= -1e-9);
        CHECK(z(1) >= z(0) - 1e-9);
        CHECK(z(1) <= 1.0 + 1e-9);
    }
}
