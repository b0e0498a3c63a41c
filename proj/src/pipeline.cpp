#include "liepnm/pipeline.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numeric>
#include <string>

#include "liepnm/error.hpp"
#include "liepnm/tmg.hpp"

namespace liepnm::pipeline {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void SolveConfig::validate() const {
    if (n < 1) throw ConfigError("n must be at least 1");
    const std::size_t NN = basis_size();
    if (NN < n + 2)
        throw ConfigError("rank law violated: N = " + std::to_string(NN) + " < n + 2 = " + std::to_string(n + 2) +
                          " leaves no free posterior dimension (rho = N - n - 1 must be >= 1)");
    if (samples < 1) throw ConfigError("samples must be at least 1");
    if (grid_points < 2) throw ConfigError("output grid needs at least 2 points");
    if (!std::isfinite(r_max)) throw ConfigError("r_max must be a finite number");
    if (!(travel_time > 0.0) || !std::isfinite(travel_time)) throw ConfigError("travel_time must be positive");
    if (!std::isfinite(family.x0) || !std::isfinite(family.x_T) || !std::isfinite(family.y0))
        throw ConfigError("x0, xT and y0 must be finite");
    if (family.kind == charts::FamilyKind::FirstOrderHomogeneous && !family.F)
        throw ConfigError("first-order family needs F");
    (void)family.chart();
    double r0 = 0.0;
    try {
        r0 = family.r0();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("initial point is outside the chart: ") + e.what());
    }
    if (!(r_max > r0))
        throw ConfigError("r_max = " + std::to_string(r_max) + " must exceed r0 = " + std::to_string(r0));
}

std::vector<double> design_points(double r0, double r_max, std::size_t n, const prior::HatBasis& basis) {
    if (n < 1) throw ConfigError("design needs n >= 1");
    if (!(r_max > r0)) throw ConfigError("design needs r_max > r0");
    const double h = basis.spacing();
    std::vector<double> out(n);
    for (std::size_t i = 1; i <= n; ++i) {
        double r = i == n ? r_max : r0 + static_cast<double>(i) * (r_max - r0) / static_cast<double>(n);
        const std::ptrdiff_t k = basis.knot_at(r, gauss::kKnotTolerance);
        if (k >= 0) r = k > 0 ? basis.knot(static_cast<std::size_t>(k)) - 0.5 * h
                              : basis.knot(0) + 0.5 * h;
        out[i - 1] = r;
    }
    return out;
}

double x_at_zeta(const charts::CanonicalChart& chart, double zeta) {
    const double w = chart.envelope_width();
    if (chart.kind() == charts::FamilyKind::FirstOrderHomogeneous) return chart.x0() * std::exp(w * zeta);
    return 1.0 / (1.0 / chart.x0() - w * zeta);
}

namespace {

double zeta_at_x(const charts::CanonicalChart& chart, double x) {
    const double w = chart.envelope_width();
    if (chart.kind() == charts::FamilyKind::FirstOrderHomogeneous) return std::log(x / chart.x0()) / w;
    return (1.0 / chart.x0() - 1.0 / x) / w;
}

template <class Fn>
auto staged(const char* stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(stage, e.what());
    }
}

std::vector<double> linspace(double a, double b, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
    out.back() = b;
    return out;
}

}  // namespace

double r_at_zeta(const prior::HatBasis& basis, std::span<const double> z, double target) {
    if (z.size() != basis.size()) throw Error("r_at_zeta: coefficient length mismatch");
    if (target <= z.front()) return basis.first();
    if (target >= z.back()) return basis.last();
    const auto it = std::upper_bound(z.begin(), z.end(), target);
    const auto k = static_cast<std::size_t>(it - z.begin()) - 1;  // z[k] <= target < z[k+1]
    const double dz = z[k + 1] - z[k];
    const double frac = dz > 0.0 ? (target - z[k]) / dz : 0.0;
    return basis.knot(k) + frac * (basis.knot(k + 1) - basis.knot(k));
}

double y_at_x(const charts::CanonicalChart& chart, const prior::HatBasis& basis, std::span<const double> z,
              double x) {
    const double target = zeta_at_x(chart, x);
    const double r = r_at_zeta(basis, z, target);
    const double s = chart.s_lower(r) + chart.envelope_width() * target;
    return chart.inverse({r, s}).y;
}

std::vector<double> PosteriorEnsemble::mean_y() const {
    std::vector<double> out(static_cast<std::size_t>(y_on_x.rows()));
    for (Index i = 0; i < y_on_x.rows(); ++i) out[static_cast<std::size_t>(i)] = y_on_x.row(i).mean();
    return out;
}

std::vector<double> PosteriorEnsemble::quantile_y(double q) const {
    if (!(q >= 0.0 && q <= 1.0)) throw Error("quantile level must lie in [0, 1]");
    std::vector<double> out(static_cast<std::size_t>(y_on_x.rows()));
    std::vector<double> row(static_cast<std::size_t>(y_on_x.cols()));
    for (Index i = 0; i < y_on_x.rows(); ++i) {
        for (Index k = 0; k < y_on_x.cols(); ++k) row[static_cast<std::size_t>(k)] = y_on_x(i, k);
        std::sort(row.begin(), row.end());
        const double pos = q * static_cast<double>(row.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, row.size() - 1);
        out[static_cast<std::size_t>(i)] = row[lo] + (pos - static_cast<double>(lo)) * (row[hi] - row[lo]);
    }
    return out;
}

PosteriorEnsemble solve(const SolveConfig& config) {
    config.validate();
    const charts::OdeFamily& family = config.family;
    const std::size_t n = config.n;
    const std::size_t N = config.basis_size();

    const charts::CanonicalChart chart = family.chart();
    const double r0 = family.r0();
    const prior::HatBasis basis(r0, config.r_max, N);

    const std::vector<double> design =
        staged("design", [&] { return design_points(r0, config.r_max, n, basis); });
    const std::vector<double> G = staged("information", [&] { return family.information(design); });

    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i) data[i] = gauss::derivative_target(chart, design[i], G[i]);
    // The initial point sits on the lower envelope x = x0, where zeta vanishes.
    const double b0 = 0.0;

    const gauss::LinearData linear = staged("assemble", [&] { return gauss::assemble(basis, r0, b0, design, data); });
    const gauss::Conditioned post = staged("condition", [&] { return gauss::condition(linear); });
    const auto expected = static_cast<Index>(N - n - 1);
    const gauss::Reduced red = staged("reduce", [&] { return gauss::reduce(post.Sigma, expected); });
    const gauss::WhitenedPolytope poly = gauss::whiten(post.mu, red.U, red.lambda);

    const tmg::Chain chain = staged("sample", [&] {
        const tmg::TruncatedGaussianProblem problem = tmg::TruncatedGaussianProblem::from_polytope(poly);
        tmg::SampleOptions opts;
        opts.burn_in = config.burn_in;
        opts.travel_time = config.travel_time;
        return tmg::sample(problem, config.samples, config.seed, opts);
    });

    PosteriorEnsemble out{chart, basis, design, G, data, b0, red.rho, {}, {}, {}, {}, {}, {}, {}};
    const auto S = static_cast<Index>(config.samples);
    const auto P = static_cast<Index>(config.grid_points);
    out.z.resize(static_cast<Index>(N), S);
    out.r_grid = linspace(r0, config.r_max, config.grid_points);
    out.s.resize(P, S);
    out.x.resize(P, S);
    out.y.resize(P, S);

    staged("pushforward", [&] {
        double x_hi = chart.x_T();
        for (Index k = 0; k < S; ++k) {
            const VectorXd zk = poly.reconstruct(chain.samples[static_cast<std::size_t>(k)]);
            out.z.col(k) = zk;
            const prior::TransformedCurve curve =
                prior::s_from_zeta(chart, basis, std::vector<double>(zk.data(), zk.data() + zk.size()));
            for (Index i = 0; i < P; ++i) {
                const double r = out.r_grid[static_cast<std::size_t>(i)];
                const double s = curve(r);
                const charts::XY p = chart.inverse({r, s});
                out.s(i, k) = s;
                out.x(i, k) = p.x;
                out.y(i, k) = p.y;
            }
            x_hi = std::min(x_hi, x_at_zeta(chart, zk(zk.size() - 1)));
        }
        if (!(x_hi > chart.x0())) throw Error("posterior curves do not extend beyond x0");

        out.x_grid = linspace(chart.x0(), x_hi, config.grid_points);
        out.y_on_x.resize(P, S);
        for (Index k = 0; k < S; ++k) {
            const std::span<const double> zk(out.z.col(k).data(), static_cast<std::size_t>(N));
            for (Index i = 0; i < P; ++i)
                out.y_on_x(i, k) = y_at_x(chart, basis, zk, out.x_grid[static_cast<std::size_t>(i)]);
        }
        return 0;
    });
    return out;
}

double reference_first_order(double x) {
    const double radicand = 1.0 + 2.0 * std::log(x);
    if (!(x > 0.0) || radicand < 0.0)
        throw DomainError("reference solution needs x >= exp(-1/2), got x = " + std::to_string(x));
    return x * std::sqrt(radicand);
}

std::vector<double> reference_second_order(double x0, double y0, double y0_prime, std::span<const double> grid,
                                           double tolerance) {
    namespace odeint = boost::numeric::odeint;
    using State = std::array<double, 2>;

    if (grid.empty()) return {};
    if (grid.front() < x0) throw Error("reference grid must start at or after x0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw Error("reference grid must be strictly increasing");

    const auto rhs = [](const State& u, State& du, double x) {
        const double p = u[1];
        if (p < 0.0) throw DomainError("y' became negative; y'^(3/2) is undefined");
        const double d = x - u[0];
        if (d == 0.0) throw DomainError("integration reached x = y");
        du[0] = p;
        du[1] = -(2.0 * p * (p + 1.0) + p * std::sqrt(p)) / d;
    };

    std::vector<double> times;
    times.reserve(grid.size() + 1);
    const bool prepend = grid.front() > x0;
    if (prepend) times.push_back(x0);
    times.insert(times.end(), grid.begin(), grid.end());

    std::vector<double> ys;
    ys.reserve(times.size());
    State state{y0, y0_prime};
    try {
        auto stepper = odeint::make_dense_output(tolerance, tolerance, odeint::runge_kutta_dopri5<State>());
        const double dt = (times.back() - times.front()) * 1e-4;
        odeint::integrate_times(stepper, rhs, state, times.begin(), times.end(), dt > 0.0 ? dt : 1e-6,
                                [&](const State& u, double) { ys.push_back(u[0]); });
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(std::string("reference integration failed: ") + e.what());
    }
    if (prepend) ys.erase(ys.begin());
    return ys;
}

double rmse(std::span<const double> estimate, std::span<const double> reference) {
    if (estimate.empty()) throw Error("rmse of an empty curve");
    if (estimate.size() != reference.size()) throw Error("rmse: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        const double d = estimate[i] - reference[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(estimate.size()));
}

double rmse(const PosteriorEnsemble& ensemble, std::span<const double> reference_on_grid) {
    if (ensemble.sample_count() == 0) throw Error("rmse of an empty ensemble");
    const std::vector<double> mean = ensemble.mean_y();
    return rmse(mean, reference_on_grid);
}

double rmse(const PosteriorEnsemble& ensemble, const std::function<double(double)>& reference) {
    std::vector<double> ref(ensemble.x_grid.size());
    std::transform(ensemble.x_grid.begin(), ensemble.x_grid.end(), ref.begin(), reference);
    return rmse(ensemble, std::span<const double>(ref));
}

}  // namespace liepnm::pipeline
