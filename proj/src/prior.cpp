#include "liepnm/prior.hpp"

#include <cmath>
#include <string>

#include "liepnm/error.hpp"

namespace liepnm::prior {

HatBasis::HatBasis(double t_first, double t_last, std::size_t count)
    : t_first_(t_first), t_last_(t_last), count_(count), h_(0.0) {
    if (count < 2) throw ConfigError("hat basis needs at least 2 functions");
    if (!(t_last > t_first)) throw ConfigError("hat basis needs t_last > t_first");
    h_ = (t_last - t_first) / static_cast<double>(count - 1);
}

double HatBasis::knot(std::size_t j) const {
    if (j + 1 == count_) return t_last_;
    return t_first_ + static_cast<double>(j) * h_;
}

std::vector<double> HatBasis::knots() const {
    std::vector<double> t(count_);
    for (std::size_t j = 0; j < count_; ++j) t[j] = knot(j);
    return t;
}

double HatBasis::phi(std::size_t j, double r) const {
    const std::ptrdiff_t at = knot_at(r, 0.0);
    if (at >= 0) return static_cast<std::size_t>(at) == j ? 1.0 : 0.0;
    const double u = std::abs((r - knot(j)) / h_);
    return u <= 1.0 ? 1.0 - u : 0.0;
}

double HatBasis::phi_prime(std::size_t j, double r) const {
    const double d = r - knot(j);
    if (d >= -h_ && d < 0.0) return 1.0 / h_;
    if (d >= 0.0 && d < h_) return -1.0 / h_;
    return 0.0;
}

std::size_t HatBasis::interval(double r) const {
    const double u = (r - t_first_) / h_;
    if (!(u > 0.0)) return 0;
    auto k = static_cast<std::size_t>(std::floor(u));
    // Nudge across knots that floating point placed on the wrong side.
    if (k + 1 < count_ && r >= knot(k + 1)) ++k;
    if (k > 0 && r < knot(k)) --k;
    return std::min(k, count_ - 2);
}

std::ptrdiff_t HatBasis::knot_at(double r, double tol) const {
    const double u = (r - t_first_) / h_;
    const double j = std::round(u);
    if (j < 0.0 || j > static_cast<double>(count_ - 1)) return -1;
    const auto idx = static_cast<std::size_t>(j);
    return std::abs(r - knot(idx)) <= tol ? static_cast<std::ptrdiff_t>(idx) : -1;
}

namespace {

void check_length(const HatBasis& basis, std::span<const double> z) {
    if (z.size() != basis.size())
        throw Error("coefficient vector has length " + std::to_string(z.size()) + ", basis has " +
                    std::to_string(basis.size()));
}

}  // namespace

double zeta(const HatBasis& basis, std::span<const double> z, double r) {
    check_length(basis, z);
    const std::ptrdiff_t at = basis.knot_at(r, 0.0);
    if (at >= 0) return z[static_cast<std::size_t>(at)];
    const std::size_t k = basis.interval(r);
    double sum = 0.0;
    for (std::size_t j = (k == 0 ? 0 : k - 1); j <= std::min(k + 2, basis.size() - 1); ++j)
        sum += z[j] * basis.phi(j, r);
    return sum;
}

double zeta_prime(const HatBasis& basis, std::span<const double> z, double r) {
    check_length(basis, z);
    const std::size_t k = basis.interval(r);
    double sum = 0.0;
    for (std::size_t j = (k == 0 ? 0 : k - 1); j <= std::min(k + 2, basis.size() - 1); ++j)
        sum += z[j] * basis.phi_prime(j, r);
    return sum;
}

bool is_feasible(std::span<const double> z) {
    if (z.empty() || !(z[0] > 0.0)) return false;
    for (std::size_t i = 1; i < z.size(); ++i)
        if (!(z[i - 1] <= z[i])) return false;
    return z.back() <= 1.0;
}

bool is_feasible_closed(std::span<const double> z, double tol) {
    if (z.empty() || !(z[0] >= -tol)) return false;
    for (std::size_t i = 1; i < z.size(); ++i)
        if (!(z[i] - z[i - 1] >= -tol)) return false;
    return z.back() <= 1.0 + tol;
}

TransformedCurve::TransformedCurve(charts::CanonicalChart chart, HatBasis basis, std::vector<double> z)
    : chart_(chart), basis_(basis), z_(std::move(z)) {
    check_length(basis_, z_);
}

double TransformedCurve::operator()(double r) const {
    return chart_.s_lower(r) + chart_.envelope_width() * zeta(basis_, z_, r);
}

double TransformedCurve::slope(double r) const {
    return chart_.lower_slope(r) + chart_.envelope_width() * zeta_prime(basis_, z_, r);
}

TransformedCurve s_from_zeta(const charts::CanonicalChart& chart, const HatBasis& basis, std::vector<double> z) {
    check_length(basis, z);
    if (!is_feasible_closed(z, kFeasibilityTolerance)) throw Error("s_from_zeta: coefficients are infeasible");
    return TransformedCurve(chart, basis, std::move(z));
}

}  // namespace liepnm::prior
