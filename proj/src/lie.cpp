#include "liepnm/lie.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "liepnm/error.hpp"

namespace liepnm::lie {

std::string PolyVectorField::to_string() const {
    std::string out;
    auto term = [&](const BivariatePoly& p, const char* d) {
        if (p.is_zero()) return;
        if (!out.empty()) out += " + ";
        out += "(" + p.to_string() + ")" + d;
    };
    term(xi, "d/dx");
    term(eta, "d/dy");
    return out.empty() ? "0" : out;
}

BivariatePoly apply(const PolyVectorField& v, const BivariatePoly& p) { return v.xi * p.dx() + v.eta * p.dy(); }

PolyVectorField commutator(const PolyVectorField& v1, const PolyVectorField& v2) {
    return {apply(v1, v2.xi) - apply(v2, v1.xi), apply(v1, v2.eta) - apply(v2, v1.eta)};
}

namespace {

// Stack xi and eta coefficients of three fields on a common monomial support.
void stacked_coefficients(const PolyVectorField& w, const PolyVectorField& v1, const PolyVectorField& v2,
                          std::vector<double>& cw, std::vector<double>& c1, std::vector<double>& c2) {
    auto collect = [&](const BivariatePoly& pw, const BivariatePoly& p1, const BivariatePoly& p2) {
        std::vector<BivariatePoly::Monomial> support;
        for (const auto* p : {&pw, &p1, &p2})
            for (const auto& [m, c] : p->terms()) support.push_back(m);
        std::sort(support.begin(), support.end());
        support.erase(std::unique(support.begin(), support.end()), support.end());
        for (const auto& m : support) {
            cw.push_back(pw.coefficient(m.first, m.second));
            c1.push_back(p1.coefficient(m.first, m.second));
            c2.push_back(p2.coefficient(m.first, m.second));
        }
    };
    collect(w.xi, v1.xi, v2.xi);
    collect(w.eta, v1.eta, v2.eta);
}

}  // namespace

std::optional<std::pair<double, double>> span_coefficients(const PolyVectorField& w, const PolyVectorField& v1,
                                                           const PolyVectorField& v2) {
    std::vector<double> cw, c1, c2;
    stacked_coefficients(w, v1, v2, cw, c1, c2);

    double g11 = 0, g12 = 0, g22 = 0, r1 = 0, r2 = 0;
    for (std::size_t i = 0; i < cw.size(); ++i) {
        g11 += c1[i] * c1[i];
        g12 += c1[i] * c2[i];
        g22 += c2[i] * c2[i];
        r1 += c1[i] * cw[i];
        r2 += c2[i] * cw[i];
    }
    const double det = g11 * g22 - g12 * g12;
    if (!(det > 1e-14 * g11 * g22) || g11 == 0.0 || g22 == 0.0)
        throw Error("span_coefficients: generators are linearly dependent");

    const double a = (g22 * r1 - g12 * r2) / det;
    const double b = (g11 * r2 - g12 * r1) / det;

    double scale = 1.0;
    for (double c : cw) scale = std::max(scale, std::abs(c));
    for (std::size_t i = 0; i < cw.size(); ++i) {
        const double resid = cw[i] - a * c1[i] - b * c2[i];
        if (std::abs(resid) > 1e-12 * scale * std::max({1.0, std::abs(a), std::abs(b)})) return std::nullopt;
    }
    // Snap round-off so integer structure constants come out exact.
    auto snap = [](double v) {
        const double n = std::round(v);
        return std::abs(v - n) < 1e-12 ? n : v;
    };
    return std::make_pair(snap(a) + 0.0, snap(b) + 0.0);
}

std::optional<std::vector<double>> span_coefficients(const PolyVectorField& w, std::span<const PolyVectorField> basis) {
    std::vector<std::pair<int, BivariatePoly::Monomial>> support;  // (component, monomial)
    auto gather = [&](const PolyVectorField& v) {
        for (const auto& [m, c] : v.xi.terms()) support.emplace_back(0, m);
        for (const auto& [m, c] : v.eta.terms()) support.emplace_back(1, m);
    };
    gather(w);
    for (const auto& v : basis) gather(v);
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());

    const auto rows = static_cast<Eigen::Index>(support.size());
    const auto cols = static_cast<Eigen::Index>(basis.size());
    auto coeff = [](const PolyVectorField& v, const std::pair<int, BivariatePoly::Monomial>& key) {
        const BivariatePoly& p = key.first == 0 ? v.xi : v.eta;
        return p.coefficient(key.second.first, key.second.second);
    };
    Eigen::MatrixXd A(rows, cols);
    Eigen::VectorXd rhs(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        rhs(i) = coeff(w, support[static_cast<std::size_t>(i)]);
        for (Eigen::Index k = 0; k < cols; ++k) A(i, k) = coeff(basis[static_cast<std::size_t>(k)], support[static_cast<std::size_t>(i)]);
    }
    if (cols == 0) return w.is_zero() ? std::optional<std::vector<double>>(std::vector<double>{}) : std::nullopt;

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < cols) throw Error("span_coefficients: generators are linearly dependent");
    const Eigen::VectorXd c = qr.solve(rhs);

    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff()) * std::max(1.0, c.cwiseAbs().maxCoeff());
    if ((A * c - rhs).cwiseAbs().maxCoeff() > 1e-12 * scale) return std::nullopt;

    std::vector<double> out(static_cast<std::size_t>(cols));
    for (Eigen::Index k = 0; k < cols; ++k) {
        const double n = std::round(c(k));
        out[static_cast<std::size_t>(k)] = (std::abs(c(k) - n) < 1e-12 ? n : c(k)) + 0.0;
    }
    return out;
}

std::string format_combination(std::span<const double> coefficients, const std::string& symbol) {
    std::ostringstream out;
    bool first = true;
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
        const double c = coefficients[k];
        if (c == 0.0) continue;
        const double mag = std::abs(c);
        if (first) {
            if (c < 0) out << "-";
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        if (mag != 1.0) out << mag << "*";
        out << symbol << (k + 1);
        first = false;
    }
    return first ? "0" : out.str();
}

SolvablePair solvable_2d_order(const PolyVectorField& v1, const PolyVectorField& v2) {
    const PolyVectorField bracket = commutator(v1, v2);
    if (bracket.is_zero()) {
        // Abelian; still reject dependent generators.
        (void)span_coefficients(v1, v1, v2);
        return {v1, v2, 0.0};
    }
    const auto ab = span_coefficients(bracket, v1, v2);
    if (!ab) throw Error("solvable_2d_order: [V1,V2] is not in span{V1,V2}; not a 2D Lie algebra");
    const auto [a, b] = *ab;
    if (b == 0.0) return {v1, v2, a};    // [V1,V2] = a V1
    if (a == 0.0) return {v2, v1, -b};   // [V2,V1] = -b V2
    // General case: the derived algebra spans the ideal; [Y, V1] = -b Y.
    return {bracket, v1, -b};
}

std::vector<double> Jet::values() const {
    std::vector<double> v;
    v.reserve(derivs.size() + 2);
    v.push_back(x);
    v.push_back(y);
    v.insert(v.end(), derivs.begin(), derivs.end());
    return v;
}

JetPoly extended_infinitesimal_poly(const PolyVectorField& v, int k) {
    if (k < 0) throw Error("extended infinitesimal order must be non-negative");
    const JetPoly xi = JetPoly::from_bivariate(v.xi);
    const JetPoly dxi = xi.total_derivative();
    JetPoly eta = JetPoly::from_bivariate(v.eta);
    for (int j = 1; j <= k; ++j) {
        eta = eta.total_derivative() - JetPoly::variable(static_cast<std::size_t>(j + 1)) * dxi;
    }
    return eta;
}

double extended_infinitesimal(const PolyVectorField& v, int k, const Jet& jet) {
    if (k < 1) throw Error("extended infinitesimal order must be >= 1");
    if (jet.derivs.size() < static_cast<std::size_t>(k))
        throw Error("jet too short: need " + std::to_string(k) + " derivatives, got " +
                    std::to_string(jet.derivs.size()));
    return extended_infinitesimal_poly(v, k)(jet.values());
}

OdeSurface first_order_homogeneous_surface(expr::Expression F) {
    OdeSurface s;
    s.order = 1;
    s.solve_top = [F](const Jet& j) { return F(j.y / j.x); };
    s.value = [F](const Jet& j) { return j.derivs.at(0) - F(j.y / j.x); };
    s.gradient = [F](const Jet& j) {
        const auto d = F.differentiate(j.y / j.x);
        return std::vector<double>{d.slope * j.y / (j.x * j.x), -d.slope / j.x, 1.0};
    };
    return s;
}

OdeSurface second_order_example_surface() {
    auto q = [](double y1) {
        if (y1 < 0.0) throw DomainError("second-order example needs y' >= 0");
        return 2.0 * y1 * (y1 + 1.0) + y1 * std::sqrt(y1);
    };
    auto gap = [](const Jet& j) {
        const double d = j.x - j.y;
        if (d == 0.0) throw DomainError("second-order example is singular on x = y");
        return d;
    };
    OdeSurface s;
    s.order = 2;
    s.solve_top = [=](const Jet& j) { return -q(j.derivs.at(0)) / gap(j); };
    s.value = [=](const Jet& j) { return j.derivs.at(1) + q(j.derivs.at(0)) / gap(j); };
    s.gradient = [=](const Jet& j) {
        const double y1 = j.derivs.at(0);
        const double d = gap(j);
        const double qv = q(y1);
        return std::vector<double>{-qv / (d * d), qv / (d * d), (4.0 * y1 + 2.0 + 1.5 * std::sqrt(y1)) / d, 1.0};
    };
    return s;
}

double symmetry_residual(const OdeSurface& ode, const PolyVectorField& v, std::span<const Jet> jets) {
    const int m = ode.order;
    std::vector<JetPoly> etas;
    for (int k = 1; k <= m; ++k) etas.push_back(extended_infinitesimal_poly(v, k));

    double worst = 0.0;
    for (const Jet& in : jets) {
        Jet j = in;
        if (j.derivs.size() == static_cast<std::size_t>(m - 1)) {
            j.derivs.push_back(ode.solve_top(j));
        } else if (j.derivs.size() == static_cast<std::size_t>(m)) {
            const double off = ode.value(j);
            if (!(std::abs(off) <= 1e-9))
                throw Error("symmetry_residual: jet is off the ODE surface (|F| = " + std::to_string(off) + ")");
        } else {
            throw Error("symmetry_residual: jet must carry " + std::to_string(m - 1) + " or " + std::to_string(m) +
                        " derivatives");
        }
        const std::vector<double> vals = j.values();
        const std::vector<double> grad = ode.gradient(j);
        double r = v.xi(j.x, j.y) * grad[0] + v.eta(j.x, j.y) * grad[1];
        for (int k = 1; k <= m; ++k) r += etas[k - 1](vals) * grad[k + 1];
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

}  // namespace liepnm::lie
