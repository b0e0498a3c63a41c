#include "liepnm/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "liepnm/error.hpp"

namespace liepnm {

BivariatePoly BivariatePoly::constant(double c) { return monomial(c, 0, 0); }

BivariatePoly BivariatePoly::monomial(double c, int deg_x, int deg_y) {
    if (deg_x < 0 || deg_y < 0) throw Error("negative monomial degree");
    BivariatePoly p;
    p.add_term({deg_x, deg_y}, c);
    return p;
}

double BivariatePoly::coefficient(int deg_x, int deg_y) const {
    auto it = terms_.find({deg_x, deg_y});
    return it == terms_.end() ? 0.0 : it->second;
}

int BivariatePoly::total_degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.first + m.second);
    return d;
}

void BivariatePoly::add_term(const Monomial& m, double c) {
    if (c == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

BivariatePoly BivariatePoly::dx() const {
    BivariatePoly out;
    for (const auto& [m, c] : terms_)
        if (m.first > 0) out.add_term({m.first - 1, m.second}, c * m.first);
    return out;
}

BivariatePoly BivariatePoly::dy() const {
    BivariatePoly out;
    for (const auto& [m, c] : terms_)
        if (m.second > 0) out.add_term({m.first, m.second - 1}, c * m.second);
    return out;
}

double BivariatePoly::operator()(double x, double y) const {
    double sum = 0.0;
    for (const auto& [m, c] : terms_) sum += c * std::pow(x, m.first) * std::pow(y, m.second);
    return sum;
}

BivariatePoly& BivariatePoly::operator+=(const BivariatePoly& rhs) {
    for (const auto& [m, c] : rhs.terms_) add_term(m, c);
    return *this;
}

BivariatePoly& BivariatePoly::operator-=(const BivariatePoly& rhs) {
    for (const auto& [m, c] : rhs.terms_) add_term(m, -c);
    return *this;
}

BivariatePoly& BivariatePoly::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
        it->second *= s;
        it = (it->second == 0.0) ? terms_.erase(it) : std::next(it);
    }
    return *this;
}

BivariatePoly operator*(const BivariatePoly& a, const BivariatePoly& b) {
    BivariatePoly out;
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) out.add_term({ma.first + mb.first, ma.second + mb.second}, ca * cb);
    return out;
}

std::string BivariatePoly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // Highest total degree first.
    std::vector<std::pair<Monomial, double>> sorted(terms_.begin(), terms_.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return a.first.first + a.first.second > b.first.first + b.first.second;
    });
    for (const auto& [m, c] : sorted) {
        double mag = std::abs(c);
        if (first) {
            if (c < 0) os << "-";
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        first = false;
        const bool bare = (m.first == 0 && m.second == 0);
        if (mag != 1.0 || bare) os << mag;
        auto var = [&](char name, int deg) {
            if (deg == 0) return;
            os << name;
            if (deg > 1) os << "^" << deg;
        };
        var('x', m.first);
        var('y', m.second);
    }
    return os.str();
}

namespace {

JetPoly::Exponents trimmed(JetPoly::Exponents e) {
    while (!e.empty() && e.back() == 0) e.pop_back();
    return e;
}

}  // namespace

JetPoly JetPoly::from_bivariate(const BivariatePoly& p) {
    JetPoly out;
    for (const auto& [m, c] : p.terms()) out.add_term({m.first, m.second}, c);
    return out;
}

JetPoly JetPoly::variable(std::size_t index) {
    Exponents e(index + 1, 0);
    e[index] = 1;
    JetPoly out;
    out.add_term(std::move(e), 1.0);
    return out;
}

JetPoly JetPoly::constant(double c) {
    JetPoly out;
    out.add_term({}, c);
    return out;
}

void JetPoly::add_term(Exponents e, double c) {
    if (c == 0.0) return;
    e = trimmed(std::move(e));
    auto [it, inserted] = terms_.try_emplace(std::move(e), c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

int JetPoly::max_variable() const {
    int v = -1;
    for (const auto& [e, c] : terms_) v = std::max(v, static_cast<int>(e.size()) - 1);
    return v;
}

JetPoly JetPoly::partial(std::size_t index) const {
    JetPoly out;
    for (const auto& [e, c] : terms_) {
        if (index >= e.size() || e[index] == 0) continue;
        Exponents d = e;
        const int k = d[index]--;
        out.add_term(std::move(d), c * k);
    }
    return out;
}

JetPoly JetPoly::total_derivative() const {
    JetPoly out = partial(0);
    const int top = max_variable();
    // variable j (j >= 1) is y_{j-1}; its derivative is variable j+1.
    for (int j = 1; j <= top; ++j) {
        JetPoly dj = partial(static_cast<std::size_t>(j));
        if (dj.is_zero()) continue;
        out += variable(static_cast<std::size_t>(j + 1)) * dj;
    }
    return out;
}

double JetPoly::operator()(std::span<const double> values) const {
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
        if (e.size() > values.size()) throw Error("jet is too short for this expression");
        double term = c;
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i]) term *= std::pow(values[i], e[i]);
        sum += term;
    }
    return sum;
}

JetPoly& JetPoly::operator+=(const JetPoly& rhs) {
    for (const auto& [e, c] : rhs.terms_) add_term(e, c);
    return *this;
}

JetPoly& JetPoly::operator-=(const JetPoly& rhs) {
    for (const auto& [e, c] : rhs.terms_) add_term(e, -c);
    return *this;
}

JetPoly& JetPoly::operator*=(double s) {
    JetPoly out;
    for (const auto& [e, c] : terms_) out.add_term(e, c * s);
    *this = std::move(out);
    return *this;
}

JetPoly operator*(const JetPoly& a, const JetPoly& b) {
    JetPoly out;
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            JetPoly::Exponents e(std::max(ea.size(), eb.size()), 0);
            for (std::size_t i = 0; i < ea.size(); ++i) e[i] += ea[i];
            for (std::size_t i = 0; i < eb.size(); ++i) e[i] += eb[i];
            out.add_term(std::move(e), ca * cb);
        }
    }
    return out;
}

}  // namespace liepnm
