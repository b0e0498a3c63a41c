#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace liepnm {

/// Real polynomial in (x, y), stored sparsely with no zero coefficients.
class BivariatePoly {
public:
    using Monomial = std::pair<int, int>;  // (deg_x, deg_y)

    BivariatePoly() = default;
    static BivariatePoly constant(double c);
    static BivariatePoly monomial(double c, int deg_x, int deg_y);
    static BivariatePoly x() { return monomial(1.0, 1, 0); }
    static BivariatePoly y() { return monomial(1.0, 0, 1); }

    const std::map<Monomial, double>& terms() const { return terms_; }
    double coefficient(int deg_x, int deg_y) const;
    bool is_zero() const { return terms_.empty(); }
    int total_degree() const;

    BivariatePoly dx() const;
    BivariatePoly dy() const;
    double operator()(double x, double y) const;

    BivariatePoly& operator+=(const BivariatePoly& rhs);
    BivariatePoly& operator-=(const BivariatePoly& rhs);
    BivariatePoly& operator*=(double s);
    friend BivariatePoly operator+(BivariatePoly a, const BivariatePoly& b) { return a += b; }
    friend BivariatePoly operator-(BivariatePoly a, const BivariatePoly& b) { return a -= b; }
    friend BivariatePoly operator*(BivariatePoly a, double s) { return a *= s; }
    friend BivariatePoly operator*(double s, BivariatePoly a) { return a *= s; }
    friend BivariatePoly operator-(BivariatePoly a) { return a *= -1.0; }
    friend BivariatePoly operator*(const BivariatePoly& a, const BivariatePoly& b);
    friend bool operator==(const BivariatePoly&, const BivariatePoly&) = default;

    std::string to_string() const;

private:
    void add_term(const Monomial& m, double c);
    std::map<Monomial, double> terms_;
};

/// Polynomial over the jet variables (x, y, y1, y2, ...). Variable 0 is x,
/// variable 1 is y, variable k+1 is the k-th derivative y_k.
class JetPoly {
public:
    using Exponents = std::vector<int>;  // trailing zeros trimmed

    JetPoly() = default;
    static JetPoly from_bivariate(const BivariatePoly& p);
    static JetPoly variable(std::size_t index);
    static JetPoly constant(double c);

    const std::map<Exponents, double>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    /// Highest variable index that appears, or -1 for constants.
    int max_variable() const;

    JetPoly partial(std::size_t index) const;
    /// Total derivative d/dx = d/dx + y1 d/dy + y2 d/dy1 + ...
    JetPoly total_derivative() const;
    /// Evaluate at values[i] for variable i. Throws if a needed variable is missing.
    double operator()(std::span<const double> values) const;

    JetPoly& operator+=(const JetPoly& rhs);
    JetPoly& operator-=(const JetPoly& rhs);
    JetPoly& operator*=(double s);
    friend JetPoly operator+(JetPoly a, const JetPoly& b) { return a += b; }
    friend JetPoly operator-(JetPoly a, const JetPoly& b) { return a -= b; }
    friend JetPoly operator*(const JetPoly& a, const JetPoly& b);
    friend bool operator==(const JetPoly&, const JetPoly&) = default;

private:
    void add_term(Exponents e, double c);
    std::map<Exponents, double> terms_;
};

}  // namespace liepnm
