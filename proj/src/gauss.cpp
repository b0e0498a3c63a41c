#include "liepnm/gauss.hpp"

#include <algorithm>
#include <string>

#include "liepnm/error.hpp"

namespace liepnm::gauss {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

LinearData assemble(const prior::HatBasis& basis, double r0, double b0, std::span<const double> design,
                    std::span<const double> data) {
    if (design.size() != data.size()) throw Error("assemble: design and data lengths differ");
    const auto N = static_cast<Index>(basis.size());
    const auto rows = static_cast<Index>(design.size()) + 1;

    LinearData out{MatrixXd::Zero(rows, N), VectorXd::Zero(rows)};
    for (Index j = 0; j < N; ++j) out.Phi(0, j) = basis.phi(static_cast<std::size_t>(j), r0);
    out.b(0) = b0;

    for (std::size_t i = 0; i < design.size(); ++i) {
        const double r = design[i];
        if (r < basis.first() || r > basis.last())
            throw Error("design point " + std::to_string(i) + " (r = " + std::to_string(r) +
                        ") lies outside the knot span");
        if (basis.knot_at(r, kKnotTolerance) >= 0)
            throw Error("design point " + std::to_string(i) + " (r = " + std::to_string(r) + ") sits on a knot");
        const auto row = static_cast<Index>(i) + 1;
        for (Index j = 0; j < N; ++j) out.Phi(row, j) = basis.phi_prime(static_cast<std::size_t>(j), r);
        out.b(row) = data[i];
    }

    Eigen::JacobiSVD<MatrixXd> svd(out.Phi);
    const VectorXd& sv = svd.singularValues();
    const double cutoff = 1e-10 * sv(0);
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    if (rank < rows)
        throw RankError("Phi has rank " + std::to_string(rank) + " < " + std::to_string(rows) +
                        " rows (repeated or coupled design points)");
    return out;
}

double derivative_target(const charts::CanonicalChart& chart, double r, double g) {
    return (g - chart.lower_slope(r)) / chart.envelope_width();
}

Conditioned condition(const LinearData& data) {
    const MatrixXd& Phi = data.Phi;
    const MatrixXd gram = Phi * Phi.transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12)
        throw RankError("Phi Phi^T is ill-conditioned (condition number " + std::to_string(hi / lo) + ")");

    const Eigen::LDLT<MatrixXd> ldlt(gram);
    const VectorXd alpha = ldlt.solve(data.b);
    const MatrixXd K = ldlt.solve(Phi);  // (Phi Phi^T)^{-1} Phi

    Conditioned out;
    out.mu = Phi.transpose() * alpha;
    out.Sigma = MatrixXd::Identity(Phi.cols(), Phi.cols()) - Phi.transpose() * K;
    out.Sigma = 0.5 * (out.Sigma + out.Sigma.transpose()).eval();
    return out;
}

Reduced reduce(const MatrixXd& Sigma, std::optional<Index> expected_rank) {
    if (Sigma.rows() != Sigma.cols()) throw Error("reduce: Sigma must be square");
    const Index N = Sigma.rows();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Sigma);
    const VectorXd& ev = es.eigenvalues();  // ascending
    const double top = N > 0 ? ev.maxCoeff() : 0.0;

    Reduced out;
    if (top > 0.0) {
        const double cutoff = 1e-10 * std::max(top, 1.0);
        for (Index i = 0; i < N; ++i)
            if (ev(i) > cutoff) ++out.rho;
    }
    if (expected_rank && *expected_rank != out.rho)
        throw RankError("posterior covariance has rank " + std::to_string(out.rho) + ", expected " +
                        std::to_string(*expected_rank));

    out.U.resize(N, out.rho);
    out.lambda.resize(out.rho);
    // Largest eigenvalues first.
    for (Index c = 0; c < out.rho; ++c) {
        const Index src = N - 1 - c;
        out.U.col(c) = es.eigenvectors().col(src);
        out.lambda(c) = std::sqrt(ev(src));
    }
    return out;
}

WhitenedPolytope whiten(const VectorXd& mu, const MatrixXd& U, const VectorXd& lambda) {
    if (U.rows() != mu.size() || U.cols() != lambda.size()) throw Error("whiten: inconsistent shapes");
    const Index N = mu.size();
    const Index rho = lambda.size();

    WhitenedPolytope out;
    out.mu = mu;
    out.M = U * lambda.asDiagonal();
    out.rho = rho;
    out.F.resize(N + 1, rho);
    out.g.resize(N + 1);
    if (N == 0) return out;

    out.F.row(0) = out.M.row(0);
    out.g(0) = mu(0);
    for (Index i = 1; i < N; ++i) {
        out.F.row(i) = out.M.row(i) - out.M.row(i - 1);
        out.g(i) = mu(i) - mu(i - 1);
    }
    out.F.row(N) = -out.M.row(N - 1);
    out.g(N) = 1.0 - mu(N - 1);
    return out;
}

}  // namespace liepnm::gauss
