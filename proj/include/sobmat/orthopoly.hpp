#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "sobmat/inner.hpp"
#include "sobmat/polynomial.hpp"
#include "sobmat/report.hpp"
#include "sobmat/weight.hpp"

namespace sobmat {

/// The Sobolev inner product failed to be positive definite at working
/// precision: a Cholesky pivot of the monomial Gram matrix fell below the
/// relative threshold.
class PositivityError : public std::runtime_error {
public:
    PositivityError(int degree, double pivot)
        : std::runtime_error("positivity violated numerically at degree " +
                             std::to_string(degree) + " (Cholesky pivot " +
                             std::to_string(pivot) + ")"),
          degree_(degree),
          pivot_(pivot) {}

    int degree() const noexcept { return degree_; }
    double pivot() const noexcept { return pivot_; }

private:
    int degree_;
    double pivot_;
};

/// Monic Sobolev orthogonal polynomials y_0..y_N with norms A_n.
struct SobolevOPSet {
    std::vector<Polynomial> polys;
    std::vector<double> norms;              // A_n from direct quadrature, all > 0
    double gram_residual = 0.0;             // max normalized off-diagonal of the y-Gram
    double cholesky_consistency = 0.0;      // max relative gap between Cholesky and direct A_n
};

/// Gram matrix of the monomials 1, z, ..., z^N under the Sobolev pairing.
inline Eigen::MatrixXd gram_matrix(int N, const MatrixWeight& W,
                                   int max_order = kDefaultMaxQuadOrder) {
    if (N < 0) throw std::invalid_argument("gram_matrix: N must be >= 0");
    Eigen::MatrixXd G(N + 1, N + 1);
    for (int i = 0; i <= N; ++i)
        for (int j = i; j <= N; ++j) {
            const double v =
                sobolev_inner(Polynomial::monomial(i), Polynomial::monomial(j), W, max_order);
            G(i, j) = v;
            G(j, i) = v;
        }
    return G;
}

namespace detail {

// Lower Cholesky with a relative pivot check. The leading k x k block of L is
// the factor of the leading block of G, which lets each monic polynomial be
// extracted from one factorization.
inline Eigen::MatrixXd cholesky_with_pivot_check(const Eigen::MatrixXd& G, double rel_tol = 1e-10) {
    const int n = static_cast<int>(G.rows());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = G(i, j);
            for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            if (i == j) {
                const double scale = std::max(G(i, i), std::numeric_limits<double>::min());
                if (s < rel_tol * scale) throw PositivityError(i, s);
                L(i, i) = std::sqrt(s);
            } else {
                L(i, j) = s / L(j, j);
            }
        }
    }
    return L;
}

inline double max_offdiag_residual(const Eigen::MatrixXd& ygram, const std::vector<double>& norms) {
    double worst = 0.0;
    const int n = static_cast<int>(ygram.rows());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            worst = std::max(worst, std::abs(ygram(i, j)) / std::sqrt(norms[i] * norms[j]));
        }
    return worst;
}

}  // namespace detail

/// Generates the monic Sobolev orthogonal polynomials via Cholesky of the
/// monomial Gram matrix (equivalent to Gram–Schmidt on monomials). Norms are
/// recomputed by direct quadrature as a consistency check on the factorization.
inline SobolevOPSet sobolev_ops(int N, const MatrixWeight& W,
                                int max_order = kDefaultMaxQuadOrder) {
    if (N < 0) throw std::invalid_argument("sobolev_ops: N must be >= 0");
    const Eigen::MatrixXd G = gram_matrix(N, W, max_order);
    const Eigen::MatrixXd L = detail::cholesky_with_pivot_check(G);

    SobolevOPSet set;
    set.polys.reserve(N + 1);
    set.norms.reserve(N + 1);

    for (int n = 0; n <= N; ++n) {
        // Monic y_n = z^n - sum_k c_k z^k with G[0..n-1] c = G[0..n-1, n],
        // solved through the leading Cholesky block.
        std::vector<double> coeffs(static_cast<std::size_t>(n) + 1, 0.0);
        coeffs[n] = 1.0;
        if (n > 0) {
            const auto block = L.topLeftCorner(n, n).triangularView<Eigen::Lower>();
            Eigen::VectorXd c = block.solve(G.block(0, n, n, 1));
            block.transpose().solveInPlace(c);
            for (int k = 0; k < n; ++k) coeffs[k] = -c(k);
        }
        Polynomial y{std::vector<double>(coeffs)};
        const double a_chol = L(n, n) * L(n, n);
        const double a_direct = sobolev_inner(y, y, W, max_order);
        set.cholesky_consistency = std::max(
            set.cholesky_consistency, std::abs(a_chol - a_direct) / std::max(a_direct, 1e-300));
        set.polys.push_back(std::move(y));
        set.norms.push_back(a_direct);
    }

    // Residual of the generated system, by re-quadrature of the y-Gram.
    Eigen::MatrixXd ygram(N + 1, N + 1);
    for (int i = 0; i <= N; ++i)
        for (int j = i; j <= N; ++j) {
            const double v = sobolev_inner(set.polys[i], set.polys[j], W, max_order);
            ygram(i, j) = v;
            ygram(j, i) = v;
        }
    set.gram_residual = detail::max_offdiag_residual(ygram, set.norms);
    return set;
}

/// Recomputes the full Gram matrix of the generated polynomials by direct
/// quadrature and reports the orthogonality and norm residuals.
inline VerificationReport check_orthogonality(const SobolevOPSet& ops, const MatrixWeight& W,
                                              double tol,
                                              int max_order = kDefaultMaxQuadOrder) {
    const int n = static_cast<int>(ops.polys.size());
    Eigen::MatrixXd ygram(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = sobolev_inner(ops.polys[i], ops.polys[j], W, max_order);
            ygram(i, j) = v;
            ygram(j, i) = v;
        }

    double off = detail::max_offdiag_residual(ygram, ops.norms);
    double diag = 0.0;
    for (int i = 0; i < n; ++i)
        diag = std::max(diag, std::abs(ygram(i, i) - ops.norms[i]) / ops.norms[i]);

    VerificationReport rep;
    rep.add(CheckRecord::residual("orthopoly.off_diagonal", off, tol));
    rep.add(CheckRecord::residual("orthopoly.diagonal_consistency", diag, tol));
    return rep;
}

}  // namespace sobmat
