#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sobmat/expr.hpp"
#include "sobmat/functions.hpp"
#include "sobmat/quadrature.hpp"
#include "sobmat/report.hpp"

namespace sobmat {

/// Chebyshev–Lobatto points on [a,b] in ascending order. Clusters near the
/// endpoints, where continuous weights take their extreme values.
inline std::vector<double> chebyshev_grid(int n, double a, double b) {
    if (n < 2) throw std::invalid_argument("chebyshev_grid: need at least 2 points");
    const double pi = 3.14159265358979323846;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k)
        g[k] = mid - half * std::cos(pi * k / (n - 1.0));
    g.front() = a;
    g.back() = b;
    return g;
}

/// The matrix weight M0(z) = (m_ij(z)) on [a,b] together with the measure
/// density dmu/dz. Entries are parsed expressions; the weight is cheap to
/// copy (shared subtrees) and immutable after construction.
class MatrixWeight {
public:
    MatrixWeight(int rho, double a, double b, std::vector<ExprPtr> entries, ExprPtr density)
        : rho_(rho), a_(a), b_(b), entries_(std::move(entries)), density_(std::move(density)) {
        if (rho_ < 0) throw std::invalid_argument("MatrixWeight: rho must be >= 0");
        if (!std::isfinite(a_) || !std::isfinite(b_) || !(a_ < b_))
            throw std::invalid_argument("MatrixWeight: interval must be finite with a < b");
        const std::size_t d = static_cast<std::size_t>(rho_) + 1;
        if (entries_.size() != d * d)
            throw std::invalid_argument("MatrixWeight: entry grid must be (rho+1)x(rho+1)");
        for (const auto& e : entries_)
            if (!e) throw std::invalid_argument("MatrixWeight: null entry");
        if (!density_) density_ = make_constant(1.0);
    }

    /// Builds from expression texts, row-major. Parse errors are rethrown
    /// with the entry position prepended.
    static MatrixWeight parse(int rho, double a, double b,
                              const std::vector<std::vector<std::string>>& grid,
                              const std::string& density = "1") {
        const std::size_t d = static_cast<std::size_t>(rho) + 1;
        if (grid.size() != d)
            throw std::invalid_argument("MatrixWeight: weight grid must have rho+1 rows");
        std::vector<ExprPtr> entries(d * d);
        for (std::size_t i = 0; i < d; ++i) {
            if (grid[i].size() != d)
                throw std::invalid_argument("MatrixWeight: weight grid row " + std::to_string(i) +
                                            " must have rho+1 entries");
            for (std::size_t j = 0; j < d; ++j) {
                try {
                    entries[i * d + j] = parse_expr(grid[i][j]);
                } catch (const ParseError& e) {
                    throw ParseError("weight[" + std::to_string(i) + "][" + std::to_string(j) +
                                         "]: " + e.what(),
                                     e.offset());
                }
            }
        }
        ExprPtr dens;
        try {
            dens = parse_expr(density);
        } catch (const ParseError& e) {
            throw ParseError(std::string("density: ") + e.what(), e.offset());
        }
        return MatrixWeight(rho, a, b, std::move(entries), std::move(dens));
    }

    int rho() const noexcept { return rho_; }
    int dim() const noexcept { return rho_ + 1; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }

    const ExprPtr& entry_expr(int i, int j) const { return entries_[index(i, j)]; }

    double entry_value(int i, int j, double z) const { return eval_expr(entries_[index(i, j)], z); }

    ScalarFunction entry(int i, int j) const { return ScalarFunction::from_expr(entries_[index(i, j)]); }

    const ExprPtr& density_expr() const noexcept { return density_; }

    double density_value(double z) const { return eval_expr(density_, z); }

    ScalarFunction density() const { return ScalarFunction::from_expr(density_); }

    /// M0(z), symmetrized as (M + M^T)/2 to kill roundoff asymmetry.
    Eigen::MatrixXd eval(double z) const {
        const int d = dim();
        Eigen::MatrixXd M(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) M(i, j) = entry_value(i, j, z);
        return 0.5 * (M + M.transpose()).eval();
    }

    /// Max polynomial degree bound over all entries, or nullopt.
    std::optional<int> entries_degree() const {
        int d = 0;
        for (const auto& e : entries_) {
            auto deg = expr_poly_degree(e);
            if (!deg) return std::nullopt;
            d = std::max(d, *deg);
        }
        return d;
    }

    std::optional<int> density_degree() const { return expr_poly_degree(density_); }

    /// Combined degree bound of entries and density, or nullopt.
    std::optional<int> total_degree() const {
        auto e = entries_degree();
        auto m = density_degree();
        if (!e || !m) return std::nullopt;
        return *e + *m;
    }

private:
    int rho_;
    double a_, b_;
    std::vector<ExprPtr> entries_;  // row-major, (rho+1)^2
    ExprPtr density_;

    std::size_t index(int i, int j) const {
        if (i < 0 || j < 0 || i > rho_ || j > rho_)
            throw std::out_of_range("MatrixWeight: entry index out of range");
        return static_cast<std::size_t>(i) * dim() + j;
    }
};

inline Eigen::MatrixXd weight_eval(const MatrixWeight& W, double z) { return W.eval(z); }

/// Checks admissibility of the weight on a Chebyshev grid: entry symmetry,
/// positive definiteness (minimum eigenvalue above eps), positive determinant
/// and positive density. Failures are report entries, never throws on bad
/// values (only on evaluation domain errors).
inline VerificationReport validate_weight(const MatrixWeight& W, int grid_points = 1001,
                                          double eps = 1e-12, double symmetry_tol = 1e-10) {
    if (grid_points < 2) throw std::invalid_argument("validate_weight: need at least 2 grid points");

    const auto grid = chebyshev_grid(grid_points, W.a(), W.b());
    const int d = W.dim();

    double worst_sym = 0.0, worst_sym_z = grid.front();
    double min_eig = std::numeric_limits<double>::infinity(), min_eig_z = grid.front();
    double min_det = std::numeric_limits<double>::infinity(), min_det_z = grid.front();
    double min_dens = std::numeric_limits<double>::infinity(), min_dens_z = grid.front();

    for (double z : grid) {
        Eigen::MatrixXd raw(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) raw(i, j) = W.entry_value(i, j, z);

        const double scale = std::max(1.0, raw.cwiseAbs().maxCoeff());
        const double asym = (raw - raw.transpose()).cwiseAbs().maxCoeff() / scale;
        if (asym > worst_sym) {
            worst_sym = asym;
            worst_sym_z = z;
        }

        const Eigen::MatrixXd M = 0.5 * (raw + raw.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        if (lo < min_eig) {
            min_eig = lo;
            min_eig_z = z;
        }
        const double det = M.determinant();
        if (det < min_det) {
            min_det = det;
            min_det_z = z;
        }
        const double dens = W.density_value(z);
        if (dens < min_dens) {
            min_dens = dens;
            min_dens_z = z;
        }
    }

    VerificationReport rep;
    rep.add(CheckRecord::residual("weight.symmetry", worst_sym, symmetry_tol, worst_sym_z));
    rep.add(CheckRecord::bound("weight.min_eigenvalue", min_eig, eps, min_eig > eps, min_eig_z,
                               "requires min eigenvalue > eps on the grid"));
    rep.add(CheckRecord::bound("weight.det_positive", min_det, 0.0, min_det > 0.0, min_det_z,
                               "requires det M0 > 0 on the grid"));
    rep.add(CheckRecord::bound("weight.density_positive", min_dens, 0.0, min_dens > 0.0, min_dens_z,
                               "requires density > 0 on the grid"));

    const auto mass = integrate_auto([&](double z) { return W.density_value(z); }, W.a(), W.b(),
                                     auto_order(W.density_degree(), 0));
    rep.add(CheckRecord::bound("weight.density_integrable", mass.value, 0.0,
                               std::isfinite(mass.value) && mass.value > 0.0, std::nullopt,
                               "total mass of the measure"));
    if (!mass.converged) rep.warn("density quadrature did not converge at max order");
    return rep;
}

}  // namespace sobmat
