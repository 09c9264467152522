#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sobmat/functions.hpp"
#include "sobmat/report.hpp"
#include "sobmat/weight.hpp"

namespace sobmat {

/// B(z) is numerically singular at a point.
class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(double z, double abs_det)
        : std::runtime_error("matrix is singular at z = " + std::to_string(z) +
                             " (|det| = " + std::to_string(abs_det) + ")"),
          z_(z),
          abs_det_(abs_det) {}

    double z() const noexcept { return z_; }
    double abs_det() const noexcept { return abs_det_; }

private:
    double z_;
    double abs_det_;
};

/// The Leibniz matrix A(z): z on the diagonal, 1..rho on the superdiagonal.
/// Right multiplication realizes jet(z f) = jet(f) A(z).
inline Eigen::MatrixXd leibniz_matrix(int rho, double z) {
    if (rho < 0) throw std::invalid_argument("leibniz_matrix: rho must be >= 0");
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rho + 1, rho + 1);
    for (int r = 0; r <= rho; ++r) {
        A(r, r) = z;
        if (r >= 1) A(r - 1, r) = static_cast<double>(r);
    }
    return A;
}

/// B-hat(z) = (j * b_{i,j-1}(z)); column 0 is zero. C = zB + B-hat.
inline MatrixFunction hat_B(const MatrixFunction& B) {
    const int d = B.dim();
    MatrixFunction H(d);
    for (int i = 0; i < d; ++i) {
        H.entry(i, 0) = ScalarFunction(0.0);
        for (int j = 1; j < d; ++j) {
            const ScalarFunction& b = B.entry(i, j - 1);
            std::optional<int> deg = b.degree;
            H.entry(i, j) = ScalarFunction(
                [j, fn = b.fn](double z) { return static_cast<double>(j) * fn(z); }, deg);
        }
    }
    return H;
}

namespace detail {

// C(z) = B(z) A(z), which reduces entrywise to z b_{i,j} + j b_{i,j-1}.
inline MatrixFunction multiply_by_leibniz(const MatrixFunction& B) {
    const int d = B.dim();
    MatrixFunction C(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const ScalarFunction& b = B.entry(i, j);
            std::optional<int> deg = b.degree ? std::optional<int>(*b.degree + 1) : std::nullopt;
            if (j == 0) {
                C.entry(i, j) = ScalarFunction([fn = b.fn](double z) { return z * fn(z); }, deg);
            } else {
                const ScalarFunction& bl = B.entry(i, j - 1);
                if (deg && bl.degree) deg = std::max(*deg, *bl.degree);
                else deg = std::nullopt;
                C.entry(i, j) = ScalarFunction(
                    [j, fn = b.fn, fl = bl.fn](double z) {
                        return z * fn(z) + static_cast<double>(j) * fl(z);
                    },
                    deg);
            }
        }
    return C;
}

}  // namespace detail

enum class BuilderKind { ClosedFormRho1, ClosedFormRho2, GeneralSolver };

inline const char* builder_name(BuilderKind k) {
    switch (k) {
        case BuilderKind::ClosedFormRho1: return "closed_form_rho1";
        case BuilderKind::ClosedFormRho2: return "closed_form_rho2";
        case BuilderKind::GeneralSolver: return "general_solver";
    }
    return "?";
}

/// Matrix functions B, C with C = B A, making the multiplication operator
/// representable as C B^{-1} on jets once B M0 and B-hat M0 are symmetric.
struct SymmetrizerPair {
    MatrixFunction B;
    MatrixFunction C;
    int rho = 0;
    BuilderKind provenance = BuilderKind::GeneralSolver;
    std::vector<ScalarFunction> free_row;  // the rho+1 free parameter functions
};

/// Closed-form symmetrizer for rho = 1. The free pair is (b_{1,0}, b_{1,1});
/// the default choice b_{1,0} = m_{1,1}, b_{1,1} = 0 gives
///   B = [[m_{1,0}, m_{0,0} - m_{1,0}^2/m_{1,1}], [m_{1,1}, 0]]
/// with det B = -det M0.
inline SymmetrizerPair build_B_rho1(const MatrixWeight& W,
                                    std::optional<std::array<ScalarFunction, 2>> free = {}) {
    if (W.rho() != 1) throw std::invalid_argument("build_B_rho1: weight must have rho = 1");

    SymmetrizerPair pair;
    pair.rho = 1;
    pair.provenance = BuilderKind::ClosedFormRho1;
    pair.B = MatrixFunction(2);

    auto m = [W](int i, int j, double z) { return W.entry_value(i, j, z); };

    if (!free) {
        pair.free_row = {W.entry(1, 1), ScalarFunction(0.0)};
        pair.B.entry(0, 0) = W.entry(1, 0);
        pair.B.entry(0, 1) = ScalarFunction([m](double z) {
            return m(0, 0, z) - m(1, 0, z) * m(1, 0, z) / m(1, 1, z);
        });
        pair.B.entry(1, 0) = W.entry(1, 1);
        pair.B.entry(1, 1) = ScalarFunction(0.0);
    } else {
        const ScalarFunction b10 = (*free)[0];
        const ScalarFunction b11 = (*free)[1];
        pair.free_row = {b10, b11};
        pair.B.entry(0, 0) = ScalarFunction([m, f = b10.fn](double z) {
            return f(z) * m(1, 0, z) / m(1, 1, z);
        });
        pair.B.entry(0, 1) = ScalarFunction([m, f0 = b10.fn, f1 = b11.fn](double z) {
            const double m11 = m(1, 1, z);
            return (f0(z) * (m(0, 0, z) - m(1, 0, z) * m(1, 0, z) / m11) + f1(z) * m(1, 0, z)) /
                   m11;
        });
        pair.B.entry(1, 0) = b10;
        pair.B.entry(1, 1) = b11;
    }
    pair.C = detail::multiply_by_leibniz(pair.B);
    return pair;
}

/// Closed-form symmetrizer for rho = 2. The free triple is the bottom row
/// (b_{2,0}, b_{2,1}, b_{2,2}); the default (2 m_{2,2}^2, 0, 0) produces the
/// explicit matrix from the underlying derivation. A custom free row is
/// resolved through the elimination chain
///   b_{1,0} -> b_{0,0} -> b_{0,1}, b_{1,1} -> b_{0,2}, b_{1,2}.
inline SymmetrizerPair build_B_rho2(const MatrixWeight& W,
                                    std::optional<std::array<ScalarFunction, 3>> free = {}) {
    if (W.rho() != 2) throw std::invalid_argument("build_B_rho2: weight must have rho = 2");

    SymmetrizerPair pair;
    pair.rho = 2;
    pair.provenance = BuilderKind::ClosedFormRho2;
    pair.B = MatrixFunction(3);

    auto m = [W](int i, int j, double z) { return W.entry_value(i, j, z); };
    auto delta2 = [m](double z) {
        const double d = m(2, 2, z) * m(1, 1, z) - m(1, 2, z) * m(1, 2, z);
        if (d <= 0.0)
            throw std::domain_error("Delta_2 <= 0 at z = " + std::to_string(z) +
                                    "; weight is not positive definite there");
        return d;
    };

    if (!free) {
        pair.free_row = {ScalarFunction([m](double z) {
                             const double m22 = m(2, 2, z);
                             return 2.0 * m22 * m22;
                         }),
                         ScalarFunction(0.0), ScalarFunction(0.0)};
        pair.B.entry(0, 0) = ScalarFunction([m](double z) { return 2.0 * m(2, 0, z) * m(2, 2, z); });
        pair.B.entry(0, 1) = ScalarFunction(
            [m](double z) { return m(1, 0, z) * m(2, 2, z) - m(2, 0, z) * m(1, 2, z); });
        pair.B.entry(0, 2) = ScalarFunction([m](double z) {
            const double m22 = m(2, 2, z);
            const double m20 = m(2, 0, z);
            const double m12 = m(1, 2, z);
            return 2.0 * m22 * m(0, 0, z) - m12 * m(1, 0, z) + m20 * m12 * m12 / m22 -
                   2.0 * m20 * m20;
        });
        pair.B.entry(1, 0) = ScalarFunction([m](double z) { return 2.0 * m(2, 1, z) * m(2, 2, z); });
        pair.B.entry(1, 1) = ScalarFunction(
            [m](double z) { return m(1, 1, z) * m(2, 2, z) - m(2, 1, z) * m(2, 1, z); });
        pair.B.entry(1, 2) = ScalarFunction([m](double z) {
            const double m22 = m(2, 2, z);
            const double m12 = m(1, 2, z);
            return 2.0 * m22 * m(0, 1, z) - m12 * m(1, 1, z) + m12 * m12 * m12 / m22 -
                   2.0 * m(2, 1, z) * m(0, 2, z);
        });
        pair.B.entry(2, 0) = pair.free_row[0];
        pair.B.entry(2, 1) = ScalarFunction(0.0);
        pair.B.entry(2, 2) = ScalarFunction(0.0);
    } else {
        pair.free_row = {(*free)[0], (*free)[1], (*free)[2]};
        auto f0 = (*free)[0].fn, f1 = (*free)[1].fn, f2 = (*free)[2].fn;

        // Row values at a point, resolved in elimination order.
        struct Rows {
            double b00, b01, b02, b10, b11, b12;
        };
        auto resolve = [m, delta2, f0, f1, f2](double z) {
            const double m00 = m(0, 0, z), m01 = m(0, 1, z), m02 = m(0, 2, z);
            const double m10 = m(1, 0, z), m11 = m(1, 1, z), m12 = m(1, 2, z);
            const double m20 = m(2, 0, z), m21 = m(2, 1, z), m22 = m(2, 2, z);
            const double d2 = delta2(z);
            const double b20 = f0(z), b21 = f1(z), b22 = f2(z);
            Rows r{};
            r.b10 = b20 * m21 / m22;
            r.b00 = (m22 / d2) * (r.b10 * (m10 - m20 * m12 / m22) -
                                  b20 * (m21 * m10 - m20 * m11) / m22);
            r.b01 = b20 * m10 / (2.0 * m22) + b21 * m20 / m22 - r.b00 * m12 / (2.0 * m22);
            r.b11 = b20 * m11 / (2.0 * m22) + b21 * m21 / m22 - r.b10 * m12 / (2.0 * m22);
            r.b02 = (b20 * m00 + b21 * m10 + b22 * m20 - r.b00 * m02 - r.b01 * m12) / m22;
            r.b12 = (b20 * m01 + b21 * m11 + b22 * m21 - r.b10 * m02 - r.b11 * m12) / m22;
            return r;
        };

        pair.B.entry(0, 0) = ScalarFunction([resolve](double z) { return resolve(z).b00; });
        pair.B.entry(0, 1) = ScalarFunction([resolve](double z) { return resolve(z).b01; });
        pair.B.entry(0, 2) = ScalarFunction([resolve](double z) { return resolve(z).b02; });
        pair.B.entry(1, 0) = ScalarFunction([resolve](double z) { return resolve(z).b10; });
        pair.B.entry(1, 1) = ScalarFunction([resolve](double z) { return resolve(z).b11; });
        pair.B.entry(1, 2) = ScalarFunction([resolve](double z) { return resolve(z).b12; });
        pair.B.entry(2, 0) = (*free)[0];
        pair.B.entry(2, 1) = (*free)[1];
        pair.B.entry(2, 2) = (*free)[2];
    }
    pair.C = detail::multiply_by_leibniz(pair.B);
    return pair;
}

/// Residuals of the six rho = 2 symmetry equations at z, each normalized by
/// max(1, |lhs|, |rhs|).
inline std::array<double, 6> check_rho2_system(const MatrixFunction& B, const MatrixWeight& W,
                                               double z) {
    if (B.dim() != 3 || W.rho() != 2)
        throw std::invalid_argument("check_rho2_system: requires rho = 2");
    auto m = [&](int i, int j) { return W.entry_value(i, j, z); };
    auto b = [&](int i, int j) { return B.entry(i, j)(z); };

    const std::array<std::pair<double, double>, 6> sides = {{
        {b(1, 0) * m(0, 0) + b(1, 1) * m(1, 0) + b(1, 2) * m(2, 0),
         b(0, 0) * m(0, 1) + b(0, 1) * m(1, 1) + b(0, 2) * m(2, 1)},
        {b(1, 0) * m(1, 0) + 2.0 * b(1, 1) * m(2, 0),
         b(0, 0) * m(1, 1) + 2.0 * b(0, 1) * m(2, 1)},
        {b(2, 0) * m(0, 0) + b(2, 1) * m(1, 0) + b(2, 2) * m(2, 0),
         b(0, 0) * m(0, 2) + b(0, 1) * m(1, 2) + b(0, 2) * m(2, 2)},
        {b(2, 0) * m(1, 0) + 2.0 * b(2, 1) * m(2, 0),
         b(0, 0) * m(1, 2) + 2.0 * b(0, 1) * m(2, 2)},
        {b(2, 0) * m(0, 1) + b(2, 1) * m(1, 1) + b(2, 2) * m(2, 1),
         b(1, 0) * m(0, 2) + b(1, 1) * m(1, 2) + b(1, 2) * m(2, 2)},
        {b(2, 0) * m(1, 1) + 2.0 * b(2, 1) * m(2, 1),
         b(1, 0) * m(1, 2) + 2.0 * b(1, 1) * m(2, 2)},
    }};

    std::array<double, 6> res{};
    for (std::size_t k = 0; k < 6; ++k) {
        const auto [lhs, rhs] = sides[k];
        res[k] = std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
    }
    return res;
}

/// The two determinant identities appearing in the rho = 2 elimination:
/// the long defining expressions for c_{1,0}, c_{2,0} against the compact
/// forms m_{2,2} det M0 and m_{2,1} det M0, evaluated by independent routes.
struct DetIdentityReport {
    double z = 0.0;
    double c10 = 0.0, c10_ref = 0.0, rel_c10 = 0.0;
    double c20 = 0.0, c20_ref = 0.0, rel_c20 = 0.0;
};

inline DetIdentityReport rho2_det_identities(const MatrixWeight& W, double z) {
    if (W.rho() != 2) throw std::invalid_argument("rho2_det_identities: requires rho = 2");
    auto m = [&](int i, int j) { return W.entry_value(i, j, z); };

    const double m00 = m(0, 0), m01 = m(0, 1), m02 = m(0, 2);
    const double m10 = m(1, 0), m11 = m(1, 1), m12 = m(1, 2);
    const double m20 = m(2, 0), m21 = m(2, 1), m22 = m(2, 2);

    const double d1 = -m02 / m22 + m12 * m12 / (2.0 * m22 * m22);
    const double d2 = m22 * m11 - m12 * m12;

    const double c10 = m22 * m00 * d2 - 0.5 * m12 * m10 * d2 + m20 * m22 * d1 * d2 -
                       (m22 * m01 - 0.5 * m12 * m11 + m22 * m21 * d1) * (m22 * m10 - m20 * m12);
    const double c20 = d2 * (m21 * m00 - m20 * m01) +
                       (m12 * m20 * m11 - m12 * m21 * m10) / (2.0 * m22) * d2 -
                       (m21 * m10 - m20 * m11) * (m22 * m01 - 0.5 * m12 * m11 + m22 * m21 * d1);

    const double det = W.eval(z).determinant();

    DetIdentityReport rep;
    rep.z = z;
    rep.c10 = c10;
    rep.c10_ref = m22 * det;
    rep.c20 = c20;
    rep.c20_ref = m21 * det;
    rep.rel_c10 = std::abs(c10 - rep.c10_ref) / std::max(1.0, std::abs(rep.c10_ref));
    rep.rel_c20 = std::abs(c20 - rep.c20_ref) / std::max(1.0, std::abs(rep.c20_ref));
    return rep;
}

/// Per-point outcome of the general pointwise solve.
struct GeneralSolveDiagnostics {
    struct PointRecord {
        double z = 0.0;
        bool solvable = false;
        double residual = 0.0;
        double abs_det_B = 0.0;
        double det_margin = 0.0;  // |det B| / ||B||^dim, comparable to the singularity threshold
    };
    std::vector<PointRecord> points;
    double max_residual = 0.0;
    double min_abs_det = std::numeric_limits<double>::infinity();
    double min_det_margin = std::numeric_limits<double>::infinity();
    double continuity = 0.0;  // max adjacent-point solution jump / grid spacing
    bool all_solvable = true;
};

namespace detail {

// Pointwise assembly and rank-revealing solve of the rho(rho+1) symmetry
// equations in the unknown rows 0..rho-1, with row rho pinned to the free
// parameters. Pure per-point computation; shared by the returned matrix
// function and the grid diagnostics.
class GeneralRowSolver {
public:
    GeneralRowSolver(MatrixWeight W, int rho, std::vector<ScalarFunction> free_row,
                     double solve_tol = 1e-10)
        : W_(std::move(W)), rho_(rho), free_row_(std::move(free_row)), solve_tol_(solve_tol) {
        if (rho_ < 1) throw std::invalid_argument("solve_B_general: rho must be >= 1");
        if (W_.rho() != rho_)
            throw std::invalid_argument("solve_B_general: weight dimension does not match rho");
        if (static_cast<int>(free_row_.size()) != rho_ + 1)
            throw std::invalid_argument("solve_B_general: free row must have rho+1 entries");
    }

    struct PointSolution {
        Eigen::MatrixXd B;       // full (rho+1)x(rho+1) matrix, free row inserted
        Eigen::VectorXd x;       // stacked unknown rows 0..rho-1
        double residual = 0.0;   // normalized equation residual
        bool solvable = false;
    };

    PointSolution solve(double z) const {
        const int d = rho_ + 1;
        const int n = rho_ * d;  // unknowns = equations
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

        Eigen::MatrixXd m(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) = W_.entry_value(i, j, z);
        Eigen::VectorXd pinned(d);
        for (int k = 0; k < d; ++k) pinned(k) = free_row_[k](z);

        auto unknown = [d](int i, int j) { return i * d + j; };

        int eq = 0;
        for (int j = 0; j <= rho_ - 1; ++j) {
            for (int i = j + 1; i <= rho_; ++i) {
                // (B M0)_{i,j} = (B M0)_{j,i}
                for (int k = 0; k < d; ++k) {
                    if (i < rho_) A(eq, unknown(i, k)) += m(k, j);
                    else rhs(eq) -= pinned(k) * m(k, j);
                    A(eq, unknown(j, k)) -= m(k, i);
                }
                ++eq;
                // (B-hat M0)_{i,j} = (B-hat M0)_{j,i}
                for (int k = 1; k < d; ++k) {
                    const double kk = static_cast<double>(k);
                    if (i < rho_) A(eq, unknown(i, k - 1)) += kk * m(k, j);
                    else rhs(eq) -= pinned(k - 1) * kk * m(k, j);
                    A(eq, unknown(j, k - 1)) -= kk * m(k, i);
                }
                ++eq;
            }
        }

        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-12);
        PointSolution sol;
        sol.x = svd.solve(rhs);
        const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
        sol.residual = (A * sol.x - rhs).cwiseAbs().maxCoeff() / scale;
        sol.solvable = sol.residual <= solve_tol_;

        sol.B.resize(d, d);
        for (int i = 0; i < rho_; ++i)
            for (int j = 0; j < d; ++j) sol.B(i, j) = sol.x(unknown(i, j));
        for (int j = 0; j < d; ++j) sol.B(rho_, j) = pinned(j);
        return sol;
    }

    const std::vector<ScalarFunction>& free_row() const noexcept { return free_row_; }

private:
    MatrixWeight W_;
    int rho_;
    std::vector<ScalarFunction> free_row_;
    double solve_tol_;
};

}  // namespace detail

/// Pointwise general construction of B for any rho >= 1: at each z the
/// symmetry equations are assembled and solved by SVD with the last row
/// pinned to free_row (default b_{rho,0} = 1, rest 0). Rank-deficient or
/// inconsistent points are recorded in the diagnostics, never thrown: this is
/// the honest outcome space of the open general-rho question.
inline SymmetrizerPair solve_B_general(const MatrixWeight& W, int rho,
                                       std::vector<ScalarFunction> free_row,
                                       const std::vector<double>& grid,
                                       GeneralSolveDiagnostics* diag = nullptr,
                                       double solve_tol = 1e-10) {
    if (free_row.empty()) {
        free_row.assign(static_cast<std::size_t>(rho) + 1, ScalarFunction(0.0));
        free_row[0] = ScalarFunction(1.0);
    }
    auto solver = std::make_shared<detail::GeneralRowSolver>(W, rho, std::move(free_row), solve_tol);

    if (diag) {
        *diag = GeneralSolveDiagnostics{};
        Eigen::VectorXd prev_x;
        double prev_z = 0.0;
        for (double z : grid) {
            auto sol = solver->solve(z);
            GeneralSolveDiagnostics::PointRecord rec;
            rec.z = z;
            rec.solvable = sol.solvable;
            rec.residual = sol.residual;
            rec.abs_det_B = std::abs(sol.B.determinant());
            const double norm = std::max(sol.B.cwiseAbs().rowwise().sum().maxCoeff(), 1e-300);
            rec.det_margin = rec.abs_det_B / std::pow(norm, rho + 1);
            diag->points.push_back(rec);
            diag->max_residual = std::max(diag->max_residual, sol.residual);
            diag->min_abs_det = std::min(diag->min_abs_det, rec.abs_det_B);
            diag->min_det_margin = std::min(diag->min_det_margin, rec.det_margin);
            diag->all_solvable = diag->all_solvable && sol.solvable;
            if (prev_x.size() > 0 && z != prev_z) {
                const double jump = (sol.x - prev_x).cwiseAbs().maxCoeff() / (z - prev_z);
                diag->continuity = std::max(diag->continuity, std::abs(jump));
            }
            prev_x = sol.x;
            prev_z = z;
        }
    }

    SymmetrizerPair pair;
    pair.rho = rho;
    pair.provenance = BuilderKind::GeneralSolver;
    pair.free_row = solver->free_row();
    pair.B = MatrixFunction(rho + 1);
    for (int i = 0; i <= rho; ++i)
        for (int j = 0; j <= rho; ++j)
            pair.B.entry(i, j) =
                ScalarFunction([solver, i, j](double z) { return solver->solve(z).B(i, j); });
    pair.C = detail::multiply_by_leibniz(pair.B);
    return pair;
}

/// Max normalized asymmetry of B M0, B-hat M0 and C M0 over the grid.
inline VerificationReport check_symmetry(const SymmetrizerPair& pair, const MatrixWeight& W,
                                         const std::vector<double>& grid, double tol = 1e-10) {
    const MatrixFunction Bhat = hat_B(pair.B);

    struct Worst {
        double value = 0.0;
        double z = 0.0;
    };
    std::array<Worst, 3> worst{};

    for (double z : grid) {
        const Eigen::MatrixXd M0 = W.eval(z);
        const std::array<Eigen::MatrixXd, 3> prods = {pair.B.eval(z) * M0, Bhat.eval(z) * M0,
                                                      pair.C.eval(z) * M0};
        for (std::size_t k = 0; k < 3; ++k) {
            const double scale = std::max(prods[k].cwiseAbs().maxCoeff(), 1e-30);
            const double asym = (prods[k] - prods[k].transpose()).cwiseAbs().maxCoeff() / scale;
            if (asym > worst[k].value) worst[k] = {asym, z};
        }
    }

    VerificationReport rep;
    rep.add(CheckRecord::residual("symmetry.B_M0", worst[0].value, tol, worst[0].z));
    rep.add(CheckRecord::residual("symmetry.Bhat_M0", worst[1].value, tol, worst[1].z));
    rep.add(CheckRecord::residual("symmetry.C_M0", worst[2].value, tol, worst[2].z));
    return rep;
}

/// B(z)^{-1} by LU with partial pivoting; throws SingularMatrixError when
/// |det| falls below 1e-12 relative to the matrix scale.
inline Eigen::MatrixXd invert_B_at(const MatrixFunction& B, double z,
                                   double singular_tol = 1e-12) {
    const Eigen::MatrixXd Bz = B.eval(z);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Bz);
    const double abs_det = std::abs(lu.determinant());
    const double norm = Bz.cwiseAbs().rowwise().sum().maxCoeff();
    const double threshold = std::max(singular_tol * std::pow(norm, B.dim()),
                                      std::numeric_limits<double>::min());
    if (!(abs_det >= threshold)) throw SingularMatrixError(z, abs_det);
    return lu.inverse();
}

/// Scan of |det B(z)| over the grid against the relative singularity
/// threshold. Returns the minimum and flags any near-singular point.
inline CheckRecord scan_det_B(const MatrixFunction& B, const std::vector<double>& grid,
                              double singular_tol = 1e-12) {
    double min_margin = std::numeric_limits<double>::infinity();
    double min_det = std::numeric_limits<double>::infinity();
    double worst_z = grid.empty() ? 0.0 : grid.front();
    for (double z : grid) {
        const Eigen::MatrixXd Bz = B.eval(z);
        const double abs_det = std::abs(Bz.determinant());
        const double norm = std::max(Bz.cwiseAbs().rowwise().sum().maxCoeff(), 1e-300);
        const double margin = abs_det / std::pow(norm, B.dim());
        if (margin < min_margin) {
            min_margin = margin;
            min_det = abs_det;
            worst_z = z;
        }
    }
    return CheckRecord::bound("symmetrizer.det_B", min_det, singular_tol,
                              min_margin > singular_tol, worst_z,
                              "minimum |det B| over the grid; pass requires the scale-relative "
                              "margin to stay above the singularity threshold");
}

/// Verifies B^{-1}(z) C(z) = A(z) over the grid; also records the deviation of
/// C(z) B^{-1}(z) from A(z), which does not vanish (the factors do not
/// commute).
inline VerificationReport verify_factorization(const SymmetrizerPair& pair,
                                               const std::vector<double>& grid,
                                               double tol = 1e-10,
                                               double singular_tol = 1e-12) {
    double worst = 0.0, worst_z = grid.empty() ? 0.0 : grid.front();
    double cb_dev = 0.0;
    for (double z : grid) {
        const Eigen::MatrixXd Binv = invert_B_at(pair.B, z, singular_tol);
        const Eigen::MatrixXd Cz = pair.C.eval(z);
        const Eigen::MatrixXd A = leibniz_matrix(pair.rho, z);
        const double denom = 1.0 + A.cwiseAbs().maxCoeff();
        const double r = (Binv * Cz - A).cwiseAbs().maxCoeff() / denom;
        if (r > worst) {
            worst = r;
            worst_z = z;
        }
        cb_dev = std::max(cb_dev, (Cz * Binv - A).cwiseAbs().maxCoeff() / denom);
    }
    VerificationReport rep;
    rep.add(CheckRecord::residual("factorization.binv_c", worst, tol, worst_z));
    rep.details["factorization.cb_inv_deviation"] = cb_dev;
    return rep;
}

}  // namespace sobmat
