#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "sobmat/inner.hpp"
#include "sobmat/orthopoly.hpp"
#include "sobmat/symmetrizer.hpp"

namespace sobmat {

/// Right matrix multiplication on vector functions: u(z) -> u(z) D(z). This is
/// how every operator in sight acts on jets.
inline VectorFunction apply_matrix_op(const VectorFunction& u, const MatrixFunction& D) {
    if (static_cast<int>(u.size()) != D.dim())
        throw std::invalid_argument("apply_matrix_op: dimension mismatch");
    const int d = D.dim();
    std::vector<ScalarFunction> comps;
    comps.reserve(d);
    for (int j = 0; j < d; ++j) {
        std::optional<int> deg = 0;
        for (int i = 0; i < d; ++i) {
            const auto& e = D.entry(i, j);
            if (!deg || !u[i].degree || !e.degree) {
                deg = std::nullopt;
                break;
            }
            deg = std::max(*deg, *u[i].degree + *e.degree);
        }
        comps.emplace_back(
            [u, D, j](double z) {
                double s = 0.0;
                for (int i = 0; i < D.dim(); ++i) s += u[i](z) * D.entry(i, j)(z);
                return s;
            },
            deg);
    }
    return VectorFunction(std::move(comps));
}

/// Relative L2(M) residual of (B^{-1} then C) applied to jet(p) against
/// jet(z p). The matrices act on the right, so the operator composition
/// C B^{-1} becomes the pointwise product B^{-1}(z) C(z).
inline double verify_mult_operator(const Polynomial& p, const SymmetrizerPair& pair,
                                   const MatrixWeight& W,
                                   int max_order = kDefaultMaxQuadOrder,
                                   double singular_tol = 1e-12) {
    if (p.is_zero()) return 0.0;
    const VectorFunction jp = jet(p, W.rho());
    const VectorFunction jzp = jet(p.times_z(), W.rho());

    auto err2 = [&](double z) {
        const Eigen::MatrixXd K = invert_B_at(pair.B, z, singular_tol) * pair.C.eval(z);
        const Eigen::RowVectorXd e = jp.eval(z) * K - jzp.eval(z);
        return (e * W.eval(z) * e.transpose())(0) * W.density_value(z);
    };
    const auto num = integrate_auto(err2, W.a(), W.b(),
                                    auto_order(std::nullopt, std::nullopt, max_order), max_order);
    const double den = l2m_norm(jzp, W, max_order);
    return std::sqrt(std::max(0.0, num.value)) / den;
}

/// The indefinite bilinear form sigma(f,g) = (B^{-1} f, g)_{L2(M)}.
struct IndefiniteForm {
    SymmetrizerPair pair;
    MatrixWeight weight;
    int max_order = kDefaultMaxQuadOrder;
    double singular_tol = 1e-12;
};

namespace detail {

// Fixed-order symmetric contraction u S v^T with S = sym(K). Addition order is
// invariant under swapping u and v, so sigma(f,g) and sigma(g,f) produce
// bit-identical sums; the symmetrization of K kills the same roundoff
// asymmetry that weight evaluation removes.
inline double symmetric_contraction(const Eigen::RowVectorXd& u, const Eigen::MatrixXd& K,
                                    const Eigen::RowVectorXd& v) {
    const int d = static_cast<int>(K.rows());
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(d) * (d + 1) / 2);
    for (int i = 0; i < d; ++i) terms.push_back(K(i, i) * (u(i) * v(i)));
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            const double s = 0.5 * (K(i, j) + K(j, i));
            terms.push_back(s * (u(i) * v(j) + u(j) * v(i)));
        }
    return pairwise_sum(terms);
}

}  // namespace detail

/// sigma(f,g): adaptive quadrature of f(z) B^{-1}(z) M0(z) g(z)^T density dz.
inline double sigma_form(const VectorFunction& f, const VectorFunction& g,
                         const IndefiniteForm& form) {
    const MatrixWeight& W = form.weight;
    if (static_cast<int>(f.size()) != W.dim() || static_cast<int>(g.size()) != W.dim())
        throw std::invalid_argument("sigma_form: component count must equal rho+1");
    auto integrand = [&](double z) {
        const Eigen::MatrixXd K = invert_B_at(form.pair.B, z, form.singular_tol) * W.eval(z);
        return detail::symmetric_contraction(f.eval(z), K, g.eval(z)) * W.density_value(z);
    };
    return integrate_auto(integrand, W.a(), W.b(),
                          auto_order(std::nullopt, std::nullopt, form.max_order), form.max_order)
        .value;
}

/// The orthogonality relations [B y_n(A) 1, y_m(A) 1]_{B^{-1}} = A_n delta_nm.
/// y_n(A) 1 is the class of y_n itself, so the left operand is jet(y_n) B.
/// Reports the full deviation matrix: off-diagonal entries normalized by
/// sqrt(A_n A_m), diagonal entries relative to A_n.
inline VerificationReport verify_corollary(const SobolevOPSet& ops, const SymmetrizerPair& pair,
                                           const MatrixWeight& W, double tol,
                                           int max_order = kDefaultMaxQuadOrder) {
    const int n = static_cast<int>(ops.polys.size());
    IndefiniteForm form{pair, W, max_order};

    Eigen::MatrixXd values(n, n), deviations(n, n);
    double worst_off = 0.0, worst_diag = 0.0;
    for (int i = 0; i < n; ++i) {
        const VectorFunction lhs = apply_matrix_op(jet(ops.polys[i], W.rho()), pair.B);
        for (int j = 0; j < n; ++j) {
            const double v = sigma_form(lhs, jet(ops.polys[j], W.rho()), form);
            values(i, j) = v;
            if (i == j) {
                deviations(i, j) = std::abs(v - ops.norms[i]) / ops.norms[i];
                worst_diag = std::max(worst_diag, deviations(i, j));
            } else {
                deviations(i, j) = std::abs(v) / std::sqrt(ops.norms[i] * ops.norms[j]);
                worst_off = std::max(worst_off, deviations(i, j));
            }
        }
    }

    VerificationReport rep;
    rep.add(CheckRecord::residual("corollary.off_diagonal", worst_off, tol));
    rep.add(CheckRecord::residual("corollary.diagonal", worst_diag, tol));
    auto to_json = [](const Eigen::MatrixXd& M) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    rep.details["corollary.matrix"] = to_json(values);
    rep.details["corollary.deviations"] = to_json(deviations);
    return rep;
}

/// Randomized check that A and B are symmetric with respect to sigma:
/// sigma(Af,g) = sigma(f,Ag) over polynomial pairs and
/// sigma(Bu,v) = sigma(u,Bv) over jet pairs, each normalized by the largest
/// operand L2(M) norm. Trials are independently seeded as seed + index.
inline VerificationReport verify_sigma_symmetry(const SymmetrizerPair& pair, const MatrixWeight& W,
                                                int deg, int trials, std::uint64_t seed,
                                                double tol = 1e-10,
                                                int max_order = kDefaultMaxQuadOrder) {
    IndefiniteForm form{pair, W, max_order};
    double worst_a = 0.0, worst_b = 0.0;

    for (int t = 0; t < trials; ++t) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(t));
        const Polynomial f = random_polynomial(deg, rng);
        const Polynomial g = random_polynomial(deg, rng);

        const VectorFunction jf = jet(f, W.rho());
        const VectorFunction jg = jet(g, W.rho());
        const VectorFunction jzf = jet(f.times_z(), W.rho());
        const VectorFunction jzg = jet(g.times_z(), W.rho());

        const double a1 = sigma_form(jzf, jg, form);
        const double a2 = sigma_form(jf, jzg, form);
        const double norm_a = std::max({l2m_norm(jzf, W, max_order), l2m_norm(jg, W, max_order),
                                        l2m_norm(jf, W, max_order), l2m_norm(jzg, W, max_order),
                                        1e-300});
        worst_a = std::max(worst_a, std::abs(a1 - a2) / norm_a);

        const Polynomial u = random_polynomial(deg, rng);
        const Polynomial v = random_polynomial(deg, rng);
        const VectorFunction ju = jet(u, W.rho());
        const VectorFunction jv = jet(v, W.rho());
        const VectorFunction bu = apply_matrix_op(ju, pair.B);
        const VectorFunction bv = apply_matrix_op(jv, pair.B);

        const double b1 = sigma_form(bu, jv, form);
        const double b2 = sigma_form(ju, bv, form);
        const double norm_b = std::max({l2m_norm(bu, W, max_order), l2m_norm(jv, W, max_order),
                                        l2m_norm(ju, W, max_order), l2m_norm(bv, W, max_order),
                                        1e-300});
        worst_b = std::max(worst_b, std::abs(b1 - b2) / norm_b);
    }

    VerificationReport rep;
    rep.add(CheckRecord::residual("sigma.A_symmetry", worst_a, tol));
    rep.add(CheckRecord::residual("sigma.B_symmetry", worst_b, tol));
    return rep;
}

}  // namespace sobmat
