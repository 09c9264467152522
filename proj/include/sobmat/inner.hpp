#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "sobmat/functions.hpp"
#include "sobmat/quadrature.hpp"
#include "sobmat/weight.hpp"

namespace sobmat {

/// L2(M) pairing  ∫ u(z) M0(z) v(z)^T density(z) dz. Exact quadrature when all
/// degree bounds are known, adaptive otherwise.
inline IntegralResult l2m_inner_info(const VectorFunction& u, const VectorFunction& v,
                                     const MatrixWeight& W,
                                     int max_order = kDefaultMaxQuadOrder) {
    if (static_cast<int>(u.size()) != W.dim() || static_cast<int>(v.size()) != W.dim())
        throw std::invalid_argument("l2m_inner: component count must equal rho+1");

    std::optional<int> integrand_deg;
    if (auto du = u.degree(), dv = v.degree(); du && dv) integrand_deg = *du + *dv;

    const auto plan = auto_order(W.total_degree(), integrand_deg, max_order);
    auto f = [&](double z) {
        return (u.eval(z) * W.eval(z) * v.eval(z).transpose())(0) * W.density_value(z);
    };
    return integrate_auto(f, W.a(), W.b(), plan, max_order);
}

inline double l2m_inner(const VectorFunction& u, const VectorFunction& v, const MatrixWeight& W,
                        int max_order = kDefaultMaxQuadOrder) {
    return l2m_inner_info(u, v, W, max_order).value;
}

/// ||u||_{L2(M)}; clamps the tiny negative values quadrature roundoff can
/// produce for near-null arguments.
inline double l2m_norm(const VectorFunction& u, const MatrixWeight& W,
                       int max_order = kDefaultMaxQuadOrder) {
    return std::sqrt(std::max(0.0, l2m_inner(u, u, W, max_order)));
}

/// Sobolev pairing of scalar polynomials through their jets.
inline IntegralResult sobolev_inner_info(const Polynomial& p, const Polynomial& q,
                                         const MatrixWeight& W,
                                         int max_order = kDefaultMaxQuadOrder) {
    return l2m_inner_info(jet(p, W.rho()), jet(q, W.rho()), W, max_order);
}

inline double sobolev_inner(const Polynomial& p, const Polynomial& q, const MatrixWeight& W,
                            int max_order = kDefaultMaxQuadOrder) {
    return sobolev_inner_info(p, q, W, max_order).value;
}

}  // namespace sobmat
