#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sobmat/expr.hpp"
#include "sobmat/polynomial.hpp"

namespace sobmat {

/// A real function of z together with an optional polynomial degree bound.
/// The bound drives exact quadrature order selection; functions without one
/// are integrated adaptively.
struct ScalarFunction {
    std::function<double(double)> fn = [](double) { return 0.0; };
    std::optional<int> degree = 0;

    ScalarFunction() = default;

    ScalarFunction(double c) : fn([c](double) { return c; }), degree(0) {}

    ScalarFunction(const Polynomial& p)
        : fn([p](double z) { return p(z); }), degree(p.degree()) {}

    ScalarFunction(std::function<double(double)> f, std::optional<int> deg = std::nullopt)
        : fn(std::move(f)), degree(deg) {}

    static ScalarFunction from_expr(ExprPtr e) {
        auto deg = expr_poly_degree(e);
        return ScalarFunction([e = std::move(e)](double z) { return eval_expr(e, z); }, deg);
    }

    double operator()(double z) const { return fn(z); }
};

/// Row vector of scalar functions; the carrier for jets (f, f', ..., f^(rho)).
class VectorFunction {
public:
    VectorFunction() = default;
    explicit VectorFunction(std::vector<ScalarFunction> comps) : comps_(std::move(comps)) {}

    std::size_t size() const noexcept { return comps_.size(); }
    const ScalarFunction& operator[](std::size_t i) const { return comps_[i]; }
    ScalarFunction& operator[](std::size_t i) { return comps_[i]; }

    Eigen::RowVectorXd eval(double z) const {
        Eigen::RowVectorXd v(static_cast<Eigen::Index>(comps_.size()));
        for (std::size_t i = 0; i < comps_.size(); ++i)
            v(static_cast<Eigen::Index>(i)) = comps_[i](z);
        return v;
    }

    /// Max of the component degree bounds; nullopt if any component is not
    /// known to be polynomial.
    std::optional<int> degree() const {
        int d = 0;
        for (const auto& c : comps_) {
            if (!c.degree) return std::nullopt;
            d = std::max(d, *c.degree);
        }
        return d;
    }

private:
    std::vector<ScalarFunction> comps_;
};

/// Square matrix of scalar functions; houses A(z), B(z), B-hat(z), C(z).
class MatrixFunction {
public:
    MatrixFunction() = default;
    explicit MatrixFunction(int dim) : dim_(dim), entries_(static_cast<std::size_t>(dim) * dim) {
        if (dim < 1) throw std::invalid_argument("MatrixFunction: dimension must be >= 1");
    }

    int dim() const noexcept { return dim_; }

    const ScalarFunction& entry(int i, int j) const { return entries_[index(i, j)]; }
    ScalarFunction& entry(int i, int j) { return entries_[index(i, j)]; }

    Eigen::MatrixXd eval(double z) const {
        Eigen::MatrixXd M(dim_, dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) M(i, j) = entries_[index(i, j)](z);
        return M;
    }

    std::optional<int> degree() const {
        int d = 0;
        for (const auto& e : entries_) {
            if (!e.degree) return std::nullopt;
            d = std::max(d, *e.degree);
        }
        return d;
    }

private:
    int dim_ = 0;
    std::vector<ScalarFunction> entries_;

    std::size_t index(int i, int j) const {
        if (i < 0 || j < 0 || i >= dim_ || j >= dim_)
            throw std::out_of_range("MatrixFunction: entry index out of range");
        return static_cast<std::size_t>(i) * dim_ + j;
    }
};

/// The jet (p, p', ..., p^(rho)) with derivatives computed exactly on
/// coefficients.
inline VectorFunction jet(const Polynomial& p, int rho) {
    if (rho < 0) throw std::invalid_argument("jet: rho must be >= 0");
    std::vector<ScalarFunction> comps;
    comps.reserve(static_cast<std::size_t>(rho) + 1);
    Polynomial d = p;
    for (int r = 0; r <= rho; ++r) {
        comps.emplace_back(d);
        d = d.derivative();
    }
    return VectorFunction(std::move(comps));
}

}  // namespace sobmat
