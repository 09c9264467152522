#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

namespace sobmat {

/// Real polynomial stored as coefficients in ascending degree order. The
/// trailing (leading-degree) coefficient is nonzero unless the polynomial is
/// zero, in which case the coefficient vector is empty.
class Polynomial {
public:
    Polynomial() = default;

    explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

    static Polynomial constant(double c) { return Polynomial(std::vector<double>{c}); }

    static Polynomial monomial(int degree, double coeff = 1.0) {
        if (degree < 0) throw std::invalid_argument("monomial: degree must be >= 0");
        std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
        c.back() = coeff;
        return Polynomial(std::move(c));
    }

    const std::vector<double>& coeffs() const noexcept { return coeffs_; }

    bool is_zero() const noexcept { return coeffs_.empty(); }

    /// Degree bound; 0 for the zero polynomial.
    int degree() const noexcept {
        return coeffs_.empty() ? 0 : static_cast<int>(coeffs_.size()) - 1;
    }

    double leading() const noexcept { return coeffs_.empty() ? 0.0 : coeffs_.back(); }

    /// Horner evaluation.
    double operator()(double z) const noexcept {
        double acc = 0.0;
        for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * z + coeffs_[i];
        return acc;
    }

    /// Exact coefficient shift-and-scale derivative.
    Polynomial derivative() const {
        if (coeffs_.size() <= 1) return Polynomial{};
        std::vector<double> d(coeffs_.size() - 1);
        for (std::size_t k = 1; k < coeffs_.size(); ++k)
            d[k - 1] = coeffs_[k] * static_cast<double>(k);
        return Polynomial(std::move(d));
    }

    /// z * p, an exact coefficient shift.
    Polynomial times_z() const {
        if (is_zero()) return Polynomial{};
        std::vector<double> c(coeffs_.size() + 1, 0.0);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) c[k + 1] = coeffs_[k];
        return Polynomial(std::move(c));
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
        for (std::size_t k = 0; k < a.coeffs_.size(); ++k) c[k] += a.coeffs_[k];
        for (std::size_t k = 0; k < b.coeffs_.size(); ++k) c[k] += b.coeffs_[k];
        return Polynomial(std::move(c));
    }

    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
        for (std::size_t k = 0; k < a.coeffs_.size(); ++k) c[k] += a.coeffs_[k];
        for (std::size_t k = 0; k < b.coeffs_.size(); ++k) c[k] -= b.coeffs_[k];
        return Polynomial(std::move(c));
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return Polynomial{};
        std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
                c[i + j] += a.coeffs_[i] * b.coeffs_[j];
        return Polynomial(std::move(c));
    }

    friend Polynomial operator*(double s, const Polynomial& p) {
        std::vector<double> c = p.coeffs_;
        for (double& x : c) x *= s;
        return Polynomial(std::move(c));
    }

private:
    std::vector<double> coeffs_;

    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
    }
};

/// Antiderivative with zero constant term. Kept next to Polynomial because
/// tests use it as the independent integration oracle.
inline Polynomial antiderivative(const Polynomial& p) {
    if (p.is_zero()) return Polynomial{};
    std::vector<double> c(p.coeffs().size() + 1, 0.0);
    for (std::size_t k = 0; k < p.coeffs().size(); ++k)
        c[k + 1] = p.coeffs()[k] / static_cast<double>(k + 1);
    return Polynomial(std::move(c));
}

/// Polynomial of the given degree bound with coefficients uniform in [-1,1].
inline Polynomial random_polynomial(int max_degree, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> c(static_cast<std::size_t>(max_degree) + 1);
    for (double& x : c) x = u(rng);
    return Polynomial(std::move(c));
}

}  // namespace sobmat
