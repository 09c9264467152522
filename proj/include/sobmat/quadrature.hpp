#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace sobmat {

/// Summation with a fixed pairwise reduction tree. The result depends only on
/// the order of the input values, so integrals are bit-stable no matter how
/// the node evaluations were scheduled.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct QuadratureRule {
    std::vector<double> nodes;    // strictly increasing, inside (a,b)
    std::vector<double> weights;  // all positive
    int order = 0;                // node count
};

/// Gauss–Legendre rule with n nodes mapped to [a,b]. Nodes are found by Newton
/// iteration on P_n to 1e-15; the rule integrates polynomials of degree
/// <= 2n-1 exactly.
inline QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: node count must be >= 1");
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
        throw std::invalid_argument("gauss_legendre: interval must be finite with a < b");

    QuadratureRule rule;
    rule.order = n;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const int m = (n + 1) / 2;
    const double pi = 3.14159265358979323846;

    for (int i = 0; i < m; ++i) {
        // Tricomi initial guess for the i-th largest root.
        double t = std::cos(pi * (i + 0.75) / (n + 0.5));
        if (n % 2 == 1 && i == m - 1) t = 0.0;  // the middle root is exactly 0
        double dpn = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dpn = (n == 0) ? 0.0 : n * (t * p1 - p0) / (t * t - 1.0);
            if (t == 0.0 && n % 2 == 1) {
                // P_n(0) = 0 for odd n; derivative formula above is fine but the
                // Newton step is exactly zero.
                break;
            }
            const double dt = p1 / dpn;
            t -= dt;
            if (std::abs(dt) < 1e-15) {
                // one clean-up pass so the residual itself is at 1e-15 level
                double q0 = 1.0, q1 = t;
                for (int k = 2; k <= n; ++k) {
                    const double q2 = ((2.0 * k - 1.0) * t * q1 - (k - 1.0) * q0) / k;
                    q0 = q1;
                    q1 = q2;
                }
                dpn = n * (t * q1 - q0) / (t * t - 1.0);
                t -= q1 / dpn;
                break;
            }
        }
        // Recompute derivative at the converged node for the weight.
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dpn = (t * t == 1.0) ? dpn : n * (t * p1 - p0) / (t * t - 1.0);
        const double w = 2.0 / ((1.0 - t * t) * dpn * dpn);

        // t is the i-th largest root (t >= 0 here); mirror for ascending order.
        rule.nodes[i] = mid - half * t;
        rule.nodes[n - 1 - i] = mid + half * t;
        rule.weights[i] = w * half;
        rule.weights[n - 1 - i] = w * half;
    }
    return rule;
}

/// Σ w_i f(x_i) with pairwise summation.
inline double integrate(const std::function<double(double)>& f, const QuadratureRule& rule) {
    std::vector<double> terms(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        terms[i] = rule.weights[i] * f(rule.nodes[i]);
    return pairwise_sum(terms);
}

/// How an integral should be computed: a single exact rule when the integrand
/// is polynomial, otherwise an adaptive doubling plan starting at `order`.
struct QuadPlan {
    int order = 16;
    bool exact = false;
};

inline constexpr int kDefaultMaxQuadOrder = 512;
inline constexpr int kAdaptiveStartOrder = 16;
inline constexpr double kAdaptiveRelTol = 1e-12;

/// Selects the quadrature order. With polynomial degree bounds for both the
/// weight (including the measure density) and the integrand, returns the
/// smallest n with 2n-1 >= total degree; otherwise an adaptive plan.
inline QuadPlan auto_order(std::optional<int> weight_degree,
                           std::optional<int> integrand_degree,
                           int max_order = kDefaultMaxQuadOrder) {
    (void)max_order;
    if (weight_degree && integrand_degree) {
        const int total = *weight_degree + *integrand_degree;
        return QuadPlan{total / 2 + 1, true};
    }
    return QuadPlan{kAdaptiveStartOrder, false};
}

struct IntegralResult {
    double value = 0.0;
    int order = 0;        // node count actually used
    bool converged = true;
};

/// Integrates f over [a,b] following the plan. Non-polynomial integrands are
/// refined by doubling the node count until two successive results agree to
/// relative 1e-12 or max_order is reached; non-convergence is flagged, not
/// thrown.
inline IntegralResult integrate_auto(const std::function<double(double)>& f, double a, double b,
                                     QuadPlan plan, int max_order = kDefaultMaxQuadOrder) {
    if (plan.exact) {
        const int n = std::max(1, plan.order);
        return IntegralResult{integrate(f, gauss_legendre(n, a, b)), n, true};
    }
    int n = std::max(1, plan.order);
    double prev = integrate(f, gauss_legendre(n, a, b));
    while (2 * n <= max_order) {
        n *= 2;
        const double cur = integrate(f, gauss_legendre(n, a, b));
        if (std::abs(cur - prev) <= kAdaptiveRelTol * (1.0 + std::abs(cur)))
            return IntegralResult{cur, n, true};
        prev = cur;
    }
    return IntegralResult{prev, n, false};
}

}  // namespace sobmat
