#pragma once

#include <Eigen/Core>

#include <functional>

namespace bahadur::special {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_cdf(double x);
double normal_pdf(double x);
// Wichura's AS241 (PPND16); relative accuracy about 1e-16.
double normal_quantile(double p);

// Regularized incomplete beta I_x(a, b). `y` must equal 1 - x; passing it
// separately avoids cancellation when x is close to 1.
double incomplete_beta(double a, double b, double x, double y);
double log_beta(double a, double b);

// Standard Student t with nu degrees of freedom (unit scale).
double student_t_cdf(double t, double nu);
double student_t_pdf(double t, double nu);
double student_t_quantile(double u, double nu);
// log of Gamma((nu+1)/2) / (sqrt(nu pi) Gamma(nu/2))
double student_t_log_norm(double nu);

struct GaussRule {
    Eigen::VectorXd nodes;    // on [-1, 1]
    Eigen::VectorXd weights;  // sum to 2
};

/// Gauss-Legendre rule with `order` nodes, from the eigen-decomposition of
/// the Jacobi matrix (Golub-Welsch).
GaussRule gauss_legendre(int order);

struct Integral {
    double value = 0.0;
    double error = 0.0;
};

/// Global adaptive Gauss-Kronrod (7/15) on a finite interval. Stops when the
/// estimated error falls below max(abs_tol, rel_tol * |value|) or the
/// subdivision budget or depth is exhausted.
Integral integrate(const std::function<double(double)>& f, double a, double b,
                   double rel_tol = 1e-10, double abs_tol = 0.0, int max_depth = 50);

}  // namespace bahadur::special
