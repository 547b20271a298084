#include "bahadur/special.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace bahadur::special {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                 45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
              133.14166789178437745) * r + 3.387132872796366608);
        const double den =
            (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                 21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
              42.313330701600911252) * r + 1.0);
        return q * num / den;
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
                 1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
              4.6303378461565452959) * r + 1.42343711074968357734);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
                 0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
              2.05319162663775882187) * r + 1.0);
        val = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
                 0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
              5.4637849111641143699) * r + 6.6579046435011037772);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
                 7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
              0.59983220655588793769) * r + 1.0);
        val = num / den;
    }
    return q < 0.0 ? -val : val;
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

namespace {

constexpr int kMaxSplits = 4000;

// Continued fraction for I_x(a,b), modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 1000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x, double y) {
    if (x <= 0.0) return 0.0;
    if (y <= 0.0) return 1.0;
    const double log_front = a * std::log(x) + b * std::log(y) - log_beta(a, b);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, y) / b;
}

double student_t_log_norm(double nu) {
    return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * kPi);
}

double student_t_pdf(double t, double nu) {
    return std::exp(student_t_log_norm(nu) - 0.5 * (nu + 1.0) * std::log1p(t * t / nu));
}

namespace {

// P(T > t) for t >= 0.
double student_t_upper_tail(double t, double nu) {
    const double t2 = t * t;
    const double x = nu / (nu + t2);
    const double y = t2 / (nu + t2);
    return 0.5 * incomplete_beta(0.5 * nu, 0.5, x, y);
}

}  // namespace

double student_t_cdf(double t, double nu) {
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double tail = student_t_upper_tail(std::abs(t), nu);
    return t < 0.0 ? tail : 1.0 - tail;
}

double student_t_quantile(double u, double nu) {
    if (!(u > 0.0 && u < 1.0)) {
        if (u == 0.0) return -std::numeric_limits<double>::infinity();
        if (u == 1.0) return std::numeric_limits<double>::infinity();
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (u == 0.5) return 0.0;
    const double q = std::min(u, 1.0 - u);
    const double log_q = std::log(q);

    // Two starting points: Cornish-Fisher around the normal, and the
    // power-law tail asymptote. Keep whichever lands closer in log tail.
    const double z = -normal_quantile(q);
    const double cf = z + (z * z * z + z) / (4.0 * nu) +
                      (5.0 * std::pow(z, 5) + 16.0 * z * z * z + 3.0 * z) / (96.0 * nu * nu);
    const double tail_coef = std::exp(student_t_log_norm(nu) + 0.5 * (nu - 1.0) * std::log(nu));
    const double asym = std::pow(tail_coef / q, 1.0 / nu);
    auto residual = [&](double s) { return std::log(student_t_upper_tail(std::exp(s), nu)) - log_q; };

    double s = std::log(std::max(cf, 1e-300));
    const double s_alt = std::log(asym);
    if (!(cf > 0.0) || std::abs(residual(s_alt)) < std::abs(residual(s))) s = s_alt;

    // Bracketed Newton in s = log t; the log tail is decreasing in s.
    double lo = -700.0, hi = 700.0;
    for (int it = 0; it < 200; ++it) {
        const double t = std::exp(s);
        const double tail = student_t_upper_tail(t, nu);
        const double r = std::log(tail) - log_q;
        if (r > 0.0) lo = std::max(lo, s); else hi = std::min(hi, s);
        const double slope = -t * student_t_pdf(t, nu) / tail;
        double next = s - r / slope;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (std::abs(next - s) <= 1e-15 * std::max(1.0, std::abs(s)) || hi - lo < 1e-15) {
            s = next;
            break;
        }
        s = next;
    }
    const double t = std::exp(s);
    return u < 0.5 ? -t : t;
}

GaussRule gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        const double beta = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = beta;
        jacobi(k - 1, k) = beta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    GaussRule rule;
    rule.nodes = solver.eigenvalues();
    rule.weights = 2.0 * solver.eigenvectors().row(0).transpose().array().square();
    return rule;
}

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

Integral kronrod15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1) gauss += kWg[j / 2] * sum;
    }
    return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

Integral integrate(const std::function<double(double)>& f, double a, double b, double rel_tol, double abs_tol,
                   int max_depth) {
    if (a == b) return {};
    // Global adaptive: always bisect the interval with the largest error.
    struct Piece {
        double a, b;
        Integral q;
        int depth;
        bool operator<(const Piece& o) const { return q.error < o.q.error; }
    };
    std::priority_queue<Piece> heap;
    Integral total = kronrod15(f, a, b);
    heap.push({a, b, total, 0});
    for (int splits = 0; splits < kMaxSplits && !heap.empty(); ++splits) {
        if (total.error <= std::max(abs_tol, rel_tol * std::abs(total.value))) break;
        const Piece p = heap.top();
        if (p.depth >= max_depth) break;
        heap.pop();
        const double mid = 0.5 * (p.a + p.b);
        const Integral l = kronrod15(f, p.a, mid);
        const Integral r = kronrod15(f, mid, p.b);
        total.value += l.value + r.value - p.q.value;
        total.error += l.error + r.error - p.q.error;
        heap.push({p.a, mid, l, p.depth + 1});
        heap.push({mid, p.b, r, p.depth + 1});
    }
    // Re-sum to shed the drift of the running update.
    Integral sum;
    for (; !heap.empty(); heap.pop()) {
        sum.value += heap.top().q.value;
        sum.error += heap.top().q.error;
    }
    return sum;
}

}  // namespace bahadur::special
