#include "bloch/chebyshev.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace bloch {

namespace {

double cheb_T(int k, double x) {
    if (k == 0) return 1.0;
    double t0 = 1.0, t1 = x;
    for (int j = 1; j < k; ++j) {
        double t2 = 2.0 * x * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    return t1;
}

}  // namespace

double chebyshev_eval(const std::vector<double>& c, double t) {
    // Clenshaw
    double b1 = 0.0, b2 = 0.0;
    for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) {
        double b0 = 2.0 * t * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return (c.empty() ? 0.0 : c[0]) + t * b1 - b2;
}

std::vector<double> chebyshev_derivative_coeffs(const std::vector<double>& c) {
    int n = static_cast<int>(c.size());
    std::vector<double> d(std::max(n, 1), 0.0);
    if (n < 2) return d;
    d[n - 1] = 0.0;
    if (n >= 2) d[n - 2] = 2.0 * (n - 1) * c[n - 1];
    for (int k = n - 3; k >= 0; --k) d[k] = d[k + 2] + 2.0 * (k + 1) * c[k + 1];
    d[0] *= 0.5;
    return d;
}

ChebNodes::ChebNodes(Kind kind, int n) : kind_(kind), n_(n) {
    if (n < 2) throw std::invalid_argument("ChebNodes: need at least two nodes");
    const double pi = std::numbers::pi;
    x_.resize(n);
    w_.resize(n);
    if (kind == Kind::Lobatto) {
        int N = n - 1;
        for (int j = 0; j < n; ++j) {
            x_[j] = -std::cos(pi * j / N);
            w_[j] = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == N) ? 0.5 : 1.0);
        }
        x_[0] = -1.0;
        x_[N] = 1.0;
        if (n % 2 == 1) x_[N / 2] = 0.0;
    } else {
        for (int j = 0; j < n; ++j) {
            double th = (2.0 * (n - 1 - j) + 1.0) * pi / (2.0 * n);
            x_[j] = std::cos(th);
            w_[j] = ((j % 2) ? -1.0 : 1.0) * std::sin(th);
        }
        if (n % 2 == 1) x_[n / 2] = 0.0;
    }

    D_.assign(n * n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double v = (w_[j] / w_[i]) / (x_[i] - x_[j]);
            D_[i * n + j] = v;
            s += v;
        }
        D_[i * n + i] = -s;
    }

    T_.assign(n * n, 0.0);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) T_[k * n + j] = cheb_T(k, x_[j]);

    // cumulative integration matrix, built column by column
    S_.assign(n * n, 0.0);
    std::vector<double> e(n, 0.0);
    for (int j = 0; j < n; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        auto c = coefficients(e);
        std::vector<double> ci(n + 1, 0.0);
        for (int k = 0; k < n; ++k) {
            if (k == 0) {
                ci[1] += c[0];
            } else if (k == 1) {
                ci[2] += c[1] / 4.0;
            } else {
                ci[k + 1] += c[k] / (2.0 * (k + 1));
                ci[k - 1] -= c[k] / (2.0 * (k - 1));
            }
        }
        double base = chebyshev_eval(ci, -1.0);
        for (int i = 0; i < n; ++i) S_[i * n + j] = chebyshev_eval(ci, x_[i]) - base;
    }
}

std::vector<double> ChebNodes::coefficients(const std::vector<double>& f) const {
    const int n = n_;
    std::vector<double> c(n, 0.0);
    if (kind_ == Kind::Lobatto) {
        int N = n - 1;
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) {
                double v = f[j] * T_[k * n + j];
                s += (j == 0 || j == N) ? 0.5 * v : v;
            }
            c[k] = s * 2.0 / N;
        }
        c[0] *= 0.5;
        c[N] *= 0.5;
    } else {
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += f[j] * T_[k * n + j];
            c[k] = s * 2.0 / n;
        }
        c[0] *= 0.5;
    }
    return c;
}

std::vector<double> ChebNodes::differentiate(const std::vector<double>& f) const {
    std::vector<double> r(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int j = 0; j < n_; ++j) s += D_[i * n_ + j] * f[j];
        r[i] = s;
    }
    return r;
}

std::vector<double> ChebNodes::cumulative(const std::vector<double>& f) const {
    std::vector<double> r(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int j = 0; j < n_; ++j) s += S_[i * n_ + j] * f[j];
        r[i] = s;
    }
    return r;
}

double ChebNodes::integrate(const std::vector<double>& f) const {
    auto c = coefficients(f);
    double s = 0.0;
    for (int k = 0; k < n_; k += 2) s += c[k] * 2.0 / (1.0 - double(k) * k);
    return s;
}

double ChebNodes::interpolate(const std::vector<double>& f, double t) const {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < n_; ++j) {
        double d = t - x_[j];
        if (d == 0.0) return f[j];
        double q = w_[j] / d;
        num += q * f[j];
        den += q;
    }
    return num / den;
}

double ChebNodes::interpolate_derivative(const std::vector<double>& f, double t) const {
    return chebyshev_eval(chebyshev_derivative_coeffs(coefficients(f)), t);
}

double ChebNodes::tail_ratio(const std::vector<double>& f, int tail) const {
    auto c = coefficients(f);
    double mx = 0.0, tl = 0.0;
    for (int k = 0; k < n_; ++k) mx = std::max(mx, std::abs(c[k]));
    for (int k = std::max(0, n_ - tail); k < n_; ++k) tl = std::max(tl, std::abs(c[k]));
    return mx == 0.0 ? 0.0 : tl / mx;
}

namespace {

const ChebNodes& cached(ChebNodes::Kind kind, int n) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<ChebNodes>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[{static_cast<int>(kind), n}];
    if (!slot) slot = std::make_unique<ChebNodes>(kind, n);
    return *slot;
}

}  // namespace

const ChebNodes& lobatto(int n) { return cached(ChebNodes::Kind::Lobatto, n); }
const ChebNodes& gauss(int n) { return cached(ChebNodes::Kind::Gauss, n); }

}  // namespace bloch
