#pragma once

#include <vector>

namespace bloch {

// Spectral tools on a set of Chebyshev nodes in [-1, 1], stored ascending.
// Lobatto nodes include the endpoints; Gauss (first-kind) nodes do not.
class ChebNodes {
public:
    enum class Kind { Lobatto, Gauss };

    ChebNodes(Kind kind, int n);

    Kind kind() const { return kind_; }
    int size() const { return n_; }
    const std::vector<double>& nodes() const { return x_; }

    // derivative values at the nodes
    std::vector<double> differentiate(const std::vector<double>& f) const;
    // integral from -1 to each node
    std::vector<double> cumulative(const std::vector<double>& f) const;
    // integral over [-1, 1]
    double integrate(const std::vector<double>& f) const;
    // value of the interpolant at t (any t in [-1, 1])
    double interpolate(const std::vector<double>& f, double t) const;
    // derivative of the interpolant at t
    double interpolate_derivative(const std::vector<double>& f, double t) const;
    // Chebyshev expansion coefficients of the interpolant
    std::vector<double> coefficients(const std::vector<double>& f) const;

    // max |c_k| over the last `tail` coefficients divided by max |c_k|
    double tail_ratio(const std::vector<double>& f, int tail = 3) const;

    const std::vector<double>& diff_matrix() const { return D_; }

private:
    Kind kind_;
    int n_;
    std::vector<double> x_, w_;     // nodes, barycentric weights
    std::vector<double> D_, S_, T_;  // differentiation, cumulative, T_k(x_j)
};

double chebyshev_eval(const std::vector<double>& c, double t);
std::vector<double> chebyshev_derivative_coeffs(const std::vector<double>& c);

// Shared, lazily built node sets.
const ChebNodes& lobatto(int n);
const ChebNodes& gauss(int n);

}  // namespace bloch
