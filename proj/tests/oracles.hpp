#pragma once

// Independent reference implementations used as test oracles. They follow the
// defining formulas directly and share no code with the library.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "depthmon/binning.hpp"

namespace oracle {

inline double lp_norm(const std::vector<double>& u, const std::vector<double>& v, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            m = std::max(m, std::abs(u[k] - v[k]));
        }
        return m;
    }
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        s += std::pow(std::abs(u[k] - v[k]), p);
    }
    return std::pow(s, 1.0 / p);
}

/// 1 / (1 + mean_i (a + b ||z - x_i||_p)) by a plain loop.
inline double depth(const std::vector<double>& z, const std::vector<std::vector<double>>& sample, double p, double a,
                    double b) {
    double total = 0.0;
    for (const auto& x : sample) {
        total += a + b * lp_norm(z, x, p);
    }
    return 1.0 / (1.0 + total / static_cast<double>(sample.size()));
}

/// rank_i = #{j : d_j <= d_i}, exact comparisons.
inline std::vector<std::size_t> weak_ranks(const std::vector<double>& d) {
    std::vector<std::size_t> r(d.size(), 0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (double dj : d) {
            r[i] += dj <= d[i] ? 1 : 0;
        }
    }
    return r;
}

inline double gauss(double u, double h) {
    return std::exp(-0.5 * (u / h) * (u / h)) / (h * std::sqrt(2.0 * std::numbers::pi));
}

/// Intercept of the weighted least-squares fit of K_hy(y_j - y) on
/// (1, x_i - x, ..., (x_i - x)^r), one row per nonempty cell with weight
/// count_ij * K_hx(x_i - x), solved by column-pivoting QR.
inline double local_poly_intercept(const depthmon::binning::BinnedSample& b, double x, double y, int degree,
                                   double hx, double hy) {
    std::vector<double> rows_x;
    std::vector<double> rows_w;
    std::vector<double> rows_t;
    for (std::size_t i = 0; i < b.bins(); ++i) {
        for (std::size_t j = 0; j < b.bins(); ++j) {
            const auto c = b.count(i, j);
            if (c == 0) {
                continue;
            }
            rows_x.push_back(b.midpoints_x[i] - x);
            rows_w.push_back(static_cast<double>(c) * gauss(b.midpoints_x[i] - x, hx));
            rows_t.push_back(gauss(b.midpoints_y[j] - y, hy));
        }
    }
    const auto n = static_cast<Eigen::Index>(rows_x.size());
    Eigen::MatrixXd design(n, degree + 1);
    Eigen::VectorXd target(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sw = std::sqrt(rows_w[static_cast<std::size_t>(i)]);
        for (int k = 0; k <= degree; ++k) {
            design(i, k) = sw * std::pow(rows_x[static_cast<std::size_t>(i)], k);
        }
        target(i) = sw * rows_t[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd theta = design.colPivHouseholderQr().solve(target);
    return theta(0);
}

/// Degree-0 closed form: sum c_ij w_i K_ij / sum c_ij w_i.
inline double kernel_average(const depthmon::binning::BinnedSample& b, double x, double y, double hx, double hy) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < b.bins(); ++i) {
        for (std::size_t j = 0; j < b.bins(); ++j) {
            const double w = static_cast<double>(b.count(i, j)) * gauss(b.midpoints_x[i] - x, hx);
            num += w * gauss(b.midpoints_y[j] - y, hy);
            den += w;
        }
    }
    return num / den;
}

/// Random binned sample on bins midpoints 0.5, 1.5, ... with sparse counts.
inline depthmon::binning::BinnedSample random_binned(std::mt19937_64& rng, std::size_t bins) {
    depthmon::binning::BinnedSample b;
    for (std::size_t i = 0; i < bins; ++i) {
        b.midpoints_x.push_back(0.5 + static_cast<double>(i));
    }
    b.midpoints_y = b.midpoints_x;
    b.joint_counts.assign(bins * bins, 0);
    std::uniform_int_distribution<int> count(0, 6);
    std::bernoulli_distribution occupied(0.35);
    for (auto& c : b.joint_counts) {
        c = occupied(rng) ? static_cast<std::size_t>(count(rng)) : 0;
    }
    // Guarantee at least three occupied x positions so every degree is identifiable.
    for (std::size_t i = 0; i < 3; ++i) {
        b.joint_counts[(i * (bins / 3)) * bins + i] += 1;
    }
    b.marginal_x.assign(bins, 0);
    b.marginal_y.assign(bins, 0);
    for (std::size_t i = 0; i < bins; ++i) {
        for (std::size_t j = 0; j < bins; ++j) {
            b.marginal_x[i] += b.count(i, j);
            b.marginal_y[j] += b.count(i, j);
            b.total_interior += b.count(i, j);
        }
    }
    return b;
}

/// Hellinger distance between two grid densities, computed from the
/// normalized probability vectors.
inline double hellinger(const std::vector<double>& f, const std::vector<double>& g) {
    double sf = 0.0;
    double sg = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        sf += f[i];
        sg += g[i];
    }
    double bc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        bc += std::sqrt((f[i] / sf) * (g[i] / sg));
    }
    return std::sqrt(std::max(0.0, 1.0 - bc));
}

/// Largest CDF gap of the normalized probability vectors.
inline double kolmogorov(const std::vector<double>& f, const std::vector<double>& g) {
    double sf = 0.0;
    double sg = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        sf += f[i];
        sg += g[i];
    }
    double cf = 0.0;
    double cg = 0.0;
    double gap = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        cf += f[i] / sf;
        cg += g[i] / sg;
        gap = std::max(gap, std::abs(cf - cg));
    }
    return gap;
}

}  // namespace oracle
