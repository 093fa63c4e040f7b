#pragma once

// Independent reference implementations used only by tests. None of these
// call into the library's numerics.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Composite Simpson rule on [a, b] with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

inline double gauss_pdf(double x, double mean, double var) {
    return std::exp(-(x - mean) * (x - mean) / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
}

inline double h2(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// P(sign error) for x ~ N(mu, var): 0.5 erfc(mu / sqrt(2 var)).
inline double sign_error(double mu, double var) { return 0.5 * std::erfc(mu / std::sqrt(2.0 * var)); }

// Bayes posterior error of the sign of x given equiprobable +-mu.
inline double posterior(double x, double mu, double var) {
    const double lp = gauss_pdf(x, mu, var), lm = gauss_pdf(x, -mu, var);
    return std::min(lp, lm) / (lp + lm);
}

// Threshold where 1 - h(posterior(t)) = target, inverted in closed form:
// posterior p* solves h(p*) = 1 - target on (0, 1/2], then
// t = var / (2 mu) * ln((1 - p*) / p*).
inline double threshold_closed_form(double target_info, double mu, double var) {
    if (target_info <= 0.0) return 0.0;
    double lo = 1e-300, hi = 0.5;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (h2(mid) < 1.0 - target_info ? lo : hi) = mid;
    }
    const double p = 0.5 * (lo + hi);
    return var / (2.0 * mu) * std::log((1.0 - p) / p);
}

struct SelectionOracle {
    double yield, post_error, per_event_info;
};

// Selection statistics by direct Simpson integration over |x| >= t.
inline SelectionOracle selection(double mu, double var, double t) {
    const double hi = mu + 14.0 * std::sqrt(var);
    const auto dens = [&](double x) { return 0.5 * (gauss_pdf(x, mu, var) + gauss_pdf(x, -mu, var)); };
    // symmetric: integrate x >= t and double
    const double y = 2.0 * simpson(dens, t, hi);
    const double err = 2.0 * simpson([&](double x) { return 0.5 * gauss_pdf(x, -mu, var); }, t, hi);
    const double info = 2.0 * simpson([&](double x) { return dens(x) * (1.0 - h2(posterior(x, mu, var))); }, t, hi);
    return {y, err / y, info / y};
}

// Toeplitz matrix-vector product over GF(2) with T(i, j) = d[i - j + n - 1].
inline std::vector<std::uint8_t> toeplitz_bruteforce(const std::vector<std::uint8_t>& in, std::size_t m,
                                                     const std::vector<std::uint8_t>& d) {
    const std::size_t n = in.size();
    std::vector<std::uint8_t> out(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        unsigned acc = 0;
        for (std::size_t j = 0; j < n; ++j)
            acc ^= d[i + n - 1 - j] & in[j];
        out[i] = static_cast<std::uint8_t>(acc);
    }
    return out;
}

// Ladder operators and Stokes matrices built from scratch for the
// |nx, ny> -> nx * (N + 1) + ny ordering.
struct StokesOracle {
    int N;
    Eigen::MatrixXcd ax, ay, s[4];

    explicit StokesOracle(int n_max) : N(n_max) {
        const int d = N + 1, D = d * d;
        ax = Eigen::MatrixXcd::Zero(D, D);
        ay = Eigen::MatrixXcd::Zero(D, D);
        for (int nx = 0; nx <= N; ++nx)
            for (int ny = 0; ny <= N; ++ny) {
                if (nx > 0) ax((nx - 1) * d + ny, nx * d + ny) = std::sqrt(double(nx));
                if (ny > 0) ay(nx * d + ny - 1, nx * d + ny) = std::sqrt(double(ny));
            }
        const Eigen::MatrixXcd axd = ax.adjoint(), ayd = ay.adjoint();
        const std::complex<double> i(0.0, 1.0);
        s[0] = axd * ax + ayd * ay;
        s[1] = axd * ax - ayd * ay;
        s[2] = axd * ay + ayd * ax;
        s[3] = i * (ayd * ax - axd * ay);
    }

    bool protected_state(int idx) const { return idx / (N + 1) + idx % (N + 1) <= N - 2; }

    // max |[S_k, S_l] - 2i eps S_m| over protected rows and columns
    double commutator_residual(int k, int l) const {
        const int m = 6 - k - l;
        const int eps = (k == 1 && l == 2) || (k == 2 && l == 3) || (k == 3 && l == 1) ? 1 : -1;
        const Eigen::MatrixXcd c = s[k] * s[l] - s[l] * s[k] - std::complex<double>(0.0, 2.0 * eps) * s[m];
        double worst = 0.0;
        for (int r = 0; r < c.rows(); ++r)
            for (int q = 0; q < c.cols(); ++q)
                if (protected_state(r) && protected_state(q))
                    worst = std::max(worst, std::abs(c(r, q)));
        return worst;
    }
};

} // namespace oracle
