#include "cvqkd/info.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cvqkd/error.hpp"
#include "cvqkd/kernels.hpp"

namespace cvqkd::info {

namespace {

constexpr double kThresholdTol = 1e-9;

void check_sigma2(double sigma2) {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
        throw DomainError("outcome variance must be > 0");
}

double mixture_density(double x, double mu, double sigma2) {
    const double norm = 1.0 / std::sqrt(2.0 * M_PI * sigma2);
    const double a = (x - mu) * (x - mu) / (2.0 * sigma2);
    const double b = (x + mu) * (x + mu) / (2.0 * sigma2);
    return 0.5 * norm * (std::exp(-a) + std::exp(-b));
}

double info_at(double x, double mu, double sigma2) {
    return binary_mutual_info(posterior_error(x, mu, sigma2));
}

} // namespace

void InfoParams::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw DomainError("alpha must be > 0");
    if (!(eta > 0.0 && eta <= 1.0))
        throw DomainError("eta must lie in (0, 1]");
    check_sigma2(sigma2);
    check_sigma2(eve_variance());
}

double InfoParams::bob_amplitude() const {
    return alpha * std::sqrt(eta);
}

double InfoParams::eve_amplitude() const {
    return alpha * std::sqrt(1.0 - eta);
}

double normal_cdf(double z) noexcept {
    return 0.5 * std::erfc(-z / M_SQRT2);
}

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw DomainError("probability outside [0, 1]");
    double h = 0.0;
    if (p > 0.0)
        h -= p * std::log2(p);
    if (p < 1.0)
        h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

double binary_mutual_info(double p_e) {
    return 1.0 - binary_entropy(p_e);
}

double mean_error(double alpha_eff, double sigma2) {
    check_sigma2(sigma2);
    if (!(alpha_eff >= 0.0))
        throw DomainError("effective amplitude must be >= 0");
    return normal_cdf(-alpha_eff / std::sqrt(sigma2));
}

double posterior_error(double x, double alpha_eff, double sigma2) {
    check_sigma2(sigma2);
    return 1.0 / (1.0 + std::exp(2.0 * alpha_eff * std::abs(x) / sigma2));
}

double eve_info(const InfoParams& params) {
    params.validate();
    return binary_mutual_info(mean_error(params.eve_amplitude(), params.eve_variance()));
}

double solve_threshold(const InfoParams& params) {
    const double i_ae = eve_info(params);
    if (i_ae >= 1.0)
        throw NoSolutionError("Eve's information reaches 1 bit; no threshold satisfies I_AB > I_AE");
    const double mu = params.bob_amplitude();
    const auto satisfied = [&](double t) { return info_at(t, mu, params.sigma2) > i_ae; };

    // x = 0 carries no information, so this only triggers at I_AE = 0, where
    // every x > 0 qualifies and the infimum is 0.
    if (i_ae <= 0.0 || satisfied(0.0))
        return 0.0;

    double lo = 0.0;
    double hi = std::sqrt(params.sigma2);
    while (!satisfied(hi)) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi))
            throw NoSolutionError("threshold search diverged");
    }
    while (hi - lo > kThresholdTol) {
        const double mid = 0.5 * (lo + hi);
        (satisfied(mid) ? hi : lo) = mid;
    }
    return hi;
}

SelectionResult selection_stats(const InfoParams& params, double threshold) {
    params.validate();
    if (!(threshold >= 0.0))
        throw DomainError("threshold must be >= 0");
    const double mu = params.bob_amplitude();
    const double sigma = std::sqrt(params.sigma2);

    SelectionResult r;
    r.threshold = threshold;
    const double wrong_tail = normal_cdf((-threshold - mu) / sigma);
    r.yield = normal_cdf((mu - threshold) / sigma) + wrong_tail;
    if (!(r.yield > 0.0))
        throw DegenerateSelectionError("threshold discards every event");
    r.post_error = wrong_tail / r.yield;
    r.eve_info = eve_info(params);

    // The kept set is symmetric in x, so integrate over [t, inf) and double.
    using boost::math::quadrature::gauss_kronrod;
    const auto integrand = [&](double x) {
        return mixture_density(x, mu, params.sigma2) * info_at(x, mu, params.sigma2);
    };
    const double upper = std::numeric_limits<double>::infinity();
    const double kept_info = 2.0 * gauss_kronrod<double, 61>::integrate(integrand, threshold, upper, 20, 1e-10);

    r.advantage_per_event = kept_info / r.yield - r.eve_info;
    r.advantage_bulk = binary_mutual_info(r.post_error) - r.eve_info;
    return r;
}

double threshold_for_yield(const InfoParams& params, double target_yield) {
    params.validate();
    if (!(target_yield > 0.0 && target_yield <= 1.0))
        throw DomainError("target yield must lie in (0, 1]");
    const double mu = params.bob_amplitude();
    const double sigma = std::sqrt(params.sigma2);
    const auto yield = [&](double t) {
        return normal_cdf((mu - t) / sigma) + normal_cdf((-t - mu) / sigma);
    };
    if (target_yield >= 1.0)
        return 0.0;
    double lo = 0.0;
    double hi = sigma;
    while (yield(hi) > target_yield)
        hi *= 2.0;
    while (hi - lo > kThresholdTol) {
        const double mid = 0.5 * (lo + hi);
        (yield(mid) > target_yield ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

SelectionEstimate simulate_selection(const InfoParams& params, double threshold, std::size_t n,
                                     std::uint64_t seed, Exec exec) {
    params.validate();
    if (n == 0)
        throw InsufficientDataError("Monte Carlo selection needs at least one event");
    const kernels::SelectionCounts c =
        kernels::selection({params.bob_amplitude(), params.sigma2, threshold}, n, seed, exec);
    const auto binomial_se = [](double p, double count) {
        return count > 0 ? std::sqrt(p * (1.0 - p) / count) : 0.0;
    };
    SelectionEstimate e{};
    const double total = static_cast<double>(n);
    e.yield = c.kept / total;
    e.yield_stderr = binomial_se(e.yield, total);
    e.post_error = c.kept ? static_cast<double>(c.kept_errors) / c.kept : 0.0;
    e.post_error_stderr = binomial_se(e.post_error, static_cast<double>(c.kept));
    e.pre_error = c.errors / total;
    e.pre_error_stderr = binomial_se(e.pre_error, total);
    return e;
}

} // namespace cvqkd::info
