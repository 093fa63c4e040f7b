#include <cmath>
#include <vector>

#include <omp.h>

#include "cvqkd/channel.hpp"
#include "cvqkd/kernels.hpp"
#include "cvqkd/rng.hpp"

namespace cvqkd::kernels {

namespace {

struct SelectionDraw {
    bool kept;
    bool error;
};

SelectionDraw selection_event(const SelectionParams& p, std::size_t i, std::uint64_t seed,
                              double sigma) {
    RngStream rng = RngStream::derive(seed, i);
    const bool sign = rng.bit();
    const double x = (sign ? p.mean : -p.mean) + sigma * rng.normal();
    const bool correct = x != 0.0 && ((x > 0.0) == sign);
    const bool kept = x != 0.0 && std::abs(x) >= p.threshold;
    return {kept, !correct};
}

void accumulate(Moments& m, double x, double y) noexcept {
    m.n += 1.0;
    m.sx += x;
    m.sy += y;
    m.sxx += x * x;
    m.syy += y * y;
    m.sxy += x * y;
}

void merge(Moments& into, const Moments& from) noexcept {
    into.n += from.n;
    into.sx += from.sx;
    into.sy += from.sy;
    into.sxx += from.sxx;
    into.syy += from.syy;
    into.sxy += from.sxy;
}

Moments dual_event_range(const DualDetectorParams& p, std::size_t begin, std::size_t end,
                         std::uint64_t seed) {
    Moments m;
    const channel::Signal sig{p.amplitude, 0.0};
    for (std::size_t i = begin; i < end; ++i) {
        RngStream rng = RngStream::derive(seed, i);
        const auto out = channel::dual_detector_event(sig, p.modulated, rng);
        accumulate(m, out.first, out.second);
    }
    return m;
}

} // namespace

double Moments::correlation() const noexcept {
    const double mx = sx / n;
    const double my = sy / n;
    const double cov = sxy / n - mx * my;
    const double vx = sxx / n - mx * mx;
    const double vy = syy / n - my * my;
    return cov / std::sqrt(vx * vy);
}

namespace serial {

SelectionCounts selection(const SelectionParams& p, std::size_t n, std::uint64_t seed) {
    const double sigma = std::sqrt(p.variance);
    SelectionCounts c;
    c.events = n;
    for (std::size_t i = 0; i < n; ++i) {
        const auto d = selection_event(p, i, seed, sigma);
        c.errors += d.error;
        c.kept += d.kept;
        c.kept_errors += d.kept && d.error;
    }
    return c;
}

Moments dual_detector(const DualDetectorParams& p, std::size_t n, std::uint64_t seed) {
    return dual_event_range(p, 0, n, seed);
}

} // namespace serial

namespace omp {

SelectionCounts selection(const SelectionParams& p, std::size_t n, std::uint64_t seed) {
    const double sigma = std::sqrt(p.variance);
    std::size_t errors = 0, kept = 0, kept_errors = 0;
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) reduction(+ : errors, kept, kept_errors)
    for (std::int64_t i = 0; i < count; ++i) {
        const auto d = selection_event(p, static_cast<std::size_t>(i), seed, sigma);
        errors += d.error;
        kept += d.kept;
        kept_errors += d.kept && d.error;
    }
    return {n, kept, kept_errors, errors};
}

Moments dual_detector(const DualDetectorParams& p, std::size_t n, std::uint64_t seed) {
    const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
    std::vector<Moments> partial(chunks);
    const auto count = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < count; ++c) {
        const std::size_t begin = static_cast<std::size_t>(c) * kReductionChunk;
        const std::size_t end = std::min(n, begin + kReductionChunk);
        partial[static_cast<std::size_t>(c)] = dual_event_range(p, begin, end, seed);
    }
    Moments total;
    for (const auto& m : partial)
        merge(total, m);
    return total;
}

} // namespace omp

SelectionCounts selection(const SelectionParams& p, std::size_t n, std::uint64_t seed, Exec exec) {
    return exec == Exec::serial ? serial::selection(p, n, seed) : omp::selection(p, n, seed);
}

Moments dual_detector(const DualDetectorParams& p, std::size_t n, std::uint64_t seed, Exec exec) {
    return exec == Exec::serial ? serial::dual_detector(p, n, seed) : omp::dual_detector(p, n, seed);
}

} // namespace cvqkd::kernels
