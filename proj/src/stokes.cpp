#include "cvqkd/stokes.hpp"

#include <cmath>
#include <sstream>

#include "cvqkd/error.hpp"

namespace cvqkd::stokes {

namespace {

const Complex kI{0.0, 1.0};

// Single-mode coefficients e^{-|a|^2/2} a^n / sqrt(n!), by recurrence.
Vector coherent_mode(Complex alpha, int n_max) {
    Vector c(n_max + 1);
    c(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n <= n_max; ++n)
        c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    return c;
}

Matrix kron_identity_left(const Matrix& single, int d) {
    // 1 (x) single : acts on mode y
    Matrix out = Matrix::Zero(d * d, d * d);
    for (int b = 0; b < d; ++b)
        out.block(b * d, b * d, d, d) = single;
    return out;
}

Matrix kron_identity_right(const Matrix& single, int d) {
    // single (x) 1 : acts on mode x
    Matrix out = Matrix::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (single(i, j) != Complex{})
                out.block(i * d, j * d, d, d) = single(i, j) * Matrix::Identity(d, d);
    return out;
}

Matrix single_mode_annihilation(int d) {
    Matrix a = Matrix::Zero(d, d);
    for (int n = 1; n < d; ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

const Matrix& stokes_matrix(const std::array<ModeOperator, 4>& s, Axis axis) {
    return s[static_cast<int>(axis)].matrix;
}

} // namespace

FockCutoff::FockCutoff(int n) : n_max(n) {
    if (n < 1)
        throw DomainError("Fock cutoff n_max must be >= 1");
}

TruncatedState::TruncatedState(Vector amplitudes, FockCutoff cutoff, double truncation_loss)
    : amplitudes_(std::move(amplitudes)), cutoff_(cutoff), truncation_loss_(truncation_loss) {
    if (amplitudes_.size() != cutoff_.dim())
        throw DimensionError("amplitude vector does not match the two-mode cutoff dimension");
}

double poisson_tail(double m, int n_max) {
    if (m == 0.0)
        return 0.0;
    // log of the first omitted term, then sum forward until negligible
    double log_term = -m + (n_max + 1) * std::log(m) - std::lgamma(n_max + 2.0);
    double term = std::exp(log_term);
    double sum = 0.0;
    for (int n = n_max + 1; term > 0.0 && n < n_max + 2000; ++n) {
        sum += term;
        if (term < sum * 1e-17)
            break;
        term *= m / (n + 1);
    }
    return sum;
}

TruncatedState vacuum(FockCutoff cutoff) {
    return fock_state(0, 0, cutoff);
}

TruncatedState fock_state(int n_x, int n_y, FockCutoff cutoff) {
    if (n_x < 0 || n_y < 0 || n_x > cutoff.n_max || n_y > cutoff.n_max)
        throw DomainError("Fock state outside the truncated space");
    Vector v = Vector::Zero(cutoff.dim());
    v(cutoff.index(n_x, n_y)) = 1.0;
    return TruncatedState(std::move(v), cutoff, 0.0);
}

TruncatedState coherent_state(Complex alpha_x, Complex alpha_y, FockCutoff cutoff) {
    const double limit = cutoff.n_max / 4.0;
    const double mx = std::norm(alpha_x);
    const double my = std::norm(alpha_y);
    const double tail_x = poisson_tail(mx, cutoff.n_max);
    const double tail_y = poisson_tail(my, cutoff.n_max);
    const double tail = tail_x + tail_y - tail_x * tail_y;
    if (mx > limit || my > limit) {
        std::ostringstream msg;
        msg << "cutoff n_max=" << cutoff.n_max << " too small for |alpha|^2 = "
            << std::max(mx, my) << " (limit n_max/4 = " << limit << "); truncated tail mass "
            << tail;
        throw TruncationError(msg.str(), tail);
    }
    const Vector cx = coherent_mode(alpha_x, cutoff.n_max);
    const Vector cy = coherent_mode(alpha_y, cutoff.n_max);
    Vector v(cutoff.dim());
    for (int i = 0; i < cutoff.mode_dim(); ++i)
        for (int j = 0; j < cutoff.mode_dim(); ++j)
            v(cutoff.index(i, j)) = cx(i) * cy(j);
    return TruncatedState(std::move(v), cutoff, tail);
}

Complex overlap(const TruncatedState& a, const TruncatedState& b) {
    if (!(a.cutoff() == b.cutoff()))
        throw DimensionError("overlap of states with different Fock cutoffs");
    return a.amplitudes().dot(b.amplitudes()); // conjugates the first argument
}

ModeOperator annihilation(Mode mode, FockCutoff cutoff) {
    const int d = cutoff.mode_dim();
    const Matrix a = single_mode_annihilation(d);
    if (mode == Mode::x)
        return {kron_identity_right(a, d), Label::ax};
    return {kron_identity_left(a, d), Label::ay};
}

ModeOperator creation(Mode mode, FockCutoff cutoff) {
    ModeOperator a = annihilation(mode, cutoff);
    return {a.matrix.adjoint(), mode == Mode::x ? Label::ax_dag : Label::ay_dag};
}

ModeOperator number(FockCutoff cutoff) {
    const Matrix ax = annihilation(Mode::x, cutoff).matrix;
    const Matrix ay = annihilation(Mode::y, cutoff).matrix;
    return {ax.adjoint() * ax + ay.adjoint() * ay, Label::n};
}

std::array<ModeOperator, 4> stokes_operators(FockCutoff cutoff) {
    const Matrix ax = annihilation(Mode::x, cutoff).matrix;
    const Matrix ay = annihilation(Mode::y, cutoff).matrix;
    const Matrix axd = ax.adjoint();
    const Matrix ayd = ay.adjoint();
    const Matrix nx = axd * ax;
    const Matrix ny = ayd * ay;
    return {{
        {nx + ny, Label::S0},
        {nx - ny, Label::S1},
        {axd * ay + ayd * ax, Label::S2},
        {kI * (ayd * ax - axd * ay), Label::S3},
    }};
}

int levi_civita(int k, int l, int m) noexcept {
    if (k == l || l == m || k == m)
        return 0;
    // even permutations of (1,2,3)
    if ((k == 1 && l == 2 && m == 3) || (k == 2 && l == 3 && m == 1) || (k == 3 && l == 1 && m == 2))
        return 1;
    return -1;
}

Axis third_axis(Axis k, Axis l) {
    if (k == l)
        throw DomainError("commutator axes must differ");
    return static_cast<Axis>(6 - static_cast<int>(k) - static_cast<int>(l));
}

bool in_protected_subspace(int n_x, int n_y, FockCutoff cutoff) noexcept {
    return n_x + n_y <= cutoff.n_max - 2;
}

double commutator_check(Axis k, Axis l, FockCutoff cutoff) {
    const Axis m = third_axis(k, l);
    const auto s = stokes_operators(cutoff);
    const Matrix& sk = stokes_matrix(s, k);
    const Matrix& sl = stokes_matrix(s, l);
    const double eps = levi_civita(static_cast<int>(k), static_cast<int>(l), static_cast<int>(m));
    const Matrix residual = sk * sl - sl * sk - Complex{0.0, 2.0 * eps} * stokes_matrix(s, m);

    double worst = 0.0;
    const int d = cutoff.mode_dim();
    for (int i = 0; i < cutoff.dim(); ++i) {
        if (!in_protected_subspace(i / d, i % d, cutoff))
            continue;
        for (int j = 0; j < cutoff.dim(); ++j) {
            if (!in_protected_subspace(j / d, j % d, cutoff))
                continue;
            worst = std::max(worst, std::abs(residual(i, j)));
        }
    }
    return worst;
}

double expectation(const ModeOperator& op, const TruncatedState& state) {
    const Vector& psi = state.amplitudes();
    if (op.matrix.rows() != psi.size())
        throw DimensionError("operator and state dimensions differ");
    return psi.dot(op.matrix * psi).real() / psi.squaredNorm();
}

double variance(const ModeOperator& op, const TruncatedState& state) {
    const Vector& psi = state.amplitudes();
    if (op.matrix.rows() != psi.size())
        throw DimensionError("operator and state dimensions differ");
    const Vector a_psi = op.matrix * psi;
    const double norm2 = psi.squaredNorm();
    const double mean = psi.dot(a_psi).real() / norm2;
    return a_psi.squaredNorm() / norm2 - mean * mean;
}

UncertaintyTerms uncertainty_check(const TruncatedState& state, Axis k, Axis l) {
    const Axis m = third_axis(k, l);
    const auto s = stokes_operators(state.cutoff());
    const double vk = variance(s[static_cast<int>(k)], state);
    const double vl = variance(s[static_cast<int>(l)], state);
    const double eps = levi_civita(static_cast<int>(k), static_cast<int>(l), static_cast<int>(m));
    const double sm = eps * expectation(s[static_cast<int>(m)], state);
    return {vk * vl, sm * sm};
}

double hermiticity_deviation(const ModeOperator& op) {
    return (op.matrix - op.matrix.adjoint()).cwiseAbs().maxCoeff();
}

} // namespace cvqkd::stokes
