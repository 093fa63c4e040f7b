#pragma once

// Two-mode truncated Fock-space numerics for polarization (Stokes) operators.
//
// Basis ordering: |n_x, n_y> maps to index n_x * (n_max + 1) + n_y. Mode x is
// the bright reference, mode y the dark signal mode.

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace cvqkd::stokes {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct FockCutoff {
    int n_max = 1;

    explicit FockCutoff(int n);
    int mode_dim() const noexcept { return n_max + 1; }
    int dim() const noexcept { return mode_dim() * mode_dim(); }
    int index(int n_x, int n_y) const noexcept { return n_x * mode_dim() + n_y; }

    friend bool operator==(const FockCutoff&, const FockCutoff&) = default;
};

enum class Label { ax, ay, ax_dag, ay_dag, n, S0, S1, S2, S3 };

struct ModeOperator {
    Matrix matrix;
    Label label;
};

enum class Mode { x, y };

/// Stokes axis index k in {1, 2, 3}.
enum class Axis { S1 = 1, S2 = 2, S3 = 3 };

class TruncatedState {
public:
    TruncatedState(Vector amplitudes, FockCutoff cutoff, double truncation_loss = 0.0);

    const Vector& amplitudes() const noexcept { return amplitudes_; }
    const FockCutoff& cutoff() const noexcept { return cutoff_; }
    /// Probability mass dropped by the cutoff; the stored norm^2 is 1 minus this.
    double truncation_loss() const noexcept { return truncation_loss_; }
    double norm_squared() const { return amplitudes_.squaredNorm(); }
    Complex amplitude(int n_x, int n_y) const { return amplitudes_(cutoff_.index(n_x, n_y)); }

private:
    Vector amplitudes_;
    FockCutoff cutoff_;
    double truncation_loss_;
};

/// Poisson tail sum_{n > n_max} e^{-m} m^n / n! for mean photon number m.
double poisson_tail(double mean_photons, int n_max);

TruncatedState vacuum(FockCutoff cutoff);
TruncatedState fock_state(int n_x, int n_y, FockCutoff cutoff);

/// Tensor product of single-mode coherent states. Throws TruncationError when
/// |alpha|^2 > n_max / 4 for either mode.
TruncatedState coherent_state(Complex alpha_x, Complex alpha_y, FockCutoff cutoff);

/// <a|b>. Throws DimensionError on cutoff mismatch.
Complex overlap(const TruncatedState& a, const TruncatedState& b);

ModeOperator annihilation(Mode mode, FockCutoff cutoff);
ModeOperator creation(Mode mode, FockCutoff cutoff);
ModeOperator number(FockCutoff cutoff);

/// S0, S1, S2, S3 built from the truncated ladder operators.
std::array<ModeOperator, 4> stokes_operators(FockCutoff cutoff);

/// Levi-Civita symbol over {1, 2, 3}.
int levi_civita(int k, int l, int m) noexcept;

/// The axis m completing (k, l). Requires k != l.
Axis third_axis(Axis k, Axis l);

/// Subspace where the truncated ladder algebra is exact for quadratic
/// operators: total photon number <= n_max - 2.
bool in_protected_subspace(int n_x, int n_y, FockCutoff cutoff) noexcept;

/// Largest |([S_k, S_l] - 2i eps_klm S_m)_ij| over protected basis states.
double commutator_check(Axis k, Axis l, FockCutoff cutoff);

/// Expectation and variance over the truncated state. Values are conditioned
/// on the retained support (divided by the stored norm^2); the state is not
/// modified.
double expectation(const ModeOperator& op, const TruncatedState& state);
double variance(const ModeOperator& op, const TruncatedState& state);

struct UncertaintyTerms {
    double lhs; // V_k V_l
    double rhs; // |eps_klm <S_m>|^2
};

UncertaintyTerms uncertainty_check(const TruncatedState& state, Axis k, Axis l);

double hermiticity_deviation(const ModeOperator& op);

} // namespace cvqkd::stokes
