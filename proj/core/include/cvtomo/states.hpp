#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cvtomo {

using Complex = std::complex<double>;

/// A point alpha = re + i*im of single-mode phase space.
struct PhasePoint {
    double re = 0.0;
    double im = 0.0;

    static PhasePoint from_polar(double r, double theta);

    Complex alpha() const { return {re, im}; }
    double radius() const;
    /// Angle measured from the +re axis, in (-pi, pi].
    double angle() const;

    friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

/// Pure state in the Fock basis |0>..|cutoff>.
class FockState {
  public:
    /// Throws std::invalid_argument unless sum |a_n|^2 == 1 within 1e-12.
    explicit FockState(std::vector<Complex> amplitudes);

    /// Rescales the amplitudes to unit norm first.
    static FockState normalized(std::vector<Complex> amplitudes);
    static FockState fock(int n, int cutoff);
    static FockState vacuum(int cutoff = 0) { return fock(0, cutoff); }
    /// Coherent state |beta> truncated at `cutoff` and renormalized.
    static FockState coherent(Complex beta, int cutoff = 30);

    int cutoff() const { return static_cast<int>(amplitudes_.size()) - 1; }
    std::span<const Complex> amplitudes() const { return amplitudes_; }
    Complex amplitude(int n) const;

    FockState with_global_phase(double phi) const;

  private:
    std::vector<Complex> amplitudes_;
};

/// Density matrix on the truncated Fock space. Hermiticity is checked at
/// construction; unit trace is not (estimates need not have it).
class DensityMatrix {
  public:
    explicit DensityMatrix(Eigen::MatrixXcd entries);

    int cutoff() const { return static_cast<int>(entries_.rows()) - 1; }
    int dim() const { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXcd& entries() const { return entries_; }
    Complex operator()(int j, int k) const { return entries_(j, k); }
    Complex trace() const { return entries_.trace(); }

  private:
    Eigen::MatrixXcd entries_;
};

/// (|0> + |4>)/2 + i|2>/sqrt(2), cutoff 4.
FockState test_state();

DensityMatrix to_density_matrix(const FockState& state);

/// <alpha|n> = exp(-|alpha|^2/2) conj(alpha)^n / sqrt(n!), evaluated in log space.
Complex coherent_overlap(int n, PhasePoint alpha);

/// <m|D(beta)|n> from the associated-Laguerre closed form.
Complex displacement_element(int m, int n, Complex beta);

/// Husimi Q(alpha) = <alpha|rho|alpha> / pi.
double q_function(const DensityMatrix& rho, PhasePoint alpha);
double q_function(const FockState& state, PhasePoint alpha);

/// Wigner W(alpha) = Tr[Pi D(-alpha) rho D(alpha)] / pi, using
/// D(alpha) Pi D(-alpha) = D(2 alpha) Pi.
double wigner_function(const DensityMatrix& rho, PhasePoint alpha);

/// Generalized Laguerre L_n^(a)(x) by three-term recurrence.
double assoc_laguerre(int n, int a, double x);

/// log(n!) via lgamma.
double log_factorial(int n);

}  // namespace cvtomo
