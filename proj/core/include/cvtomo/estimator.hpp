#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cvtomo/padua.hpp"
#include "cvtomo/polar.hpp"
#include "cvtomo/states.hpp"

namespace cvtomo {

/// Raised when the polar expansion lacks the radial order an element needs.
class InsufficientOrder : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Closed-form constant (-1)^{(s-q)/2} s! / (q! ((s-q)/2)!) for s - q even,
/// zero for s - q odd. Equals (-1)^{s-q} binom(s, q) H_{s-q}(0).
double d_coeff(int q, int s);

/// binom(s, q) * d^{s-q}/dr^{s-q} exp(r^2) at r = 0, i.e. the weight of
/// Q^{(q)}(0) in d^s/dr^s [exp(r^2) Q(r)] at r = 0. Equals |d_coeff(q, s)|.
double leibniz_weight(int q, int s);

/// sqrt(k! j!) / (2 (k+j)!)
double comb_factor(int j, int k);

/// State-independent tables for elements up to s = j + k <= s_max.
class DmConstants {
  public:
    explicit DmConstants(int s_max);

    /// Shared, lazily built instance; safe to call from several threads.
    static const DmConstants& cached(int s_max);

    int s_max() const { return s_max_; }
    double d(int q, int s) const;
    double weight(int q, int s) const;
    /// log(q! * weight(q, s)) = log(s!) - log(((s-q)/2)!)
    double log_qfact_weight(int q, int s) const;
    double comb(int j, int k) const;

  private:
    int s_max_;
    std::vector<double> d_;
    std::vector<double> w_;
    std::vector<double> logqw_;
    std::vector<double> comb_;
};

/// <j|rho|k> = 2 pi C_{k,j} sum_q q! w_q^{j+k} c_{q, k-j}.
///
/// The 2 pi restores the pi of rho = pi * int P Q together with the angular
/// integral; records hold raw Q samples (peak 1/pi).
Complex rho_element(const PolarPoly& poly, int j, int k);

/// All entries 0 <= j, k <= d_max. No trace or positivity projection.
DensityMatrix rho_matrix(const PolarPoly& poly, int d_max);

/// K eps sqrt(k! j!)/2 sum_{q: j+k-q even} 1/((j+k-q)/2)!
double sigma_bound(int j, int k, double K, double epsilon);

/// The bracket of sigma_bound, i.e. sigma_bound(j, k, 1, 1).
double sigma_bracket(int j, int k);

struct EstimateResult {
    int j = 0;
    int k = 0;
    Complex value;
    std::optional<double> recon_bound;  ///< needs a ground-truth oracle
    double sigma_bound = 0.0;           ///< 1-sigma-equivalent noise bound
    int n_used = 0;
    std::size_t N_used = 0;
    double epsilon = 0.0;
    double K_used = 0.0;
};

struct EstimateTable {
    int d_max = 0;
    std::vector<EstimateResult> entries;  ///< row-major in (j, k)
    std::vector<std::string> warnings;
    std::string recon_note;

    const EstimateResult& at(int j, int k) const;
};

/// rho_jk[N, eps] with recon and sigma bounds. With an oracle, recon_bound is
/// |rho_ideal - rho[N, 0]| from a noiseless re-run on the same grid.
EstimateTable estimate_with_errors(const MeasurementRecord& record, const std::optional<DensityMatrix>& oracle,
                                   int d_max, double K = 1.0);

/// Optional post-processing: nearest positive semidefinite matrix in the
/// Frobenius norm (negative eigenvalues clipped). Off by default.
DensityMatrix nearest_psd(const DensityMatrix& rho);

}  // namespace cvtomo
