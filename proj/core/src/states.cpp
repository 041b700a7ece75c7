#include "cvtomo/states.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cvtomo {

namespace {

constexpr double kNormTol = 1e-12;
constexpr double kHermitianTol = 1e-12;

double norm_squared(std::span<const Complex> amps) {
    double total = 0.0;
    for (const auto& a : amps) total += std::norm(a);
    return total;
}

}  // namespace

PhasePoint PhasePoint::from_polar(double r, double theta) {
    return {r * std::cos(theta), r * std::sin(theta)};
}

double PhasePoint::radius() const { return std::hypot(re, im); }

double PhasePoint::angle() const { return std::atan2(im, re); }

FockState::FockState(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.empty()) throw std::invalid_argument("FockState: empty amplitude list");
    const double n2 = norm_squared(amplitudes_);
    if (std::abs(n2 - 1.0) > kNormTol) {
        throw std::invalid_argument("FockState: amplitudes not normalized (sum |a|^2 = " +
                                    std::to_string(n2) + ")");
    }
}

FockState FockState::normalized(std::vector<Complex> amplitudes) {
    const double n2 = norm_squared(amplitudes);
    if (!(n2 > 0.0) || !std::isfinite(n2)) {
        throw std::invalid_argument("FockState: cannot normalize a zero or non-finite vector");
    }
    const double scale = 1.0 / std::sqrt(n2);
    for (auto& a : amplitudes) a *= scale;
    return FockState(std::move(amplitudes));
}

FockState FockState::fock(int n, int cutoff) {
    if (n < 0 || cutoff < n) throw std::invalid_argument("FockState::fock: need 0 <= n <= cutoff");
    std::vector<Complex> amps(static_cast<std::size_t>(cutoff) + 1, Complex{});
    amps[static_cast<std::size_t>(n)] = 1.0;
    return FockState(std::move(amps));
}

FockState FockState::coherent(Complex beta, int cutoff) {
    if (cutoff < 0) throw std::invalid_argument("FockState::coherent: negative cutoff");
    std::vector<Complex> amps(static_cast<std::size_t>(cutoff) + 1);
    // <n|beta> = conj(<beta|n>)
    for (int n = 0; n <= cutoff; ++n) {
        amps[static_cast<std::size_t>(n)] = std::conj(coherent_overlap(n, {beta.real(), beta.imag()}));
    }
    return normalized(std::move(amps));
}

Complex FockState::amplitude(int n) const {
    if (n < 0 || n > cutoff()) return {};
    return amplitudes_[static_cast<std::size_t>(n)];
}

FockState FockState::with_global_phase(double phi) const {
    auto amps = amplitudes_;
    const Complex phase = std::polar(1.0, phi);
    for (auto& a : amps) a *= phase;
    return FockState::normalized(std::move(amps));
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
        throw std::invalid_argument("DensityMatrix: matrix must be square and non-empty");
    }
    const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
    if (!entries_.allFinite()) throw std::invalid_argument("DensityMatrix: non-finite entry");
    for (Eigen::Index j = 0; j < entries_.rows(); ++j) {
        for (Eigen::Index k = j; k < entries_.cols(); ++k) {
            if (std::abs(entries_(j, k) - std::conj(entries_(k, j))) > kHermitianTol * scale) {
                throw std::invalid_argument("DensityMatrix: not Hermitian at (" + std::to_string(j) +
                                            "," + std::to_string(k) + ")");
            }
        }
    }
}

FockState test_state() {
    const double h = 1.0 / std::numbers::sqrt2;
    std::vector<Complex> amps(5, Complex{});
    amps[0] = 0.5;
    amps[2] = Complex(0.0, h);
    amps[4] = 0.5;
    return FockState(std::move(amps));
}

DensityMatrix to_density_matrix(const FockState& state) {
    const auto amps = state.amplitudes();
    const auto d = static_cast<Eigen::Index>(amps.size());
    Eigen::MatrixXcd rho(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = 0; k < d; ++k) {
            rho(j, k) = amps[static_cast<std::size_t>(j)] * std::conj(amps[static_cast<std::size_t>(k)]);
        }
    }
    return DensityMatrix(std::move(rho));
}

double log_factorial(int n) {
    if (n < 0) throw std::invalid_argument("log_factorial: negative argument");
    return std::lgamma(static_cast<double>(n) + 1.0);
}

Complex coherent_overlap(int n, PhasePoint alpha) {
    if (n < 0) throw std::invalid_argument("coherent_overlap: negative photon number");
    const double r = alpha.radius();
    if (r == 0.0) return n == 0 ? Complex(1.0) : Complex{};
    const double log_mag = -0.5 * r * r + n * std::log(r) - 0.5 * log_factorial(n);
    return std::polar(std::exp(log_mag), -n * alpha.angle());
}

double assoc_laguerre(int n, int a, double x) {
    if (n < 0) throw std::invalid_argument("assoc_laguerre: negative degree");
    double prev = 1.0;
    if (n == 0) return prev;
    double cur = 1.0 + a - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

Complex displacement_element(int m, int n, Complex beta) {
    if (m < 0 || n < 0) throw std::invalid_argument("displacement_element: negative index");
    const double b2 = std::norm(beta);
    const int lo = std::min(m, n);
    const int gap = std::abs(m - n);
    const double lag = assoc_laguerre(lo, gap, b2);
    if (gap == 0) return std::exp(-0.5 * b2) * lag;
    if (b2 == 0.0) return {};
    // sqrt(lo!/hi!) |beta|^gap exp(-|beta|^2/2) in log space
    const double log_mag = 0.5 * (log_factorial(lo) - log_factorial(lo + gap)) + gap * std::log(std::sqrt(b2)) - 0.5 * b2;
    const double phase = std::arg(beta);
    if (m > n) return std::polar(std::exp(log_mag), gap * phase) * lag;
    // (-conj(beta))^gap
    const double sign = (gap % 2 == 0) ? 1.0 : -1.0;
    return sign * std::polar(std::exp(log_mag), -gap * phase) * lag;
}

double q_function(const DensityMatrix& rho, PhasePoint alpha) {
    const int d = rho.dim();
    std::vector<Complex> ov(static_cast<std::size_t>(d));
    for (int n = 0; n < d; ++n) ov[static_cast<std::size_t>(n)] = coherent_overlap(n, alpha);
    Complex acc{};
    for (int j = 0; j < d; ++j) {
        Complex row{};
        for (int k = 0; k < d; ++k) row += rho(j, k) * std::conj(ov[static_cast<std::size_t>(k)]);
        acc += ov[static_cast<std::size_t>(j)] * row;
    }
    return acc.real() / std::numbers::pi;
}

double q_function(const FockState& state, PhasePoint alpha) {
    Complex amp{};
    const auto amps = state.amplitudes();
    for (std::size_t n = 0; n < amps.size(); ++n) amp += coherent_overlap(static_cast<int>(n), alpha) * amps[n];
    return std::norm(amp) / std::numbers::pi;
}

double wigner_function(const DensityMatrix& rho, PhasePoint alpha) {
    const int d = rho.dim();
    const Complex beta = 2.0 * alpha.alpha();
    Complex acc{};
    for (int m = 0; m < d; ++m) {
        const double parity = (m % 2 == 0) ? 1.0 : -1.0;
        for (int n = 0; n < d; ++n) {
            // Tr[D(2a) Pi rho] = sum_{mn} rho_mn (-1)^m <n|D(2a)|m>
            acc += rho(m, n) * parity * displacement_element(n, m, beta);
        }
    }
    return acc.real() / std::numbers::pi;
}

}  // namespace cvtomo
