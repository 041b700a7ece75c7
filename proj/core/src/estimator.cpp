#include "cvtomo/estimator.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace cvtomo {

namespace {

void check_qs(int q, int s) {
    if (q < 0 || s < 0 || q > s) {
        throw std::invalid_argument("d coefficient needs 0 <= q <= s (got q=" + std::to_string(q) +
                                    ", s=" + std::to_string(s) + ")");
    }
}

// s! / (q! h!) with h = (s-q)/2, built as binom(s, q) * (s-q)!/h!.
double leibniz_magnitude(int q, int s) {
    const int h = (s - q) / 2;
    double binom = 1.0;
    for (int i = 1; i <= q; ++i) binom = binom * (s - q + i) / i;
    double ratio = 1.0;
    for (int i = h + 1; i <= s - q; ++i) ratio *= i;
    return binom * ratio;
}

}  // namespace

double d_coeff(int q, int s) {
    check_qs(q, s);
    if ((s - q) % 2 != 0) return 0.0;
    const double mag = leibniz_magnitude(q, s);
    return ((s - q) / 2) % 2 == 0 ? mag : -mag;
}

double leibniz_weight(int q, int s) {
    check_qs(q, s);
    if ((s - q) % 2 != 0) return 0.0;
    return leibniz_magnitude(q, s);
}

double comb_factor(int j, int k) {
    if (j < 0 || k < 0) throw std::invalid_argument("comb_factor: negative index");
    return 0.5 * std::exp(0.5 * (log_factorial(j) + log_factorial(k)) - log_factorial(j + k));
}

DmConstants::DmConstants(int s_max) : s_max_(s_max) {
    if (s_max < 0) throw std::invalid_argument("DmConstants: negative s_max");
    const auto w = static_cast<std::size_t>(s_max + 1);
    d_.assign(w * w, 0.0);
    w_.assign(w * w, 0.0);
    logqw_.assign(w * w, -INFINITY);
    comb_.assign(w * w, 0.0);
    for (int s = 0; s <= s_max; ++s) {
        for (int q = 0; q <= s; ++q) {
            const auto i = static_cast<std::size_t>(q) * w + static_cast<std::size_t>(s);
            d_[i] = d_coeff(q, s);
            w_[i] = leibniz_weight(q, s);
            if ((s - q) % 2 == 0) logqw_[i] = log_factorial(s) - log_factorial((s - q) / 2);
        }
    }
    for (int j = 0; j <= s_max; ++j)
        for (int k = 0; k <= s_max; ++k) comb_[static_cast<std::size_t>(j) * w + static_cast<std::size_t>(k)] = comb_factor(j, k);
}

const DmConstants& DmConstants::cached(int s_max) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<DmConstants>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[s_max];
    if (!slot) slot = std::make_unique<DmConstants>(s_max);
    return *slot;
}

double DmConstants::d(int q, int s) const {
    check_qs(q, s);
    if (s > s_max_) throw std::out_of_range("DmConstants: s exceeds table");
    return d_[static_cast<std::size_t>(q) * static_cast<std::size_t>(s_max_ + 1) + static_cast<std::size_t>(s)];
}

double DmConstants::weight(int q, int s) const {
    check_qs(q, s);
    if (s > s_max_) throw std::out_of_range("DmConstants: s exceeds table");
    return w_[static_cast<std::size_t>(q) * static_cast<std::size_t>(s_max_ + 1) + static_cast<std::size_t>(s)];
}

double DmConstants::log_qfact_weight(int q, int s) const {
    check_qs(q, s);
    if (s > s_max_) throw std::out_of_range("DmConstants: s exceeds table");
    return logqw_[static_cast<std::size_t>(q) * static_cast<std::size_t>(s_max_ + 1) + static_cast<std::size_t>(s)];
}

double DmConstants::comb(int j, int k) const {
    if (j < 0 || k < 0 || j > s_max_ || k > s_max_) throw std::out_of_range("DmConstants: comb index");
    return comb_[static_cast<std::size_t>(j) * static_cast<std::size_t>(s_max_ + 1) + static_cast<std::size_t>(k)];
}

Complex rho_element(const PolarPoly& poly, int j, int k) {
    if (j < 0 || k < 0) throw std::invalid_argument("rho_element: negative Fock index");
    const int s = j + k;
    if (s > poly.q_max()) {
        throw InsufficientOrder("rho_element: element (" + std::to_string(j) + "," + std::to_string(k) +
                                ") needs radial order " + std::to_string(s) + ", polar expansion has q_max " +
                                std::to_string(poly.q_max()));
    }
    const int p = k - j;
    if (std::abs(p) > poly.order()) throw InsufficientOrder("rho_element: |j - k| exceeds interpolation order");
    const auto& tables = DmConstants::cached(std::max(s, 24));
    Complex acc{};
    for (int q = s % 2; q <= s; q += 2) acc += std::exp(tables.log_qfact_weight(q, s)) * poly(q, p);
    return 2.0 * std::numbers::pi * tables.comb(k, j) * acc;
}

DensityMatrix rho_matrix(const PolarPoly& poly, int d_max) {
    if (d_max < 0) throw std::invalid_argument("rho_matrix: negative d_max");
    if (2 * d_max > poly.q_max()) {
        throw InsufficientOrder("rho_matrix: d_max " + std::to_string(d_max) + " needs q_max >= " +
                                std::to_string(2 * d_max) + ", have " + std::to_string(poly.q_max()));
    }
    Eigen::MatrixXcd out(d_max + 1, d_max + 1);
    for (int j = 0; j <= d_max; ++j)
        for (int k = 0; k <= d_max; ++k) out(j, k) = rho_element(poly, j, k);
    return DensityMatrix(std::move(out));
}

double sigma_bracket(int j, int k) {
    if (j < 0 || k < 0) throw std::invalid_argument("sigma_bracket: negative index");
    const int s = j + k;
    double sum = 0.0;
    for (int q = s % 2; q <= s; q += 2) sum += std::exp(-log_factorial((s - q) / 2));
    return 0.5 * std::exp(0.5 * (log_factorial(j) + log_factorial(k))) * sum;
}

double sigma_bound(int j, int k, double K, double epsilon) {
    if (!(K >= 0.0) || !(epsilon >= 0.0)) throw std::invalid_argument("sigma_bound: K and epsilon must be >= 0");
    return K * epsilon * sigma_bracket(j, k);
}

const EstimateResult& EstimateTable::at(int j, int k) const {
    if (j < 0 || k < 0 || j > d_max || k > d_max) throw std::out_of_range("EstimateTable::at");
    return entries[static_cast<std::size_t>(j) * static_cast<std::size_t>(d_max + 1) + static_cast<std::size_t>(k)];
}

EstimateTable estimate_with_errors(const MeasurementRecord& record, const std::optional<DensityMatrix>& oracle,
                                   int d_max, double K) {
    if (record.function != FunctionTag::husimi_q) {
        throw std::invalid_argument("estimate_with_errors: density-matrix estimation needs a husimi_q record");
    }
    if (record.grid.kind != GridKind::padua) {
        throw std::invalid_argument("estimate_with_errors: record grid must be padua");
    }
    if (!(K > 0.0)) throw std::invalid_argument("estimate_with_errors: K must be > 0");
    if (d_max < 0) throw std::invalid_argument("estimate_with_errors: negative d_max");
    const int n = record.grid.order;
    if (2 * d_max > n) {
        throw InsufficientOrder("d_max " + std::to_string(d_max) + " needs Padua order n >= " +
                                std::to_string(2 * d_max) + " (record has n = " + std::to_string(n) + ")");
    }

    const auto estimate = rho_matrix(polar_from_record(record, 2 * d_max), d_max);

    std::optional<DensityMatrix> noiseless;
    if (oracle) {
        MeasurementRecord clean = record;
        clean.noise_sigma = 0.0;
        for (std::size_t i = 0; i < clean.grid.size(); ++i) clean.values[i] = q_function(*oracle, clean.grid.points[i]);
        noiseless = rho_matrix(polar_from_record(clean, 2 * d_max), d_max);
    }

    EstimateTable table;
    table.d_max = d_max;
    for (int j = 0; j <= d_max; ++j) {
        for (int k = 0; k <= d_max; ++k) {
            EstimateResult r;
            r.j = j;
            r.k = k;
            r.value = estimate(j, k);
            r.sigma_bound = sigma_bound(j, k, K, record.noise_sigma);
            r.n_used = n;
            r.N_used = record.grid.size();
            r.epsilon = record.noise_sigma;
            r.K_used = K;
            if (oracle) {
                const Complex ideal = (j <= oracle->cutoff() && k <= oracle->cutoff()) ? (*oracle)(j, k) : Complex{};
                r.recon_bound = std::abs(ideal - (*noiseless)(j, k));
            }
            if (r.sigma_bound > std::abs(r.value)) {
                table.warnings.push_back("rho_" + std::to_string(j) + std::to_string(k) +
                                         ": sigma_bound exceeds |estimate| (noise dominated)");
            }
            table.entries.push_back(r);
        }
    }
    table.recon_note = oracle ? "recon_bound = |rho_ideal - rho[N,0]| from a noiseless re-run against the oracle"
                              : "recon_bound unavailable: iteratively increase the number of Padua points until "
                                "the estimate converges";
    return table;
}

DensityMatrix nearest_psd(const DensityMatrix& rho) {
    const Eigen::MatrixXcd h = 0.5 * (rho.entries() + rho.entries().adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXcd out = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(std::move(out));
}

}  // namespace cvtomo
