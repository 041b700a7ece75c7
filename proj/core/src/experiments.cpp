#include "cvtomo/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "cvtomo/polar.hpp"

namespace cvtomo {

namespace {

constexpr double kZeroIdeal = 1e-14;
constexpr int kTrialChunk = 64;

std::vector<double> oracle_values(const DensityMatrix& rho, const PhaseGrid& grid, FunctionTag function) {
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out[i] = function == FunctionTag::husimi_q ? q_function(rho, grid.points[i])
                                                   : wigner_function(rho, grid.points[i]);
    }
    return out;
}

Complex ideal_element(const DensityMatrix& rho, int j, int k) {
    if (j > rho.cutoff() || k > rho.cutoff()) return {};
    return rho(j, k);
}

// Runs body(chunk_index) over [0, chunks) on a small thread pool. Each chunk
// writes its own slot, so the caller reduces in chunk order.
template <typename Body>
void parallel_chunks(int chunks, Body&& body) {
    const int workers = std::max(1, std::min<int>(chunks, static_cast<int>(std::thread::hardware_concurrency())));
    if (workers == 1) {
        for (int c = 0; c < chunks; ++c) body(c);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int c = next++; c < chunks; c = next++) body(c);
        });
    }
}

bool row_less(const StudyRow& a, const StudyRow& b) {
    return std::tie(a.series, a.n, a.epsilon, a.j, a.k) < std::tie(b.series, b.n, b.epsilon, b.j, b.k);
}

DensityMatrix padua_estimate(const MeasurementRecord& record, int d_max) {
    return rho_matrix(polar_from_record(record, 2 * d_max), d_max);
}

DensityMatrix tensor_estimate(const MeasurementRecord& record, int d_max) {
    return rho_matrix(polar_from_coeffs(interpolate_tensor(record), 2 * d_max), d_max);
}

void push_noiseless_rows(StudyResult& out, const std::string& series, int n, std::size_t N, const DensityMatrix& est,
                         const DensityMatrix& ideal, int d_max) {
    for (int j = 0; j <= d_max; ++j) {
        for (int k = 0; k <= d_max; ++k) {
            StudyRow row;
            row.series = series;
            row.n = n;
            row.N = N;
            row.j = j;
            row.k = k;
            row.mean = est(j, k);
            row.delta = relative_error(ideal_element(ideal, j, k), est(j, k), &row.delta_absolute);
            out.rows.push_back(row);
        }
    }
}

// Per-element slope of log10(delta) against n, for nonzero ideal elements.
void fit_convergence(StudyResult& out, const std::string& series, const StudyConfig& config, bool use_N = false) {
    for (int j = 0; j <= config.d_max; ++j) {
        for (int k = 0; k <= config.d_max; ++k) {
            if (std::abs(ideal_element(config.state, j, k)) <= kZeroIdeal) continue;
            std::vector<double> xs, ys;
            for (const auto& row : out.rows) {
                if (row.series != series || row.j != j || row.k != k || row.delta <= 0.0) continue;
                xs.push_back(use_N ? static_cast<double>(row.N) : static_cast<double>(row.n));
                ys.push_back(std::log10(row.delta));
            }
            if (xs.size() < 2) continue;
            const auto fit = fit_line(xs, ys);
            ElementFit ef;
            ef.series = series;
            ef.j = j;
            ef.k = k;
            ef.slope = fit.slope;
            ef.r2 = fit.r2;
            out.fits.push_back(ef);
        }
    }
}

}  // namespace

NoiseStream::NoiseStream(std::uint64_t seed, std::uint64_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                      0x9e3779b9u};
    engine_.seed(seq);
}

double NoiseStream::next() { return normal_(engine_); }

std::vector<double> NoiseStream::draw(std::size_t count) {
    std::vector<double> out(count);
    for (auto& v : out) v = next();
    return out;
}

MeasurementRecord sample_state(const DensityMatrix& rho, const PhaseGrid& grid, FunctionTag function, double epsilon,
                               std::uint64_t seed, std::uint64_t trial) {
    if (!(epsilon >= 0.0)) throw std::invalid_argument("sample_state: epsilon must be >= 0");
    MeasurementRecord rec;
    rec.grid = grid;
    rec.function = function;
    rec.noise_sigma = epsilon;
    rec.values = oracle_values(rho, grid, function);
    if (epsilon > 0.0) {
        NoiseStream noise(seed, trial);
        for (auto& v : rec.values) v += epsilon * noise.next();
    }
    rec.validate();
    return rec;
}

ThresholdOutcome threshold_padua(const MeasurementRecord& record, double threshold) {
    if (record.grid.kind != GridKind::padua) throw std::invalid_argument("threshold_padua: record grid must be padua");
    if (!(threshold >= 0.0)) throw std::invalid_argument("threshold_padua: threshold must be >= 0");
    ThresholdOutcome out{record, 0};
    for (auto& v : out.record.values) {
        if (std::abs(v) < threshold) v = 0.0;
        if (v != 0.0) ++out.surviving;
    }
    return out;
}

ThresholdOutcome threshold_equidistant(const MeasurementRecord& record, std::size_t keep) {
    if (record.grid.kind != GridKind::equidistant) {
        throw std::invalid_argument("threshold_equidistant: record grid must be equidistant");
    }
    if (keep > record.values.size()) throw std::invalid_argument("threshold_equidistant: keep exceeds point count");
    std::vector<std::size_t> order(record.values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(record.values[a]) > std::abs(record.values[b]);
    });
    ThresholdOutcome out{record, 0};
    for (std::size_t r = keep; r < order.size(); ++r) out.record.values[order[r]] = 0.0;
    out.surviving = static_cast<std::size_t>(
        std::count_if(out.record.values.begin(), out.record.values.end(), [](double v) { return v != 0.0; }));
    return out;
}

void StudyConfig::validate(const std::string& kind) const {
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (!(half_width > 0.0)) throw std::invalid_argument("config: L must be > 0");
    if (d_max < 0) throw std::invalid_argument("config: d_max must be >= 0");
    if (!(K > 0.0)) throw std::invalid_argument("config: K must be > 0");
    if (kind == "convergence" || kind == "noise" || kind == "equidistant") {
        if (orders.empty()) throw std::invalid_argument("config: n-range must be non-empty");
        for (int n : orders) {
            if (n < 1) throw std::invalid_argument("config: Padua orders must be >= 1");
            if (2 * d_max > n) {
                throw std::invalid_argument("config: order " + std::to_string(n) + " too small for d_max " +
                                            std::to_string(d_max) + " (need n >= " + std::to_string(2 * d_max) + ")");
            }
        }
    }
    if (kind == "noise") {
        if (epsilons.empty()) throw std::invalid_argument("config: epsilon set must be non-empty");
        for (double e : epsilons)
            if (!(e >= 0.0)) throw std::invalid_argument("config: epsilons must be >= 0");
    }
    if (kind == "equidistant") {
        if (equidistant_sizes.empty()) throw std::invalid_argument("config: equidistant sizes must be non-empty");
        for (int r : equidistant_sizes) {
            if (r - 1 < 2 * d_max) {
                throw std::invalid_argument("config: equidistant grid " + std::to_string(r) + "x" + std::to_string(r) +
                                            " too small for d_max " + std::to_string(d_max));
            }
        }
    }
    if (kind == "threshold") {
        if (threshold_order < 1 || equidistant_rows < 2 || probe_resolution < 2) {
            throw std::invalid_argument("config: invalid threshold-study geometry");
        }
        if (!(threshold >= 0.0)) throw std::invalid_argument("config: threshold must be >= 0");
    }
}

const StudyRow* StudyResult::find(const std::string& series, int n, double epsilon, int j, int k) const {
    for (const auto& r : rows)
        if (r.series == series && r.n == n && r.epsilon == epsilon && r.j == j && r.k == k) return &r;
    return nullptr;
}

const ElementFit* StudyResult::find_fit(const std::string& series, int n, int j, int k) const {
    for (const auto& f : fits)
        if (f.series == series && f.n == n && f.j == j && f.k == k) return &f;
    return nullptr;
}

double relative_error(Complex ideal, Complex estimate, bool* absolute) {
    const double diff = std::abs(ideal - estimate);
    const bool abs_mode = std::abs(ideal) <= kZeroIdeal;
    if (absolute) *absolute = abs_mode;
    return abs_mode ? diff : diff / std::abs(ideal);
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 paired samples");
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

StudyResult convergence_study(const StudyConfig& config) {
    config.validate("convergence");
    StudyResult out;
    out.kind = "convergence";
    for (int n : config.orders) {
        const auto rec = sample_state(config.state, padua_points(n, config.half_width), FunctionTag::husimi_q, 0.0, config.seed);
        push_noiseless_rows(out, "padua", n, rec.grid.size(), padua_estimate(rec, config.d_max), config.state, config.d_max);
    }
    std::sort(out.rows.begin(), out.rows.end(), row_less);
    fit_convergence(out, "padua", config);
    out.notes["delta"] = "relative error |ideal - rho[N,0]| / |ideal|; absolute error where the ideal element is zero";
    return out;
}

StudyResult noise_study(const StudyConfig& config) {
    config.validate("noise");
    StudyResult out;
    out.kind = "noise";
    const int d = config.d_max;
    const auto cells = static_cast<std::size_t>(d + 1) * static_cast<std::size_t>(d + 1);
    const int chunks = (config.trials + kTrialChunk - 1) / kTrialChunk;

    for (int n : config.orders) {
        const auto grid = padua_points(n, config.half_width);
        const auto exact = sample_state(config.state, grid, FunctionTag::husimi_q, 0.0, config.seed);
        const auto reference = padua_estimate(exact, d);

        for (double eps : config.epsilons) {
            // Per-chunk partial sums of rho_t and |rho_t - reference|^2.
            std::vector<std::vector<Complex>> sum_chunks(static_cast<std::size_t>(chunks), std::vector<Complex>(cells));
            std::vector<std::vector<double>> sq_chunks(static_cast<std::size_t>(chunks), std::vector<double>(cells));
            parallel_chunks(chunks, [&](int c) {
                auto& sums = sum_chunks[static_cast<std::size_t>(c)];
                auto& sqs = sq_chunks[static_cast<std::size_t>(c)];
                MeasurementRecord rec = exact;
                rec.noise_sigma = eps;
                const int end = std::min(config.trials, (c + 1) * kTrialChunk);
                for (int t = c * kTrialChunk; t < end; ++t) {
                    NoiseStream noise(config.seed, static_cast<std::uint64_t>(t));
                    for (std::size_t i = 0; i < rec.values.size(); ++i) rec.values[i] = exact.values[i] + eps * noise.next();
                    const auto est = padua_estimate(rec, d);
                    for (int j = 0; j <= d; ++j) {
                        for (int k = 0; k <= d; ++k) {
                            const auto idx = static_cast<std::size_t>(j) * static_cast<std::size_t>(d + 1) + static_cast<std::size_t>(k);
                            sums[idx] += est(j, k);
                            sqs[idx] += std::norm(est(j, k) - reference(j, k));
                        }
                    }
                }
            });
            for (int j = 0; j <= d; ++j) {
                for (int k = 0; k <= d; ++k) {
                    const auto idx = static_cast<std::size_t>(j) * static_cast<std::size_t>(d + 1) + static_cast<std::size_t>(k);
                    Complex sum{};
                    double sq = 0.0;
                    for (int c = 0; c < chunks; ++c) {
                        sum += sum_chunks[static_cast<std::size_t>(c)][idx];
                        sq += sq_chunks[static_cast<std::size_t>(c)][idx];
                    }
                    StudyRow row;
                    row.n = n;
                    row.N = grid.size();
                    row.epsilon = eps;
                    row.j = j;
                    row.k = k;
                    row.mean = sum / static_cast<double>(config.trials);
                    row.sigma = std::sqrt(sq / config.trials);
                    row.delta = relative_error(ideal_element(config.state, j, k), reference(j, k), &row.delta_absolute);
                    out.rows.push_back(row);
                }
            }
        }

        double k_emp = 0.0;
        for (int j = 0; j <= d; ++j) {
            for (int k = 0; k <= d; ++k) {
                std::vector<double> lx, ly;
                double k_jk = 0.0;
                for (double eps : config.epsilons) {
                    if (eps <= 0.0) continue;
                    const double sigma = out.find("padua", n, eps, j, k)->sigma;
                    k_jk = std::max(k_jk, sigma / (eps * sigma_bracket(j, k)));
                    if (sigma > 0.0) {
                        lx.push_back(std::log10(eps));
                        ly.push_back(std::log10(sigma));
                    }
                }
                ElementFit ef;
                ef.j = j;
                ef.k = k;
                ef.n = n;
                ef.K = k_jk;
                if (lx.size() >= 2) {
                    const auto fit = fit_line(lx, ly);
                    ef.p = fit.slope;
                    ef.A = std::pow(10.0, fit.intercept);
                    ef.r2 = fit.r2;
                    if (fit.r2 < 0.99) {
                        out.warnings.push_back("n=" + std::to_string(n) + " rho_" + std::to_string(j) + std::to_string(k) +
                                               ": log-log regression R^2 = " + std::to_string(fit.r2) + " < 0.99");
                    }
                }
                k_emp = std::max(k_emp, k_jk);
                out.fits.push_back(ef);
            }
        }
        out.summary["K_emp_n" + std::to_string(n)] = k_emp;
        out.summary["K_emp"] = std::max(out.summary["K_emp"], k_emp);
    }
    std::sort(out.rows.begin(), out.rows.end(), row_less);
    out.notes["sigma"] = "sqrt(mean |rho_t - rho[N,0]|^2): spread about the noiseless reconstruction";
    out.notes["noise"] = "draws keyed by (seed, trial, point); the same draws are reused across epsilon values";
    out.notes["K"] = "K_jk = max over epsilon of sigma / (epsilon * bracket_jk); K_emp = max over (j,k)";
    return out;
}

StudyResult threshold_study(const StudyConfig& config) {
    config.validate("threshold");
    StudyResult out;
    out.kind = "threshold";
    const double L = config.half_width;

    const auto pad = sample_state(config.state, padua_points(config.threshold_order, L), FunctionTag::husimi_q, 0.0, config.seed);
    const auto pad_thr = threshold_padua(pad, config.threshold);
    const auto full_fit = interpolate_padua(pad);
    const auto thr_fit = interpolate_padua(pad_thr.record);

    const auto eq = sample_state(config.state, equidistant_grid(config.equidistant_rows, config.equidistant_rows, L),
                                 FunctionTag::husimi_q, 0.0, config.seed);
    const auto eq_thr = threshold_equidistant(eq, pad_thr.surviving);
    const auto eq_full_fit = interpolate_tensor(eq);
    const auto eq_thr_fit = interpolate_tensor(eq_thr.record);

    const auto g_full = eval_grid(full_fit, config.probe_resolution);
    const auto g_thr = eval_grid(thr_fit, config.probe_resolution);
    const auto g_eq_full = eval_grid(eq_full_fit, config.probe_resolution);
    const auto g_eq_thr = eval_grid(eq_thr_fit, config.probe_resolution);

    double thr_vs_full = 0.0, full_vs_exact = 0.0, thr_vs_exact = 0.0, eq_full_vs_exact = 0.0, eq_thr_vs_exact = 0.0;
    for (std::size_t i = 0; i < g_full.points.size(); ++i) {
        const double q = q_function(config.state, g_full.points[i]);
        thr_vs_full = std::max(thr_vs_full, std::abs(g_thr.values[i] - g_full.values[i]));
        full_vs_exact = std::max(full_vs_exact, std::abs(g_full.values[i] - q));
        thr_vs_exact = std::max(thr_vs_exact, std::abs(g_thr.values[i] - q));
        eq_full_vs_exact = std::max(eq_full_vs_exact, std::abs(g_eq_full.values[i] - q));
        eq_thr_vs_exact = std::max(eq_thr_vs_exact, std::abs(g_eq_thr.values[i] - q));
    }
    out.summary["padua_points"] = static_cast<double>(pad.grid.size());
    out.summary["padua_surviving"] = static_cast<double>(pad_thr.surviving);
    out.summary["padua_thresholded_vs_full_maxabs"] = thr_vs_full;
    out.summary["padua_full_vs_exact_maxabs"] = full_vs_exact;
    out.summary["padua_thresholded_vs_exact_maxabs"] = thr_vs_exact;
    out.summary["equidistant_points"] = static_cast<double>(eq.grid.size());
    out.summary["equidistant_kept"] = static_cast<double>(eq_thr.surviving);
    out.summary["equidistant_full_vs_exact_maxabs"] = eq_full_vs_exact;
    out.summary["equidistant_thresholded_vs_exact_maxabs"] = eq_thr_vs_exact;
    out.notes["equidistant_fit"] = "least-squares product-Chebyshev fit of total degree rows-1 (no rational preprocessing)";
    out.notes["probe"] = "uniform " + std::to_string(config.probe_resolution) + "^2 grid over [-L, L]^2";
    return out;
}

StudyResult equidistant_comparison_study(const StudyConfig& config) {
    config.validate("equidistant");
    StudyResult out;
    out.kind = "equidistant";
    for (int n : config.orders) {
        const auto rec = sample_state(config.state, padua_points(n, config.half_width), FunctionTag::husimi_q, 0.0, config.seed);
        push_noiseless_rows(out, "padua", n, rec.grid.size(), padua_estimate(rec, config.d_max), config.state, config.d_max);
    }
    for (int rows : config.equidistant_sizes) {
        const auto rec = sample_state(config.state, equidistant_grid(rows, rows, config.half_width), FunctionTag::husimi_q,
                                      0.0, config.seed);
        push_noiseless_rows(out, "equidistant", rows - 1, rec.grid.size(), tensor_estimate(rec, config.d_max), config.state,
                            config.d_max);
    }
    std::sort(out.rows.begin(), out.rows.end(), row_less);
    fit_convergence(out, "padua", config, true);
    fit_convergence(out, "equidistant", config, true);

    // Matched-N comparison at the largest equidistant grid.
    const int rows_max = *std::max_element(config.equidistant_sizes.begin(), config.equidistant_sizes.end());
    const auto N_eq = static_cast<double>(rows_max) * rows_max;
    int best_n = config.orders.front();
    for (int n : config.orders) {
        if (std::abs(static_cast<double>(padua_count(n)) - N_eq) < std::abs(static_cast<double>(padua_count(best_n)) - N_eq)) best_n = n;
    }
    out.summary["matched_equidistant_N"] = N_eq;
    out.summary["matched_padua_N"] = static_cast<double>(padua_count(best_n));
    for (int j = 0; j <= config.d_max; ++j) {
        for (int k = 0; k <= config.d_max; ++k) {
            if (std::abs(ideal_element(config.state, j, k)) <= kZeroIdeal) continue;
            const std::string tag = "rho" + std::to_string(j) + std::to_string(k);
            out.summary["matched_padua_delta_" + tag] = out.find("padua", best_n, 0.0, j, k)->delta;
            out.summary["matched_equidistant_delta_" + tag] = out.find("equidistant", rows_max - 1, 0.0, j, k)->delta;
            // Count of N-steps where the equidistant error went up.
            int increases = 0;
            double prev = -1.0;
            std::vector<int> sizes = config.equidistant_sizes;
            std::sort(sizes.begin(), sizes.end());
            for (int rows : sizes) {
                const double cur = out.find("equidistant", rows - 1, 0.0, j, k)->delta;
                if (prev >= 0.0 && cur > prev) ++increases;
                prev = cur;
            }
            out.summary["equidistant_increases_" + tag] = increases;
        }
    }
    out.notes["equidistant_fit"] = "least-squares product-Chebyshev fit of total degree rows-1 (no rational preprocessing)";
    return out;
}

}  // namespace cvtomo
