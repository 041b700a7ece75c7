#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cvtomo/estimator.hpp"
#include "cvtomo/padua.hpp"
#include "cvtomo/states.hpp"

namespace cvtomo {

/// Gaussian noise stream keyed by (seed, trial); draws are consumed in point
/// order, so value i of a trial depends only on (seed, trial, i).
class NoiseStream {
  public:
    NoiseStream(std::uint64_t seed, std::uint64_t trial);
    double next();
    std::vector<double> draw(std::size_t count);

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// oracle(grid.points) + N(0, epsilon) i.i.d.; epsilon = 0 gives the exact oracle.
MeasurementRecord sample_state(const DensityMatrix& rho, const PhaseGrid& grid, FunctionTag function, double epsilon,
                               std::uint64_t seed, std::uint64_t trial = 0);

struct ThresholdOutcome {
    MeasurementRecord record;
    std::size_t surviving = 0;  ///< nonzero values left
};

/// Zeroes every value with |v| < threshold. The grid is untouched.
ThresholdOutcome threshold_padua(const MeasurementRecord& record, double threshold);

/// Keeps the `keep` largest-|v| values, zeroing the rest; ties go to the
/// earlier grid position.
ThresholdOutcome threshold_equidistant(const MeasurementRecord& record, std::size_t keep);

struct StudyConfig {
    std::string state_label = "test_state";
    DensityMatrix state = to_density_matrix(test_state());
    std::vector<int> orders;              ///< Padua orders n
    std::vector<double> epsilons;         ///< noise levels for noise_study
    int trials = 10000;
    std::uint64_t seed = 0;
    double half_width = kDefaultHalfWidth;
    int d_max = 4;
    double K = 1.0;
    // thresholding study
    int threshold_order = 20;
    double threshold = 1e-2;
    int equidistant_rows = 16;
    int probe_resolution = 100;
    // equidistant comparison: grid side lengths
    std::vector<int> equidistant_sizes;

    /// Throws std::invalid_argument on an inconsistent configuration.
    void validate(const std::string& kind) const;
};

struct StudyRow {
    std::string series = "padua";  ///< "padua" or "equidistant"
    int n = 0;
    std::size_t N = 0;
    double epsilon = 0.0;
    int j = 0;
    int k = 0;
    Complex mean;
    double sigma = 0.0;
    double delta = 0.0;            ///< relative error, or absolute if delta_absolute
    bool delta_absolute = false;   ///< ideal element is zero
};

struct ElementFit {
    std::string series = "padua";
    int j = 0;
    int k = 0;
    int n = 0;             ///< noise fits: the order the fit belongs to
    double slope = 0.0;    ///< convergence: d log10(delta) / dn
    double p = 0.0;        ///< noise: fitted exponent of sigma = A eps^p
    double A = 0.0;
    double r2 = 0.0;
    double K = 0.0;        ///< noise: max_eps sigma / (eps * bracket)
};

struct StudyResult {
    std::string kind;
    std::vector<StudyRow> rows;  ///< sorted by (series, n, epsilon, j, k)
    std::vector<ElementFit> fits;
    std::map<std::string, double> summary;
    std::map<std::string, std::string> notes;
    std::vector<std::string> warnings;

    const StudyRow* find(const std::string& series, int n, double epsilon, int j, int k) const;
    const ElementFit* find_fit(const std::string& series, int n, int j, int k) const;
};

/// Relative error |ideal - est| / |ideal|, or absolute when ideal == 0.
double relative_error(Complex ideal, Complex estimate, bool* absolute = nullptr);

/// Ordinary least squares y = a + b x. Returns {a, b, r2}.
struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r2 = 0.0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

StudyResult convergence_study(const StudyConfig& config);
StudyResult noise_study(const StudyConfig& config);
StudyResult threshold_study(const StudyConfig& config);
StudyResult equidistant_comparison_study(const StudyConfig& config);

}  // namespace cvtomo
