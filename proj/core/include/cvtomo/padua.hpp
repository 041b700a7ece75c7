#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cvtomo/states.hpp"

namespace cvtomo {

/// Default phase-space half-width of the sampling square [-L, L]^2.
inline constexpr double kDefaultHalfWidth = 3.0;

enum class GridKind { padua, equidistant, custom };
enum class FunctionTag { husimi_q, wigner };

std::string to_string(GridKind kind);
std::string to_string(FunctionTag tag);
GridKind grid_kind_from_string(const std::string& s);
FunctionTag function_tag_from_string(const std::string& s);

struct PhaseGrid {
    GridKind kind = GridKind::custom;
    int order = 0;  ///< Padua order n (padua grids only)
    int rows = 0;   ///< equidistant grids only
    int cols = 0;
    double half_width = kDefaultHalfWidth;
    std::vector<PhasePoint> points;

    std::size_t size() const { return points.size(); }
};

/// A record carries NaN or infinite sample values.
class NonFiniteValue : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct MeasurementRecord {
    PhaseGrid grid;
    std::vector<double> values;
    double noise_sigma = 0.0;
    FunctionTag function = FunctionTag::husimi_q;

    /// Throws std::invalid_argument on length mismatch, negative sigma or
    /// points outside [-L, L]^2.
    void validate() const;
};

/// Coefficients of sum_{a+b<=n} c_ab T_a(x/L) T_b(y/L). Entries with a+b>n
/// are held at exactly zero.
class ChebCoeffs {
  public:
    ChebCoeffs(int order, double half_width);
    /// Throws if `coeffs` is not (n+1)x(n+1) or has support above the anti-diagonal.
    ChebCoeffs(int order, double half_width, Eigen::MatrixXd coeffs);

    int order() const { return order_; }
    double half_width() const { return half_width_; }
    const Eigen::MatrixXd& matrix() const { return coeffs_; }

    double operator()(int a, int b) const { return coeffs_(a, b); }
    void set(int a, int b, double value);

  private:
    int order_;
    double half_width_;
    Eigen::MatrixXd coeffs_;
};

struct ChebValue {
    double value = 0.0;
    bool extrapolated = false;
};

struct DenseGrid {
    int resolution = 0;
    double half_width = 0.0;
    std::vector<PhasePoint> points;  ///< row-major: y outer, x inner
    std::vector<double> values;
};

struct LebesgueEstimate {
    double value = 0.0;
    int order = 0;
    int probe_resolution = 0;
    bool under_resolved = false;  ///< probe_resolution < 4n
};

std::size_t padua_count(int n);

/// First-family Padua points (L cos(j pi/n), L cos(k pi/(n+1))), j+k even,
/// in lexicographic (j, k) order.
PhaseGrid padua_points(int n, double half_width = kDefaultHalfWidth);

/// rows x cols uniform grid over [-L, L]^2 including the edges, row-major
/// (y outer, x inner).
PhaseGrid equidistant_grid(int rows, int cols, double half_width = kDefaultHalfWidth);

/// Cubature weight of Padua node (j, k), normalized so the weights sum to 1.
double padua_weight(int n, int j, int k);

/// Recovers the generating indices (j, k) of a Padua node, if `p` is one.
std::optional<std::pair<int, int>> padua_index(int n, double half_width, PhasePoint p);

/// Interpolant through the samples of a Padua record. O(n^3).
ChebCoeffs interpolate_padua(const MeasurementRecord& record);

/// Least-squares fit of total degree rows-1 on a square equidistant grid.
ChebCoeffs interpolate_tensor(const MeasurementRecord& record);

/// Dispatches on record.grid.kind.
ChebCoeffs interpolate(const MeasurementRecord& record);

/// Clenshaw evaluation; flags points outside [-L, L]^2.
ChebValue eval_cheb(const ChebCoeffs& coeffs, PhasePoint point);

DenseGrid eval_grid(const ChebCoeffs& coeffs, int resolution);

/// max over a probe_resolution^2 grid of sum_k |l_k(x, y)|, with l_k the
/// fundamental Lagrange polynomials of the Padua family of order n.
LebesgueEstimate lebesgue_estimate(int n, int probe_resolution);

}  // namespace cvtomo
