#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cvtomo/padua.hpp"
#include "cvtomo/states.hpp"

namespace cvtomo {

/// Taylor coefficients m_ij of sum_{i+j<=q_max} m_ij x^i y^j about the origin,
/// in physical (unscaled) phase-space units.
///
/// Values are kept as unevaluated double-double pairs (hi + lo) so the
/// extended-precision result of the basis change survives the hand-off to
/// monomial_to_polar; operator() rounds to double.
class MonomialCoeffs {
  public:
    explicit MonomialCoeffs(int q_max);

    int q_max() const { return q_max_; }
    double operator()(int i, int j) const;
    double low_part(int i, int j) const;
    void set(int i, int j, double hi, double lo = 0.0);

    /// sum m_ij x^i y^j
    double evaluate(PhasePoint p) const;

  private:
    std::size_t index(int i, int j) const;

    int q_max_;
    std::vector<double> hi_;
    std::vector<double> lo_;
};

/// Q(r, theta) ~ sum_{m<=q_max, |p|<=m} c_mp r^m e^{i p theta}, with
/// alpha = x + i y and theta measured from the +x axis.
class PolarPoly {
  public:
    PolarPoly(int order, int q_max, double half_width);

    int order() const { return order_; }
    int q_max() const { return q_max_; }
    double half_width() const { return half_width_; }

    /// Zero for |p| > m; throws std::out_of_range for m outside [0, q_max]
    /// or |p| > order.
    Complex operator()(int m, int p) const;
    void set(int m, int p, Complex value);

    Complex evaluate(PhasePoint p) const;

    /// Copy with every coefficient multiplied by `factor`.
    PolarPoly scaled(double factor) const;

  private:
    int order_;
    int q_max_;
    double half_width_;
    Eigen::MatrixXcd coeffs_;  // (q_max+1) x (2 q_max + 1), column p + q_max
};

/// m_ij = sum_ab c_ab t_{a,i} t_{b,j} L^{-(i+j)}, with t_{a,i} the monomial
/// coefficients of T_a. Accumulated at 128-bit mantissa precision.
MonomialCoeffs cheb_to_monomial_truncated(const ChebCoeffs& coeffs, int q_max);

/// Substitutes x = r cos(theta), y = r sin(theta) and collects e^{i p theta}.
PolarPoly monomial_to_polar(const MonomialCoeffs& mono, int order, double half_width);

PolarPoly polar_from_coeffs(const ChebCoeffs& coeffs, int q_max);

/// interpolate_padua -> cheb_to_monomial_truncated -> monomial_to_polar.
PolarPoly polar_from_record(const MeasurementRecord& record, int q_max);

}  // namespace cvtomo
