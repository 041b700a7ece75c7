#include "cvtomo/polar.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace cvtomo {

namespace {

using Ext = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<128, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

// t[a][i]: coefficient of x^i in T_a(x), for i <= q_max. Exact integers.
std::vector<std::vector<Ext>> chebyshev_monomial_table(int n, int q_max) {
    std::vector<std::vector<Ext>> t(static_cast<std::size_t>(n) + 1,
                                    std::vector<Ext>(static_cast<std::size_t>(q_max) + 1, Ext(0)));
    t[0][0] = 1;
    if (n >= 1 && q_max >= 1) t[1][1] = 1;
    for (int a = 2; a <= n; ++a) {
        for (int i = 0; i <= q_max; ++i) {
            Ext v = -t[a - 2][i];
            if (i >= 1) v += 2 * t[a - 1][i - 1];
            t[a][i] = v;
        }
    }
    return t;
}

Ext binomial(int n, int k) {
    Ext r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

MonomialCoeffs::MonomialCoeffs(int q_max) : q_max_(q_max) {
    if (q_max < 0) throw std::invalid_argument("MonomialCoeffs: negative q_max");
    const auto n = static_cast<std::size_t>(q_max + 1) * static_cast<std::size_t>(q_max + 1);
    hi_.assign(n, 0.0);
    lo_.assign(n, 0.0);
}

std::size_t MonomialCoeffs::index(int i, int j) const {
    if (i < 0 || j < 0 || i + j > q_max_) {
        throw std::out_of_range("MonomialCoeffs: (" + std::to_string(i) + "," + std::to_string(j) +
                                ") outside total degree " + std::to_string(q_max_));
    }
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(q_max_ + 1) + static_cast<std::size_t>(j);
}

double MonomialCoeffs::operator()(int i, int j) const { return hi_[index(i, j)]; }

double MonomialCoeffs::low_part(int i, int j) const { return lo_[index(i, j)]; }

void MonomialCoeffs::set(int i, int j, double hi, double lo) {
    const auto k = index(i, j);
    hi_[k] = hi;
    lo_[k] = lo;
}

double MonomialCoeffs::evaluate(PhasePoint p) const {
    // Horner in y inside Horner in x.
    double acc = 0.0;
    for (int i = q_max_; i >= 0; --i) {
        double inner = 0.0;
        for (int j = q_max_ - i; j >= 0; --j) inner = inner * p.im + (*this)(i, j);
        acc = acc * p.re + inner;
    }
    return acc;
}

PolarPoly::PolarPoly(int order, int q_max, double half_width)
    : order_(order), q_max_(q_max), half_width_(half_width),
      coeffs_(Eigen::MatrixXcd::Zero(q_max + 1, 2 * q_max + 1)) {
    if (q_max < 0 || order < 0) throw std::invalid_argument("PolarPoly: negative order");
    if (q_max > order) throw std::invalid_argument("PolarPoly: q_max exceeds order");
}

Complex PolarPoly::operator()(int m, int p) const {
    if (m < 0 || m > q_max_) {
        throw std::out_of_range("PolarPoly: radial order " + std::to_string(m) + " outside [0, " +
                                std::to_string(q_max_) + "]");
    }
    if (std::abs(p) > order_) throw std::out_of_range("PolarPoly: angular index exceeds order");
    if (std::abs(p) > m) return {};
    return coeffs_(m, p + q_max_);
}

void PolarPoly::set(int m, int p, Complex value) {
    if (m < 0 || m > q_max_ || std::abs(p) > m) throw std::out_of_range("PolarPoly::set: need 0 <= |p| <= m <= q_max");
    coeffs_(m, p + q_max_) = value;
}

Complex PolarPoly::evaluate(PhasePoint pt) const {
    const double r = pt.radius();
    const double theta = pt.angle();
    Complex acc{};
    double rm = 1.0;
    for (int m = 0; m <= q_max_; ++m) {
        for (int p = -m; p <= m; ++p) acc += coeffs_(m, p + q_max_) * rm * std::polar(1.0, p * theta);
        rm *= r;
    }
    return acc;
}

PolarPoly PolarPoly::scaled(double factor) const {
    PolarPoly out = *this;
    out.coeffs_ *= factor;
    return out;
}

MonomialCoeffs cheb_to_monomial_truncated(const ChebCoeffs& coeffs, int q_max) {
    const int n = coeffs.order();
    if (q_max < 0) throw std::invalid_argument("cheb_to_monomial_truncated: negative q_max");
    if (q_max > n) {
        throw std::invalid_argument("cheb_to_monomial_truncated: q_max " + std::to_string(q_max) +
                                    " exceeds interpolation order " + std::to_string(n));
    }
    const auto t = chebyshev_monomial_table(n, q_max);
    const auto& C = coeffs.matrix();

    // u[a][j] = sum_b c_ab t_{b,j}; t_{b,j} vanishes unless b >= j and b - j even.
    std::vector<std::vector<Ext>> u(static_cast<std::size_t>(n) + 1,
                                    std::vector<Ext>(static_cast<std::size_t>(q_max) + 1, Ext(0)));
    for (int a = 0; a <= n; ++a) {
        for (int j = 0; j <= q_max; ++j) {
            Ext acc = 0;
            for (int b = j; a + b <= n; b += 2) {
                const double c = C(a, b);
                if (c != 0.0) acc += Ext(c) * t[b][j];
            }
            u[a][j] = acc;
        }
    }

    const Ext inv_L = Ext(1) / Ext(coeffs.half_width());
    std::vector<Ext> inv_L_pow(static_cast<std::size_t>(q_max) + 1);
    inv_L_pow[0] = 1;
    for (int d = 1; d <= q_max; ++d) inv_L_pow[d] = inv_L_pow[d - 1] * inv_L;

    MonomialCoeffs out(q_max);
    for (int i = 0; i <= q_max; ++i) {
        for (int j = 0; i + j <= q_max; ++j) {
            Ext acc = 0;
            for (int a = i; a <= n; a += 2) acc += t[a][i] * u[a][j];
            acc *= inv_L_pow[i + j];
            const double hi = static_cast<double>(acc);
            out.set(i, j, hi, static_cast<double>(acc - Ext(hi)));
        }
    }
    return out;
}

PolarPoly monomial_to_polar(const MonomialCoeffs& mono, int order, double half_width) {
    const int q_max = mono.q_max();
    const auto width = static_cast<std::size_t>(2 * q_max + 1);
    std::vector<Ext> re(static_cast<std::size_t>(q_max + 1) * width, Ext(0));
    std::vector<Ext> im(re.size(), Ext(0));

    // x^i y^j = r^{i+j} (e^{it}+e^{-it})^i (e^{it}-e^{-it})^j / (2^i (2i)^j)
    for (int i = 0; i <= q_max; ++i) {
        for (int j = 0; i + j <= q_max; ++j) {
            const Ext mij = Ext(mono(i, j)) + Ext(mono.low_part(i, j));
            if (mij == 0) continue;
            const int m = i + j;
            // (2i)^{-j} = 2^{-j} (-i)^j
            Ext scale = mij;
            for (int s = 0; s < m; ++s) scale /= 2;
            Ext unit_re = 0, unit_im = 0;
            switch (j % 4) {
                case 0: unit_re = 1; break;
                case 1: unit_im = -1; break;
                case 2: unit_re = -1; break;
                case 3: unit_im = 1; break;
            }
            for (int u = 0; u <= i; ++u) {
                const Ext bu = binomial(i, u);
                for (int v = 0; v <= j; ++v) {
                    Ext w = scale * bu * binomial(j, v);
                    if ((j - v) % 2 != 0) w = -w;
                    const int p = (2 * u - i) + (2 * v - j);
                    const auto k = static_cast<std::size_t>(m) * width + static_cast<std::size_t>(p + q_max);
                    re[k] += w * unit_re;
                    im[k] += w * unit_im;
                }
            }
        }
    }

    PolarPoly out(order, q_max, half_width);
    for (int m = 0; m <= q_max; ++m) {
        for (int p = -m; p <= m; ++p) {
            const auto k = static_cast<std::size_t>(m) * width + static_cast<std::size_t>(p + q_max);
            out.set(m, p, {static_cast<double>(re[k]), static_cast<double>(im[k])});
        }
    }
    return out;
}

PolarPoly polar_from_coeffs(const ChebCoeffs& coeffs, int q_max) {
    return monomial_to_polar(cheb_to_monomial_truncated(coeffs, q_max), coeffs.order(), coeffs.half_width());
}

PolarPoly polar_from_record(const MeasurementRecord& record, int q_max) {
    if (record.grid.kind != GridKind::padua) {
        throw std::invalid_argument("polar_from_record: record grid is " + to_string(record.grid.kind) + ", not padua");
    }
    return polar_from_coeffs(interpolate_padua(record), q_max);
}

}  // namespace cvtomo
