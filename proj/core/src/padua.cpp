#include "cvtomo/padua.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cvtomo {

namespace {

constexpr double kNodeTol = 1e-9;
constexpr double kDomainTol = 1e-12;

// Scale of the orthonormal Chebyshev basis: That_a = s_a T_a.
double ortho_scale(int a) { return a == 0 ? 1.0 : std::numbers::sqrt2; }

// sum_{k=0}^{m} c[k] T_k(t)
template <typename Coeff>
double clenshaw(Coeff&& c, int m, double t) {
    double b1 = 0.0;
    double b2 = 0.0;
    for (int k = m; k >= 1; --k) {
        const double b0 = c(k) + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return c(0) + t * b1 - b2;
}

std::vector<double> chebyshev_values(int n, double t) {
    std::vector<double> T(static_cast<std::size_t>(n) + 1);
    T[0] = 1.0;
    if (n >= 1) T[1] = t;
    for (int a = 2; a <= n; ++a) T[a] = 2.0 * t * T[a - 1] - T[a - 2];
    return T;
}

}  // namespace

std::string to_string(GridKind kind) {
    switch (kind) {
        case GridKind::padua: return "padua";
        case GridKind::equidistant: return "equidistant";
        case GridKind::custom: return "custom";
    }
    return "custom";
}

std::string to_string(FunctionTag tag) {
    return tag == FunctionTag::husimi_q ? "husimi_q" : "wigner";
}

GridKind grid_kind_from_string(const std::string& s) {
    if (s == "padua") return GridKind::padua;
    if (s == "equidistant") return GridKind::equidistant;
    if (s == "custom") return GridKind::custom;
    throw std::invalid_argument("unknown grid kind '" + s + "'");
}

FunctionTag function_tag_from_string(const std::string& s) {
    if (s == "husimi_q") return FunctionTag::husimi_q;
    if (s == "wigner") return FunctionTag::wigner;
    throw std::invalid_argument("unknown function tag '" + s + "'");
}

void MeasurementRecord::validate() const {
    if (values.size() != grid.points.size()) {
        throw std::invalid_argument("MeasurementRecord: " + std::to_string(values.size()) + " values for " +
                                    std::to_string(grid.points.size()) + " points");
    }
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("MeasurementRecord: noise_sigma must be >= 0");
    if (!(grid.half_width > 0.0)) throw std::invalid_argument("MeasurementRecord: half width must be > 0");
    const double bound = grid.half_width * (1.0 + kDomainTol);
    for (const auto& p : grid.points) {
        if (std::abs(p.re) > bound || std::abs(p.im) > bound) {
            throw std::invalid_argument("MeasurementRecord: point outside [-L, L]^2");
        }
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw NonFiniteValue("MeasurementRecord: non-finite value");
    }
}

ChebCoeffs::ChebCoeffs(int order, double half_width)
    : order_(order), half_width_(half_width), coeffs_(Eigen::MatrixXd::Zero(order + 1, order + 1)) {
    if (order < 0) throw std::invalid_argument("ChebCoeffs: negative order");
    if (!(half_width > 0.0)) throw std::invalid_argument("ChebCoeffs: half width must be > 0");
}

ChebCoeffs::ChebCoeffs(int order, double half_width, Eigen::MatrixXd coeffs) : ChebCoeffs(order, half_width) {
    if (coeffs.rows() != order + 1 || coeffs.cols() != order + 1) {
        throw std::invalid_argument("ChebCoeffs: coefficient matrix must be (n+1)x(n+1)");
    }
    for (int a = 0; a <= order; ++a) {
        for (int b = order - a + 1; b <= order; ++b) {
            if (coeffs(a, b) != 0.0) throw std::invalid_argument("ChebCoeffs: nonzero coefficient with a+b > n");
        }
    }
    coeffs_ = std::move(coeffs);
}

void ChebCoeffs::set(int a, int b, double value) {
    if (a < 0 || b < 0 || a + b > order_) throw std::out_of_range("ChebCoeffs::set: (a,b) outside total degree n");
    coeffs_(a, b) = value;
}

std::size_t padua_count(int n) {
    return static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 2) / 2;
}

PhaseGrid padua_points(int n, double half_width) {
    if (n < 1) throw std::invalid_argument("padua_points: order must be >= 1");
    if (!(half_width > 0.0)) throw std::invalid_argument("padua_points: half width must be > 0");
    PhaseGrid grid;
    grid.kind = GridKind::padua;
    grid.order = n;
    grid.half_width = half_width;
    grid.points.reserve(padua_count(n));
    for (int j = 0; j <= n; ++j) {
        const double x = half_width * std::cos(j * std::numbers::pi / n);
        for (int k = 0; k <= n + 1; ++k) {
            if ((j + k) % 2 != 0) continue;
            grid.points.push_back({x, half_width * std::cos(k * std::numbers::pi / (n + 1))});
        }
    }
    return grid;
}

PhaseGrid equidistant_grid(int rows, int cols, double half_width) {
    if (rows < 2 || cols < 2) throw std::invalid_argument("equidistant_grid: rows and cols must be >= 2");
    if (!(half_width > 0.0)) throw std::invalid_argument("equidistant_grid: half width must be > 0");
    PhaseGrid grid;
    grid.kind = GridKind::equidistant;
    grid.rows = rows;
    grid.cols = cols;
    grid.half_width = half_width;
    grid.points.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    for (int r = 0; r < rows; ++r) {
        const double y = -half_width + 2.0 * half_width * r / (rows - 1);
        for (int c = 0; c < cols; ++c) {
            const double x = -half_width + 2.0 * half_width * c / (cols - 1);
            grid.points.push_back({x, y});
        }
    }
    return grid;
}

double padua_weight(int n, int j, int k) {
    const bool edge_x = (j == 0 || j == n);
    const bool edge_y = (k == 0 || k == n + 1);
    const double base = 1.0 / (static_cast<double>(n) * (n + 1));
    if (edge_x && edge_y) return 0.5 * base;
    if (edge_x || edge_y) return base;
    return 2.0 * base;
}

std::optional<std::pair<int, int>> padua_index(int n, double half_width, PhasePoint p) {
    const double tx = std::clamp(p.re / half_width, -1.0, 1.0);
    const double ty = std::clamp(p.im / half_width, -1.0, 1.0);
    const int j = static_cast<int>(std::lround(std::acos(tx) * n / std::numbers::pi));
    const int k = static_cast<int>(std::lround(std::acos(ty) * (n + 1) / std::numbers::pi));
    if ((j + k) % 2 != 0) return std::nullopt;
    const double xj = half_width * std::cos(j * std::numbers::pi / n);
    const double yk = half_width * std::cos(k * std::numbers::pi / (n + 1));
    if (std::abs(xj - p.re) > kNodeTol * half_width || std::abs(yk - p.im) > kNodeTol * half_width) {
        return std::nullopt;
    }
    return std::make_pair(j, k);
}

ChebCoeffs interpolate_padua(const MeasurementRecord& record) {
    if (record.grid.kind != GridKind::padua) {
        throw std::invalid_argument("interpolate_padua: record grid is " + to_string(record.grid.kind) +
                                    ", not padua (use interpolate_tensor for equidistant grids)");
    }
    record.validate();
    const int n = record.grid.order;
    const double L = record.grid.half_width;
    if (n < 1) throw std::invalid_argument("interpolate_padua: order must be >= 1");
    if (record.grid.size() != padua_count(n)) {
        throw std::invalid_argument("interpolate_padua: expected " + std::to_string(padua_count(n)) +
                                    " Padua points, got " + std::to_string(record.grid.size()));
    }

    // Weighted samples on the (j, k) generating lattice; odd j+k slots stay zero.
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n + 1, n + 2);
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> seen = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n + 1, n + 2, false);
    for (std::size_t i = 0; i < record.grid.size(); ++i) {
        const auto idx = padua_index(n, L, record.grid.points[i]);
        if (!idx) throw std::invalid_argument("interpolate_padua: point " + std::to_string(i) + " is not a Padua node");
        const auto [j, k] = *idx;
        if (seen(j, k)) throw std::invalid_argument("interpolate_padua: duplicate Padua node");
        seen(j, k) = true;
        G(j, k) = padua_weight(n, j, k) * record.values[i];
    }

    Eigen::MatrixXd Tx(n + 1, n + 1);
    for (int j = 0; j <= n; ++j)
        for (int a = 0; a <= n; ++a) Tx(j, a) = ortho_scale(a) * std::cos(a * j * std::numbers::pi / n);
    Eigen::MatrixXd Ty(n + 2, n + 1);
    for (int k = 0; k <= n + 1; ++k)
        for (int b = 0; b <= n; ++b) Ty(k, b) = ortho_scale(b) * std::cos(b * k * std::numbers::pi / (n + 1));

    Eigen::MatrixXd C = Tx.transpose() * G * Ty;
    for (int a = 0; a <= n; ++a) {
        for (int b = 0; b <= n; ++b) {
            if (a + b > n) {
                C(a, b) = 0.0;
            } else {
                C(a, b) *= ortho_scale(a) * ortho_scale(b);
            }
        }
    }
    C(n, 0) *= 0.5;
    return ChebCoeffs(n, L, std::move(C));
}

ChebCoeffs interpolate_tensor(const MeasurementRecord& record) {
    if (record.grid.kind != GridKind::equidistant) {
        throw std::invalid_argument("interpolate_tensor: record grid is " + to_string(record.grid.kind) +
                                    ", not equidistant");
    }
    if (record.grid.rows != record.grid.cols) {
        throw std::invalid_argument("interpolate_tensor: rows != cols (" + std::to_string(record.grid.rows) + "x" +
                                    std::to_string(record.grid.cols) + ")");
    }
    record.validate();
    const int n = record.grid.rows - 1;
    const double L = record.grid.half_width;
    const auto npts = static_cast<Eigen::Index>(record.grid.size());
    const auto nbasis = static_cast<Eigen::Index>(padua_count(n));

    Eigen::MatrixXd V(npts, nbasis);
    for (Eigen::Index i = 0; i < npts; ++i) {
        const auto& p = record.grid.points[static_cast<std::size_t>(i)];
        const auto tx = chebyshev_values(n, p.re / L);
        const auto ty = chebyshev_values(n, p.im / L);
        Eigen::Index col = 0;
        for (int a = 0; a <= n; ++a)
            for (int b = 0; a + b <= n; ++b) V(i, col++) = tx[a] * ty[b];
    }
    const Eigen::Map<const Eigen::VectorXd> v(record.values.data(), npts);
    const Eigen::VectorXd sol = V.colPivHouseholderQr().solve(v);

    ChebCoeffs out(n, L);
    Eigen::Index col = 0;
    for (int a = 0; a <= n; ++a)
        for (int b = 0; a + b <= n; ++b) out.set(a, b, sol(col++));
    return out;
}

ChebCoeffs interpolate(const MeasurementRecord& record) {
    switch (record.grid.kind) {
        case GridKind::padua: return interpolate_padua(record);
        case GridKind::equidistant: return interpolate_tensor(record);
        case GridKind::custom: break;
    }
    throw std::invalid_argument("interpolate: custom grids are not supported");
}

ChebValue eval_cheb(const ChebCoeffs& coeffs, PhasePoint point) {
    const int n = coeffs.order();
    const double L = coeffs.half_width();
    const double x = point.re / L;
    const double y = point.im / L;
    const auto& C = coeffs.matrix();
    const double xsum = clenshaw(
        [&](int a) { return clenshaw([&](int b) { return C(a, b); }, n - a, y); }, n, x);
    const double lim = 1.0 + kDomainTol;
    return {xsum, std::abs(x) > lim || std::abs(y) > lim};
}

DenseGrid eval_grid(const ChebCoeffs& coeffs, int resolution) {
    if (resolution < 2) throw std::invalid_argument("eval_grid: resolution must be >= 2");
    const int n = coeffs.order();
    const double L = coeffs.half_width();
    DenseGrid out;
    out.resolution = resolution;
    out.half_width = L;
    const auto total = static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution);
    out.points.reserve(total);
    out.values.reserve(total);

    std::vector<std::vector<double>> tx(static_cast<std::size_t>(resolution));
    for (int c = 0; c < resolution; ++c) tx[c] = chebyshev_values(n, -1.0 + 2.0 * c / (resolution - 1));
    const auto& C = coeffs.matrix();
    for (int r = 0; r < resolution; ++r) {
        const double ty = -1.0 + 2.0 * r / (resolution - 1);
        const auto Ty = chebyshev_values(n, ty);
        // inner[a] = sum_b C(a,b) T_b(y)
        std::vector<double> inner(static_cast<std::size_t>(n) + 1, 0.0);
        for (int a = 0; a <= n; ++a)
            for (int b = 0; a + b <= n; ++b) inner[a] += C(a, b) * Ty[b];
        for (int c = 0; c < resolution; ++c) {
            double v = 0.0;
            for (int a = 0; a <= n; ++a) v += inner[a] * tx[c][a];
            out.points.push_back({L * (-1.0 + 2.0 * c / (resolution - 1)), L * ty});
            out.values.push_back(v);
        }
    }
    return out;
}

LebesgueEstimate lebesgue_estimate(int n, int probe_resolution) {
    if (n < 1) throw std::invalid_argument("lebesgue_estimate: order must be >= 1");
    if (probe_resolution < 2) throw std::invalid_argument("lebesgue_estimate: probe resolution must be >= 2");

    // Column k holds the coefficients of the k-th fundamental Lagrange polynomial.
    MeasurementRecord unit{padua_points(n, 1.0), {}, 0.0, FunctionTag::husimi_q};
    const auto npts = static_cast<Eigen::Index>(unit.grid.size());
    unit.values.assign(unit.grid.size(), 0.0);
    Eigen::MatrixXd lagrange(npts, npts);
    for (Eigen::Index k = 0; k < npts; ++k) {
        unit.values[static_cast<std::size_t>(k)] = 1.0;
        const auto c = interpolate_padua(unit);
        unit.values[static_cast<std::size_t>(k)] = 0.0;
        Eigen::Index row = 0;
        for (int a = 0; a <= n; ++a)
            for (int b = 0; a + b <= n; ++b) lagrange(row++, k) = c(a, b);
    }

    std::vector<std::vector<double>> tx(static_cast<std::size_t>(probe_resolution));
    for (int c = 0; c < probe_resolution; ++c) tx[c] = chebyshev_values(n, -1.0 + 2.0 * c / (probe_resolution - 1));

    double best = 0.0;
    Eigen::MatrixXd basis(probe_resolution, npts);
    for (int r = 0; r < probe_resolution; ++r) {
        const auto ty = chebyshev_values(n, -1.0 + 2.0 * r / (probe_resolution - 1));
        for (int c = 0; c < probe_resolution; ++c) {
            Eigen::Index col = 0;
            for (int a = 0; a <= n; ++a)
                for (int b = 0; a + b <= n; ++b) basis(c, col++) = tx[c][a] * ty[b];
        }
        const Eigen::MatrixXd ell = basis * lagrange;
        best = std::max(best, ell.cwiseAbs().rowwise().sum().maxCoeff());
    }
    return {best, n, probe_resolution, probe_resolution < 4 * n};
}

}  // namespace cvtomo
