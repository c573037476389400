#include "gbas/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>
#include <Eigen/QR>

#include "gbas/errors.hpp"

namespace gbas {

namespace {

constexpr int kVertical = 2;

double norm1(const Eigen::Matrix4d& m)
{
    return m.cwiseAbs().colwise().sum().maxCoeff();
}

// Inverse of the 4x4 normal matrix, guarded by its 1-norm condition number.
Eigen::Matrix4d guarded_inverse(const Eigen::Matrix4d& normal)
{
    bool invertible = false;
    double det = 0.0;
    Eigen::Matrix4d inv;
    normal.computeInverseAndDetWithCheck(inv, det, invertible, 0.0);
    if (!invertible || !inv.allFinite())
        throw SingularGeometry("normal matrix is singular");
    const double cond = norm1(normal) * norm1(inv);
    if (!(cond <= kSingularConditionLimit))
        throw SingularGeometry("normal matrix condition number " + std::to_string(cond) +
                               " exceeds limit");
    return inv;
}

void check_sigmas(std::span<const double> sigma2, std::size_t n)
{
    if (sigma2.size() != n) throw NumericalFailure("sigma count does not match geometry");
    for (double s : sigma2) {
        if (!(s > 0.0) || !std::isfinite(s)) throw NumericalFailure("sigma^2 must be positive");
    }
}

}  // namespace

GeometryMatrix make_geometry(std::span<const SatelliteView> views)
{
    GeometryMatrix g;
    g.rows.resize(static_cast<Eigen::Index>(views.size()), 4);
    g.prns.reserve(views.size());
    for (std::size_t i = 0; i < views.size(); ++i) {
        const auto& v = views[i];
        const double ce = std::cos(v.elevation);
        const auto r = static_cast<Eigen::Index>(i);
        g.rows(r, 0) = -ce * std::cos(v.azimuth);
        g.rows(r, 1) = -ce * std::sin(v.azimuth);
        g.rows(r, 2) = -std::sin(v.elevation);
        g.rows(r, 3) = 1.0;
        g.prns.push_back(v.prn);
    }
    return g;
}

GeometryMatrix select(const GeometryMatrix& all_in_view, const SubsetId& subset)
{
    GeometryMatrix g;
    g.rows.resize(static_cast<Eigen::Index>(subset.n_u()), 4);
    for (std::size_t i = 0; i < subset.n_u(); ++i) {
        const int m = subset.members[i];
        g.rows.row(static_cast<Eigen::Index>(i)) = all_in_view.rows.row(m);
        g.prns.push_back(all_in_view.prns[static_cast<std::size_t>(m)]);
    }
    return g;
}

Eigen::Matrix<double, 4, Eigen::Dynamic> weighted_projection(const GeometryMatrix& g,
                                                             std::span<const double> sigma2)
{
    check_sigmas(sigma2, g.size());
    if (g.size() < 4) throw SingularGeometry("fewer than four satellites");
    Eigen::VectorXd w(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) w(static_cast<Eigen::Index>(i)) = 1.0 / sigma2[i];

    const Eigen::Matrix4d normal = g.rows.transpose() * w.asDiagonal() * g.rows;
    guarded_inverse(normal);

    // QR of the whitened rows keeps S G = I tight on poorly conditioned skies;
    // the explicit normal inverse squares the condition number.
    const Eigen::VectorXd root_w = w.cwiseSqrt();
    const Eigen::MatrixXd a = root_w.asDiagonal() * g.rows;
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), 4);
    const Eigen::Matrix4d r = qr.matrixQR().topLeftCorner<4, 4>().triangularView<Eigen::Upper>();
    Eigen::Matrix<double, 4, Eigen::Dynamic> qt_w = q.transpose() * root_w.asDiagonal();
    r.triangularView<Eigen::Upper>().solveInPlace(qt_w);
    return qt_w;
}

Eigen::VectorXd projection_vertical(const GeometryMatrix& g, std::span<const double> sigma2)
{
    return weighted_projection(g, sigma2).row(kVertical).transpose();
}

Eigen::VectorXd projection_vertical(const GeometryMatrix& all_in_view, const SubsetId& subset,
                                    std::span<const double> sigma2_all)
{
    check_sigmas(sigma2_all, all_in_view.size());
    if (subset.n_u() < 4) throw SingularGeometry("fewer than four satellites");

    Eigen::Matrix4d normal = Eigen::Matrix4d::Zero();
    for (int m : subset.members) {
        const Eigen::Vector4d row = all_in_view.rows.row(m).transpose();
        normal.noalias() += (row * row.transpose()) / sigma2_all[static_cast<std::size_t>(m)];
    }
    const Eigen::RowVector4d vert = guarded_inverse(normal).row(kVertical);

    Eigen::VectorXd s(static_cast<Eigen::Index>(subset.n_u()));
    for (std::size_t i = 0; i < subset.n_u(); ++i) {
        const int m = subset.members[i];
        s(static_cast<Eigen::Index>(i)) =
            vert.dot(all_in_view.rows.row(m)) / sigma2_all[static_cast<std::size_t>(m)];
    }
    return s;
}

double vertical_sigma(std::span<const double> s_vert, std::span<const double> sigma2)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < s_vert.size(); ++i) sum += s_vert[i] * s_vert[i] * sigma2[i];
    return std::sqrt(sum);
}

double vpl_h0(std::span<const double> s_vert, std::span<const double> sigma2,
              const IntegrityConstants& k)
{
    return k.k_ffmd * vertical_sigma(s_vert, sigma2);
}

double vpl_eph(std::span<const double> s_vert, std::span<const double> sigma2,
               std::span<const double> p, double x_aircraft_km, const IntegrityConstants& k)
{
    const double x_m = x_aircraft_km * 1000.0;
    double bias = 0.0;
    for (std::size_t i = 0; i < s_vert.size(); ++i)
        bias = std::max(bias, std::abs(s_vert[i]) * x_m * p[i]);
    return bias + k.k_md_eph * vertical_sigma(s_vert, sigma2);
}

double vpl(std::span<const double> s_vert, std::span<const double> sigma2,
           std::span<const double> p, double x_aircraft_km, const IntegrityConstants& k)
{
    return std::max(vpl_h0(s_vert, sigma2, k), vpl_eph(s_vert, sigma2, p, x_aircraft_km, k));
}

std::vector<SubsetId> enumerate_subsets(int n, int depth)
{
    std::vector<SubsetId> out;
    if (n < 4) return out;
    const int max_removed = std::min(depth, n - 4);
    for (int removed = 0; removed <= max_removed; ++removed) {
        const int keep = n - removed;
        // lexicographic over kept members: walk combinations of `keep` out of n
        std::vector<int> idx(static_cast<std::size_t>(keep));
        for (int i = 0; i < keep; ++i) idx[static_cast<std::size_t>(i)] = i;
        while (true) {
            out.push_back({idx});
            int pos = keep - 1;
            while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - keep + pos) --pos;
            if (pos < 0) break;
            ++idx[static_cast<std::size_t>(pos)];
            for (int j = pos + 1; j < keep; ++j)
                idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return out;
}

}  // namespace gbas
