#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "gbas/constellation.hpp"

namespace gbas {

constexpr double kSingularConditionLimit = 1e12;

/// Line-of-sight rows [-cos el cos az, -cos el sin az, -sin el, 1], one per satellite.
struct GeometryMatrix {
    Eigen::Matrix<double, Eigen::Dynamic, 4> rows;
    std::vector<int> prns;

    std::size_t size() const { return prns.size(); }
};

GeometryMatrix make_geometry(std::span<const SatelliteView> views);

/// Indices into the all-in-view geometry, strictly increasing.
struct SubsetId {
    std::vector<int> members;

    std::size_t n_u() const { return members.size(); }
    bool operator==(const SubsetId&) const = default;
};

GeometryMatrix select(const GeometryMatrix& all_in_view, const SubsetId& subset);

struct IntegrityConstants {
    double k_ffmd = 5.762;
    double k_md_eph = 4.1;
};

/// Full weighted least-squares projection (G^T W G)^-1 G^T W with W = diag(1/sigma^2).
/// Throws SingularGeometry when cond(G^T W G) exceeds 1e12.
Eigen::Matrix<double, 4, Eigen::Dynamic> weighted_projection(const GeometryMatrix& g,
                                                             std::span<const double> sigma2);

/// Vertical row of the weighted projection.
Eigen::VectorXd projection_vertical(const GeometryMatrix& g, std::span<const double> sigma2);

/// Same as projection_vertical, for a subset of an all-in-view geometry, without
/// materialising the subset matrix. sigma2 is indexed like the all-in-view set.
Eigen::VectorXd projection_vertical(const GeometryMatrix& all_in_view, const SubsetId& subset,
                                    std::span<const double> sigma2_all);

/// sqrt(sum S^2 sigma^2)
double vertical_sigma(std::span<const double> s_vert, std::span<const double> sigma2);

double vpl_h0(std::span<const double> s_vert, std::span<const double> sigma2,
              const IntegrityConstants& k);

/// x_aircraft_km in km; P_k is dimensionless (m/m), so the bias term uses metres.
double vpl_eph(std::span<const double> s_vert, std::span<const double> sigma2,
               std::span<const double> p, double x_aircraft_km, const IntegrityConstants& k);

double vpl(std::span<const double> s_vert, std::span<const double> sigma2,
           std::span<const double> p, double x_aircraft_km, const IntegrityConstants& k);

/// All subsets with up to `depth` satellites removed and at least four left,
/// ordered by removal count and then lexicographically by members.
std::vector<SubsetId> enumerate_subsets(int n, int depth);

inline std::span<const double> as_span(const Eigen::VectorXd& v)
{
    return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace gbas
