#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace gbas {

// WGS-84 / IS-GPS-200 constants
constexpr double kGravitationalParameter = 3.986005e14;  // m^3/s^2
constexpr double kEarthRotationRate = 7.2921151467e-5;   // rad/s
constexpr double kWgs84SemiMajorAxis = 6378137.0;        // m
constexpr double kWgs84Flattening = 1.0 / 298.257223563;
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kDegToRad = kPi / 180.0;

using Ecef = Eigen::Vector3d;

/// One satellite slot of a Keplerian almanac.
struct AlmanacEntry {
    int prn = 0;
    double sqrt_semimajor_axis = 0.0;    // m^1/2
    double eccentricity = 0.0;
    double inclination = 0.0;            // rad
    double raan_at_epoch = 0.0;          // rad, longitude of ascending node at weekly epoch
    double raan_rate = 0.0;              // rad/s
    double argument_of_perigee = 0.0;    // rad
    double mean_anomaly_at_epoch = 0.0;  // rad
    double reference_time = 0.0;         // s of week

    double semimajor_axis() const { return sqrt_semimajor_axis * sqrt_semimajor_axis; }
    double mean_motion() const;
    double orbital_period() const { return kTwoPi / mean_motion(); }
};

/// Throws ConfigError naming the violated invariant.
void validate(const AlmanacEntry& entry);

struct SiteLocation {
    double latitude = 0.0;   // rad
    double longitude = 0.0;  // rad
    double height = 0.0;     // m, ellipsoidal
};

void validate(const SiteLocation& site);

struct SatelliteView {
    int prn = 0;
    double azimuth = 0.0;    // rad, [0, 2pi)
    double elevation = 0.0;  // rad, (0, pi/2]

    bool operator==(const SatelliteView&) const = default;
};

struct AzimuthElevation {
    double azimuth = 0.0;
    double elevation = 0.0;
};

// Almanac text format: blank-line separated records of "KEY: value" lines.
// Lines starting with '*' or '#' are ignored. Every record carries exactly the
// nine fields ID, SQRT_A (m^1/2), ECC, INC (rad), RAAN (rad), RAAN_RATE (rad/s),
// ARG_PERIGEE (rad), MEAN_ANOM (rad), TOA (s).
std::vector<AlmanacEntry> parse_almanac(std::istream& in);
std::vector<AlmanacEntry> parse_almanac(std::string_view text);
std::vector<AlmanacEntry> load_almanac(const std::filesystem::path& path);
std::string format_almanac(std::span<const AlmanacEntry> entries);

/// Eccentric anomaly for the given mean anomaly. Newton iteration to
/// |M - (E - e sin E)| < 1e-12; throws NonConvergence after 50 steps.
double solve_kepler(double mean_anomaly, double eccentricity);

/// Position in the non-rotating frame aligned with ECEF at the almanac's
/// weekly epoch (no Earth-rotation term).
Ecef propagate_inertial(const AlmanacEntry& entry, double t);

/// Earth-fixed position at time t (s of week).
Ecef propagate(const AlmanacEntry& entry, double t);

Ecef site_ecef(const SiteLocation& site);

AzimuthElevation azimuth_elevation(const Ecef& sat_ecef, const SiteLocation& site);

/// Satellites strictly above the mask, sorted by PRN.
std::vector<SatelliteView> visible_satellites(std::span<const AlmanacEntry> almanac,
                                              const SiteLocation& site, double t, double mask);

}  // namespace gbas
