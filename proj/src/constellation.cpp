#include "gbas/constellation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <sstream>

#include "gbas/errors.hpp"

namespace gbas {

namespace {

constexpr int kMaxKeplerIterations = 50;
constexpr double kKeplerTolerance = 1e-12;

constexpr std::array<std::string_view, 9> kAlmanacKeys = {
    "ID",          "SQRT_A (m^1/2)", "ECC",       "INC (rad)", "RAAN (rad)",
    "RAAN_RATE (rad/s)", "ARG_PERIGEE (rad)", "MEAN_ANOM (rad)", "TOA (s)",
};

std::optional<std::string> entry_problem(const AlmanacEntry& e)
{
    if (!std::isfinite(e.sqrt_semimajor_axis) || e.sqrt_semimajor_axis <= 0.0)
        return "SQRT_A must be positive";
    if (!std::isfinite(e.eccentricity) || e.eccentricity < 0.0 || e.eccentricity > 0.05)
        return "ECC outside [0, 0.05]";
    if (!std::isfinite(e.inclination) || e.inclination <= 0.0 || e.inclination >= kPi)
        return "INC outside (0, pi)";
    for (double v : {e.raan_at_epoch, e.raan_rate, e.argument_of_perigee, e.mean_anomaly_at_epoch,
                     e.reference_time}) {
        if (!std::isfinite(v)) return "non-finite orbital element";
    }
    return std::nullopt;
}

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view text, std::size_t line)
{
    // strtod accepts the exponent forms YUMA files use (e.g. 1.5E-002)
    std::string buf(text);
    char* end = nullptr;
    const double value = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(value))
        throw ParseError(line, "non-numeric field value '" + buf + "'");
    return value;
}

struct PendingRecord {
    std::map<std::string, std::pair<double, std::size_t>, std::less<>> fields;
    std::size_t first_line = 0;
};

AlmanacEntry finish_record(const PendingRecord& rec)
{
    if (rec.fields.size() != kAlmanacKeys.size())
        throw ParseError(rec.first_line, "record has " + std::to_string(rec.fields.size()) +
                                             " fields, expected " +
                                             std::to_string(kAlmanacKeys.size()));
    auto get = [&](std::string_view key) { return rec.fields.find(key)->second.first; };

    AlmanacEntry e;
    const double id = get("ID");
    if (id != std::floor(id) || id < 1 || id > 1024)
        throw ParseError(rec.fields.find("ID")->second.second, "ID must be a positive integer");
    e.prn = static_cast<int>(id);
    e.sqrt_semimajor_axis = get("SQRT_A (m^1/2)");
    e.eccentricity = get("ECC");
    e.inclination = get("INC (rad)");
    e.raan_at_epoch = get("RAAN (rad)");
    e.raan_rate = get("RAAN_RATE (rad/s)");
    e.argument_of_perigee = get("ARG_PERIGEE (rad)");
    e.mean_anomaly_at_epoch = get("MEAN_ANOM (rad)");
    e.reference_time = get("TOA (s)");

    if (auto problem = entry_problem(e)) {
        // point at the offending field where we can
        std::size_t line = rec.first_line;
        if (problem->starts_with("ECC")) line = rec.fields.find("ECC")->second.second;
        if (problem->starts_with("INC")) line = rec.fields.find("INC (rad)")->second.second;
        if (problem->starts_with("SQRT_A")) line = rec.fields.find("SQRT_A (m^1/2)")->second.second;
        throw ParseError(line, *problem);
    }
    return e;
}

}  // namespace

double AlmanacEntry::mean_motion() const
{
    const double a = semimajor_axis();
    return std::sqrt(kGravitationalParameter / (a * a * a));
}

void validate(const AlmanacEntry& entry)
{
    if (auto problem = entry_problem(entry))
        throw ConfigError("almanac PRN " + std::to_string(entry.prn) + ": " + *problem);
}

void validate(const SiteLocation& site)
{
    if (!std::isfinite(site.latitude) || std::abs(site.latitude) > kPi / 2)
        throw ConfigError("site latitude outside [-pi/2, pi/2]");
    if (!std::isfinite(site.longitude) || std::abs(site.longitude) > kPi)
        throw ConfigError("site longitude outside [-pi, pi]");
    if (!std::isfinite(site.height)) throw ConfigError("site height not finite");
}

std::vector<AlmanacEntry> parse_almanac(std::istream& in)
{
    std::vector<AlmanacEntry> out;
    std::optional<PendingRecord> rec;
    std::string raw;
    std::size_t line_no = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) {
            if (rec) out.push_back(finish_record(*rec));
            rec.reset();
            continue;
        }
        if (line.front() == '*' || line.front() == '#') continue;

        const auto colon = line.find(':');
        if (colon == std::string_view::npos) throw ParseError(line_no, "expected 'KEY: value'");
        const std::string_view key = trim(line.substr(0, colon));
        const std::string_view value = trim(line.substr(colon + 1));
        if (std::find(kAlmanacKeys.begin(), kAlmanacKeys.end(), key) == kAlmanacKeys.end())
            throw ParseError(line_no, "unknown field '" + std::string(key) + "'");
        if (!rec) {
            rec.emplace();
            rec->first_line = line_no;
        }
        if (rec->fields.contains(key))
            throw ParseError(line_no, "duplicate field '" + std::string(key) + "'");
        rec->fields.emplace(std::string(key), std::make_pair(parse_number(value, line_no), line_no));
    }
    if (rec) out.push_back(finish_record(*rec));
    return out;
}

std::vector<AlmanacEntry> parse_almanac(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return parse_almanac(in);
}

std::vector<AlmanacEntry> load_almanac(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open almanac file " + path.string());
    return parse_almanac(in);
}

std::string format_almanac(std::span<const AlmanacEntry> entries)
{
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (i > 0) os << '\n';
        os << "******** Almanac for PRN-" << std::setw(2) << std::setfill('0') << e.prn
           << std::setfill(' ') << " ********\n";
        os << "ID: " << e.prn << '\n'
           << "SQRT_A (m^1/2): " << e.sqrt_semimajor_axis << '\n'
           << "ECC: " << e.eccentricity << '\n'
           << "INC (rad): " << e.inclination << '\n'
           << "RAAN (rad): " << e.raan_at_epoch << '\n'
           << "RAAN_RATE (rad/s): " << e.raan_rate << '\n'
           << "ARG_PERIGEE (rad): " << e.argument_of_perigee << '\n'
           << "MEAN_ANOM (rad): " << e.mean_anomaly_at_epoch << '\n'
           << "TOA (s): " << e.reference_time << '\n';
    }
    return os.str();
}

double solve_kepler(double mean_anomaly, double eccentricity)
{
    const double m = std::remainder(mean_anomaly, kTwoPi);
    double e_anom = eccentricity < 0.8 ? m : kPi;
    for (int i = 0; i < kMaxKeplerIterations; ++i) {
        const double residual = e_anom - eccentricity * std::sin(e_anom) - m;
        if (std::abs(residual) < kKeplerTolerance) return e_anom + (mean_anomaly - m);
        e_anom -= residual / (1.0 - eccentricity * std::cos(e_anom));
    }
    throw NonConvergence("Kepler iteration did not converge for M=" + std::to_string(mean_anomaly) +
                         " e=" + std::to_string(eccentricity));
}

namespace {

// Orbit-plane position rotated by inclination and the given node longitude.
Ecef orbit_to_frame(const AlmanacEntry& entry, double t, double node)
{
    const double a = entry.semimajor_axis();
    const double e = entry.eccentricity;
    const double dt = t - entry.reference_time;
    const double mean_anomaly = entry.mean_anomaly_at_epoch + entry.mean_motion() * dt;
    const double ecc_anomaly = solve_kepler(mean_anomaly, e);

    const double true_anomaly =
        std::atan2(std::sqrt(1.0 - e * e) * std::sin(ecc_anomaly), std::cos(ecc_anomaly) - e);
    const double arg_latitude = true_anomaly + entry.argument_of_perigee;
    const double radius = a * (1.0 - e * std::cos(ecc_anomaly));

    const double xp = radius * std::cos(arg_latitude);
    const double yp = radius * std::sin(arg_latitude);
    const double ci = std::cos(entry.inclination);
    const double si = std::sin(entry.inclination);
    const double cn = std::cos(node);
    const double sn = std::sin(node);
    return {xp * cn - yp * ci * sn, xp * sn + yp * ci * cn, yp * si};
}

}  // namespace

Ecef propagate_inertial(const AlmanacEntry& entry, double t)
{
    const double node = entry.raan_at_epoch + entry.raan_rate * (t - entry.reference_time);
    return orbit_to_frame(entry, t, node);
}

Ecef propagate(const AlmanacEntry& entry, double t)
{
    // IS-GPS-200 corrected longitude of ascending node
    const double node = entry.raan_at_epoch +
                        (entry.raan_rate - kEarthRotationRate) * (t - entry.reference_time) -
                        kEarthRotationRate * entry.reference_time;
    return orbit_to_frame(entry, t, node);
}

Ecef site_ecef(const SiteLocation& site)
{
    const double e2 = kWgs84Flattening * (2.0 - kWgs84Flattening);
    const double sl = std::sin(site.latitude);
    const double cl = std::cos(site.latitude);
    const double n = kWgs84SemiMajorAxis / std::sqrt(1.0 - e2 * sl * sl);
    return {(n + site.height) * cl * std::cos(site.longitude),
            (n + site.height) * cl * std::sin(site.longitude),
            (n * (1.0 - e2) + site.height) * sl};
}

AzimuthElevation azimuth_elevation(const Ecef& sat_ecef, const SiteLocation& site)
{
    const Ecef los = sat_ecef - site_ecef(site);
    const double sl = std::sin(site.latitude);
    const double cl = std::cos(site.latitude);
    const double so = std::sin(site.longitude);
    const double co = std::cos(site.longitude);

    const double east = -so * los.x() + co * los.y();
    const double north = -sl * co * los.x() - sl * so * los.y() + cl * los.z();
    const double up = cl * co * los.x() + cl * so * los.y() + sl * los.z();

    AzimuthElevation out;
    out.elevation = std::atan2(up, std::hypot(east, north));
    double az = std::atan2(east, north);
    if (az < 0.0) az += kTwoPi;
    if (az >= kTwoPi) az = 0.0;
    out.azimuth = az;
    return out;
}

std::vector<SatelliteView> visible_satellites(std::span<const AlmanacEntry> almanac,
                                              const SiteLocation& site, double t, double mask)
{
    std::vector<SatelliteView> out;
    for (const auto& entry : almanac) {
        const auto ae = azimuth_elevation(propagate(entry, t), site);
        if (ae.elevation > mask) out.push_back({entry.prn, ae.azimuth, ae.elevation});
    }
    std::sort(out.begin(), out.end(),
              [](const SatelliteView& a, const SatelliteView& b) { return a.prn < b.prn; });
    return out;
}

}  // namespace gbas
