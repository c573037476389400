#include "gbas/config.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gbas/errors.hpp"

namespace gbas {

namespace {

using nlohmann::json;

const json* find(const json& obj, const char* key)
{
    const auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double number(const json& v, const std::string& where)
{
    if (!v.is_number()) throw ConfigError(where + " must be a number");
    return v.get<double>();
}

void read(const json& obj, const char* key, double& out, const std::string& where)
{
    if (const auto* v = find(obj, key)) out = number(*v, where + "." + key);
}

void read(const json& obj, const char* key, int& out, const std::string& where)
{
    if (const auto* v = find(obj, key)) {
        if (!v->is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
        out = v->get<int>();
    }
}

void read(const json& obj, const char* key, bool& out, const std::string& where)
{
    if (const auto* v = find(obj, key)) {
        if (!v->is_boolean()) throw ConfigError(where + "." + key + " must be true or false");
        out = v->get<bool>();
    }
}

const json& object(const json& v, const std::string& where)
{
    if (!v.is_object()) throw ConfigError(where + " must be an object");
    return v;
}

std::vector<std::pair<double, double>> pairs(const json& v, const std::string& where)
{
    if (!v.is_array()) throw ConfigError(where + " must be an array of [x, y] pairs");
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& p = v[i];
        const std::string at = where + "[" + std::to_string(i) + "]";
        if (!p.is_array() || p.size() != 2) throw ConfigError(at + " must be an [x, y] pair");
        out.emplace_back(number(p[0], at), number(p[1], at));
    }
    return out;
}

ElevationCurve curve(const json& v, ElevationCurve base, const std::string& where)
{
    object(v, where);
    if (const auto* terms = find(v, "terms")) {
        if (!terms->is_array()) throw ConfigError(where + ".terms must be an array");
        base.terms.clear();
        for (std::size_t i = 0; i < terms->size(); ++i) {
            const std::string at = where + ".terms[" + std::to_string(i) + "]";
            const auto& t = object((*terms)[i], at);
            ElevationTerm term;
            read(t, "a0", term.a0, at);
            read(t, "a1", term.a1, at);
            read(t, "decay_deg", term.decay_deg, at);
            read(t, "divisor", term.divisor, at);
            if (!(term.decay_deg > 0.0) || !(term.divisor > 0.0))
                throw ConfigError(at + " needs positive decay_deg and divisor");
            base.terms.push_back(term);
        }
    }
    read(v, "constant", base.constant, where);
    read(v, "min_elevation_deg", base.min_elevation_deg, where);
    return base;
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base)
{
    return p.is_absolute() ? p : base / p;
}

AirportConfig build(const json& root, const std::filesystem::path& base_dir)
{
    object(root, "config");
    AirportConfig cfg;
    auto& ctx = cfg.context;

    const auto* name = find(root, "name");
    if (!name || !name->is_string()) throw ConfigError("config.name must be a string");
    cfg.name = name->get<std::string>();

    const auto* site = find(root, "site");
    if (!site) throw ConfigError("config.site is required");
    object(*site, "site");
    double lat = 0.0, lon = 0.0;
    if (!find(*site, "latitude_deg") || !find(*site, "longitude_deg"))
        throw ConfigError("site needs latitude_deg and longitude_deg");
    read(*site, "latitude_deg", lat, "site");
    read(*site, "longitude_deg", lon, "site");
    read(*site, "height_m", cfg.site.height, "site");
    cfg.site.latitude = lat * kDegToRad;
    cfg.site.longitude = lon * kDegToRad;

    const auto* alm = find(root, "almanac");
    if (!alm || !alm->is_string()) throw ConfigError("config.almanac must be a path string");
    cfg.almanac_path = resolve(alm->get<std::string>(), base_dir);
    cfg.almanac = load_almanac(cfg.almanac_path);

    read(root, "start_time_s", cfg.start_time_s, "config");
    read(root, "elevation_mask_deg", cfg.mask_deg, "config");
    read(root, "subset_depth", ctx.subset_depth, "config");

    if (const auto* g = find(root, "grid")) {
        object(*g, "grid");
        double x_dh_max = 6.0, extra = 7.0, step = 1.0;
        read(*g, "x_dh_max_km", x_dh_max, "grid");
        read(*g, "extra_km", extra, "grid");
        read(*g, "step_km", step, "grid");
        ctx.combos = grid_combos(x_dh_max, extra, step);
    }

    if (const auto* r = find(root, "runway_x_dh_km")) {
        if (!r->is_array()) throw ConfigError("runway_x_dh_km must be an array");
        for (const auto& x : *r) cfg.runway_x_dh_km.push_back(number(x, "runway_x_dh_km"));
    }
    // availability is judged at (x_dh, x_dh) for the reference runway
    double ref_dh = cfg.runway_x_dh_km.empty() ? 0.0 : cfg.runway_x_dh_km.front();
    read(root, "reference_x_dh_km", ref_dh, "config");
    double ref_ac = ref_dh;
    read(root, "reference_x_aircraft_km", ref_ac, "config");
    ctx.reference_combo = find_combo(ctx.combos, {ref_dh, ref_ac});

    if (const auto* t = find(root, "threat")) {
        object(*t, "threat");
        auto& th = ctx.threat;
        read(*t, "g_max_night", th.g_max_night, "threat");
        read(*t, "c_factor", th.c_factor, "threat");
        read(*t, "sigma_vig_min", th.sigma_vig_min, "threat");
        read(*t, "obliquity_scaled", ctx.obliquity_scaled_gradient, "threat");
        if (const auto* cap = find(*t, "error_cap_m")) ctx.error_cap_m = number(*cap, "threat.error_cap_m");
        if (const auto* d = find(*t, "daytime_profile")) th.daytime.anchors = pairs(*d, "threat.daytime_profile");
        if (const auto* w = find(*t, "night_windows_ut")) {
            th.night_windows.clear();
            for (const auto& [a, b] : pairs(*w, "threat.night_windows_ut")) th.night_windows.push_back({a, b});
        }
    }

    if (const auto* l = find(root, "limits")) {
        object(*l, "limits");
        if (const auto* v = find(*l, "val")) ctx.limits.val = pairs(*v, "limits.val");
        if (const auto* v = find(*l, "tel")) ctx.limits.tel = pairs(*v, "limits.tel");
    }

    if (const auto* k = find(root, "integrity")) {
        object(*k, "integrity");
        read(*k, "k_ffmd", ctx.constants.k_ffmd, "integrity");
        read(*k, "k_md_eph", ctx.constants.k_md_eph, "integrity");
        read(*k, "p_nominal", ctx.p_nominal, "integrity");
        read(*k, "p_max", cfg.targeted.p_max, "integrity");
    }

    if (const auto* a = find(root, "aircraft")) {
        object(*a, "aircraft");
        read(*a, "tau_s", ctx.aircraft.tau, "aircraft");
        read(*a, "v_mps", ctx.aircraft.v_aircraft, "aircraft");
    }

    if (const auto* n = find(root, "nominal")) {
        object(*n, "nominal");
        if (const auto* g = find(*n, "ground")) ctx.nominal.ground = curve(*g, ctx.nominal.ground, "nominal.ground");
        if (const auto* g = find(*n, "air")) ctx.nominal.air = curve(*g, ctx.nominal.air, "nominal.air");
        if (const auto* tr = find(*n, "tropo")) {
            object(*tr, "nominal.tropo");
            read(*tr, "refractivity_sigma", ctx.nominal.tropo.refractivity_sigma, "nominal.tropo");
            read(*tr, "scale_height_m", ctx.nominal.tropo.scale_height, "nominal.tropo");
            read(*tr, "glide_slope_deg", ctx.nominal.tropo.glide_slope_deg, "nominal.tropo");
        }
        if (const auto* sh = find(*n, "iono_shell")) {
            object(*sh, "nominal.iono_shell");
            read(*sh, "height_m", ctx.nominal.shell.shell_height, "nominal.iono_shell");
            read(*sh, "earth_radius_m", ctx.nominal.shell.earth_radius, "nominal.iono_shell");
        }
    }

    if (const auto* s = find(root, "sigma_vig_search")) {
        object(*s, "sigma_vig_search");
        read(*s, "step", cfg.sigma_vig.step, "sigma_vig_search");
        read(*s, "ceiling", cfg.sigma_vig.ceiling, "sigma_vig_search");
    }

    cfg.validate();
    return cfg;
}

}  // namespace

AirportConfig parse_airport(std::string_view json_text, const std::filesystem::path& base_dir)
{
    json root;
    try {
        root = json::parse(json_text.begin(), json_text.end(), nullptr, true, true);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    return build(root, base_dir);
}

AirportConfig load_airport(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_airport(text.str(), path.parent_path());
}

}  // namespace gbas
