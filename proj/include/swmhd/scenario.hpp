#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swmhd/conservation.hpp"
#include "swmhd/core.hpp"
#include "swmhd/error.hpp"
#include "swmhd/topography.hpp"

namespace swmhd {

struct OutputPolicy {
    std::string dir;                 ///< relative paths resolve against SWMHD_OUTPUT_ROOT
    std::optional<double> cadence;   ///< snapshot interval in t; default t_end/50
    std::vector<std::string> laws;   ///< audited laws; empty means every applicable one
    EnergySampling energy_sampling = EnergySampling::left_node;

    friend bool operator==(const OutputPolicy&, const OutputPolicy&) = default;
};

struct Scenario {
    SchemeKind scheme = SchemeKind::mass;
    Mesh mesh;
    double tau_ratio = 0.05;
    PhysParams phys;
    Topography topo;
    BoundaryMode boundary = BoundaryMode::fixed_velocity;
    InitialCondition initial = initial::DamBreak{};
    ViscosityParams visc;
    NewtonSettings newton;
    double t_end = 1.0;
    OutputPolicy output;

    Problem problem() const { return Problem{mesh, phys, topo, visc, newton, boundary}; }

    long n_steps() const { return std::lround(t_end / mesh.tau); }

    /// Snapshot interval in steps (at least one).
    long cadence_steps() const
    {
        const double c = output.cadence.value_or(t_end > 0.0 ? t_end / 50.0 : mesh.tau);
        return std::max(1L, std::lround(c / mesh.tau));
    }

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

using nlohmann::json;

/// Walks a JSON object, tracking the key path and the keys consumed so
/// that leftovers can be reported as unknown.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) fail("expected an object");
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw ConfigError((path_.empty() ? std::string("<root>") : path_) + ": " + what);
    }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key)
    {
        seen_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key)
    {
        if (!has(key)) throw ConfigError(key_path(key) + ": missing required key");
        const auto& v = raw(key);
        if (!v.is_number()) throw ConfigError(key_path(key) + ": expected a number");
        return v.get<double>();
    }

    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    std::optional<double> optional_number(const std::string& key)
    {
        if (!has(key) || j_.at(key).is_null()) {
            if (has(key)) seen_.insert(key);
            return std::nullopt;
        }
        return number(key);
    }

    int integer(const std::string& key, int fallback)
    {
        if (!has(key)) return fallback;
        const auto& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(key_path(key) + ": expected an integer");
        return v.get<int>();
    }

    std::string string(const std::string& key, const std::string& fallback)
    {
        if (!has(key)) return fallback;
        const auto& v = raw(key);
        if (!v.is_string()) throw ConfigError(key_path(key) + ": expected a string");
        return v.get<std::string>();
    }

    std::string string(const std::string& key)
    {
        if (!has(key)) throw ConfigError(key_path(key) + ": missing required key");
        return string(key, "");
    }

    std::vector<double> numbers(const std::string& key)
    {
        if (!has(key)) throw ConfigError(key_path(key) + ": missing required key");
        const auto& v = raw(key);
        if (!v.is_array()) throw ConfigError(key_path(key) + ": expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number())
                throw ConfigError(key_path(key) + "[" + std::to_string(i) + "]: expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    Reader child(const std::string& key)
    {
        if (!has(key)) throw ConfigError(key_path(key) + ": missing required block");
        return Reader(raw(key), key_path(key));
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(key_path(it.key()) + ": unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline void check(bool ok, const std::string& path, const std::string& what)
{
    if (!ok) throw ConfigError(path + ": " + what);
}

inline Topography parse_topography(Reader r)
{
    Topography t;
    const std::string variant = r.string("variant");
    static const json no_params = json::object();
    Reader p = r.has("params") ? r.child("params") : Reader(no_params, r.key_path("params"));
    if (variant == "flat") t.profile = bottom::Flat{p.number("level", 0.0)};
    else if (variant == "inclined") t.profile = bottom::Inclined{p.number("slope")};
    else if (variant == "parabolic_up") t.profile = bottom::ParabolicUp{p.number("k", 1.0), p.number("center", 0.0)};
    else if (variant == "parabolic_down")
        t.profile = bottom::ParabolicDown{p.number("k", 1.0), p.number("center", 0.0)};
    else if (variant == "logarithmic") t.profile = bottom::Logarithmic{p.number("k1", 1.0), p.number("k2", 0.0)};
    else if (variant == "arbitrary") {
        try {
            t.profile = bottom::Arbitrary::tabulated(p.numbers("x"), p.numbers("b"));
        } catch (const ConfigError& e) {
            p.fail(e.what());
        }
    } else
        throw ConfigError(r.key_path("variant") + ": unknown topography '" + variant + "'");
    p.finish();

    const std::string approx = r.string("approx_mode", "energy_variant");
    if (approx == "energy_variant") t.approx = BottomApprox::energy_variant;
    else if (approx == "multiplier_variant") t.approx = BottomApprox::multiplier_variant;
    else throw ConfigError(r.key_path("approx_mode") + ": unknown mode '" + approx + "'");
    r.finish();
    try {
        t.validate();
    } catch (const ConfigError& e) {
        r.fail(e.what());
    }
    return t;
}

inline InitialCondition parse_initial(Reader r)
{
    const std::string type = r.string("type");
    InitialCondition ic;
    if (type == "dam_break") {
        initial::DamBreak d;
        d.rho_left = r.number("rho_left", d.rho_left);
        d.rho_right = r.number("rho_right", d.rho_right);
        d.smoothing_width = r.optional_number("smoothing_width");
        check(d.rho_left > 0.0, r.key_path("rho_left"), "must be positive");
        check(d.rho_right > 0.0, r.key_path("rho_right"), "must be positive");
        check(!d.smoothing_width || *d.smoothing_width >= 0.0, r.key_path("smoothing_width"),
              "must be non-negative");
        ic = d;
    } else if (type == "column") {
        initial::Column c;
        c.base = r.number("base", c.base);
        c.peak = r.number("peak", c.peak);
        if (r.has("span")) {
            const auto span = r.numbers("span");
            check(span.size() == 2, r.key_path("span"), "expected [lo, hi]");
            c.span_lo = span[0];
            c.span_hi = span[1];
        }
        c.smoothing_width = r.optional_number("smoothing_width");
        check(c.base > 0.0, r.key_path("base"), "must be positive");
        check(c.peak >= c.base, r.key_path("peak"), "must not be below base");
        check(c.span_lo < c.span_hi, r.key_path("span"), "must be an increasing interval");
        check(!c.smoothing_width || *c.smoothing_width >= 0.0, r.key_path("smoothing_width"),
              "must be non-negative");
        ic = c;
    } else if (type == "smooth_custom") {
        initial::SmoothCustom c{r.numbers("s"), r.numbers("rho"), r.numbers("u")};
        check(c.s.size() == c.rho.size() && c.s.size() == c.u.size(), r.key_path("s"),
              "s, rho and u tables differ in length");
        for (double v : c.rho) check(v > 0.0, r.key_path("rho"), "heights must be positive");
        ic = c;
    } else if (type == "wave") {
        initial::Wave w;
        w.base = r.number("base", w.base);
        w.amplitude = r.number("amplitude", w.amplitude);
        w.modes = r.integer("modes", w.modes);
        check(w.base > std::abs(w.amplitude), r.key_path("amplitude"), "must be smaller than base");
        check(w.modes >= 1, r.key_path("modes"), "must be at least 1");
        ic = w;
    } else
        throw ConfigError(r.key_path("type") + ": unknown initial condition '" + type + "'");
    r.finish();
    return ic;
}

inline json topography_json(const Topography& t)
{
    json j;
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, bottom::Flat>) j = {{"variant", "flat"}, {"params", {{"level", p.level}}}};
            else if constexpr (std::is_same_v<P, bottom::Inclined>)
                j = {{"variant", "inclined"}, {"params", {{"slope", p.slope}}}};
            else if constexpr (std::is_same_v<P, bottom::ParabolicUp>)
                j = {{"variant", "parabolic_up"}, {"params", {{"k", p.k}, {"center", p.center}}}};
            else if constexpr (std::is_same_v<P, bottom::ParabolicDown>)
                j = {{"variant", "parabolic_down"}, {"params", {{"k", p.k}, {"center", p.center}}}};
            else if constexpr (std::is_same_v<P, bottom::Logarithmic>)
                j = {{"variant", "logarithmic"}, {"params", {{"k1", p.k1}, {"k2", p.k2}}}};
            else {
                if (p.table.empty())
                    throw ConfigError("topography: a callable arbitrary profile cannot be serialized");
                j = {{"variant", "arbitrary"},
                     {"params",
                      {{"x", std::vector<double>(p.table.xs().begin(), p.table.xs().end())},
                       {"b", std::vector<double>(p.table.ys().begin(), p.table.ys().end())}}}};
            }
        },
        t.profile);
    j["approx_mode"] = to_string(t.approx);
    return j;
}

inline json initial_json(const InitialCondition& ic)
{
    auto width = [](const std::optional<double>& w) { return w ? json(*w) : json(nullptr); };
    return std::visit(
        [&](const auto& v) -> json {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, initial::DamBreak>)
                return {{"type", "dam_break"}, {"rho_left", v.rho_left}, {"rho_right", v.rho_right},
                        {"smoothing_width", width(v.smoothing_width)}};
            else if constexpr (std::is_same_v<V, initial::Column>)
                return {{"type", "column"}, {"base", v.base}, {"peak", v.peak},
                        {"span", {v.span_lo, v.span_hi}}, {"smoothing_width", width(v.smoothing_width)}};
            else if constexpr (std::is_same_v<V, initial::SmoothCustom>)
                return {{"type", "smooth_custom"}, {"s", v.s}, {"rho", v.rho}, {"u", v.u}};
            else
                return {{"type", "wave"}, {"base", v.base}, {"amplitude", v.amplitude}, {"modes", v.modes}};
        },
        ic);
}

} // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& j)
{
    detail::Reader r(j, "");
    Scenario sc;

    const std::string scheme = r.string("scheme", "mass");
    if (scheme == "mass") sc.scheme = SchemeKind::mass;
    else if (scheme == "threelayer") sc.scheme = SchemeKind::threelayer;
    else throw ConfigError("scheme: expected 'mass' or 'threelayer', got '" + scheme + "'");

    const double s_length = r.number("s_length", 4.0);
    const double h = r.number("h", 0.04);
    sc.tau_ratio = r.number("tau_ratio", 0.05);
    detail::check(s_length > 0.0, "s_length", "must be positive");
    detail::check(h > 0.0, "h", "must be positive");
    detail::check(sc.tau_ratio > 0.0, "tau_ratio", "must be positive");
    sc.mesh = Mesh::uniform(s_length, h, sc.tau_ratio * h);

    sc.phys.alpha_sq = r.number("alpha_sq", 0.0);
    detail::check(sc.phys.alpha_sq >= 0.0, "alpha_sq", "must be non-negative");
    sc.phys.kappa = r.optional_number("kappa");
    detail::check(!sc.phys.kappa || *sc.phys.kappa > 0.0, "kappa", "must be positive");

    if (r.has("topography")) sc.topo = detail::parse_topography(r.child("topography"));

    const std::string boundary = r.string("boundary", "fixed_velocity");
    if (boundary == "fixed_velocity") sc.boundary = BoundaryMode::fixed_velocity;
    else if (boundary == "bottom_driven") sc.boundary = BoundaryMode::bottom_driven;
    else throw ConfigError("boundary: expected 'fixed_velocity' or 'bottom_driven', got '" + boundary + "'");

    sc.initial = detail::parse_initial(r.child("initial"));

    sc.visc.nu0 = r.number("nu0", 0.0);
    sc.visc.mu0 = r.number("mu0", 0.0);
    detail::check(sc.visc.nu0 >= 0.0, "nu0", "must be non-negative");
    detail::check(sc.visc.mu0 >= 0.0, "mu0", "must be non-negative");
    if (sc.scheme == SchemeKind::threelayer && !sc.visc.inviscid())
        throw ConfigError("nu0: the three-layer scheme has no pseudo-viscosity");

    if (r.has("newton")) {
        auto n = r.child("newton");
        sc.newton.tol = n.number("tol", sc.newton.tol);
        sc.newton.max_iters = n.integer("max_iters", sc.newton.max_iters);
        detail::check(sc.newton.tol > 0.0, "newton.tol", "must be positive");
        detail::check(sc.newton.max_iters >= 1, "newton.max_iters", "must be at least 1");
        n.finish();
    }

    sc.t_end = r.number("t_end");
    detail::check(sc.t_end >= 0.0 && std::isfinite(sc.t_end), "t_end", "must be non-negative");

    if (r.has("output")) {
        auto o = r.child("output");
        sc.output.dir = o.string("dir", "");
        sc.output.cadence = o.optional_number("cadence");
        detail::check(!sc.output.cadence || *sc.output.cadence > 0.0, "output.cadence", "must be positive");
        if (o.has("laws")) {
            const auto& arr = o.raw("laws");
            detail::check(arr.is_array(), "output.laws", "expected an array of law names");
            const Problem pb = sc.problem();
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const std::string path = "output.laws[" + std::to_string(i) + "]";
                detail::check(arr[i].is_string(), path, "expected a law name");
                const auto name = arr[i].get<std::string>();
                try {
                    require_applicable(find_law(name).id, sc.scheme, pb);
                } catch (const ConfigError& e) {
                    throw ConfigError(path + ": " + e.what());
                }
                sc.output.laws.push_back(name);
            }
        }
        const std::string sampling = o.string("energy_sampling", "left_node");
        if (sampling == "left_node") sc.output.energy_sampling = EnergySampling::left_node;
        else if (sampling == "node_average") sc.output.energy_sampling = EnergySampling::node_average;
        else throw ConfigError("output.energy_sampling: expected 'left_node' or 'node_average'");
        o.finish();
    }
    r.finish();

    try {
        sc.problem().validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    return sc;
}

inline Scenario parse_scenario(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    return scenario_from_json(j);
}

inline nlohmann::json scenario_to_json(const Scenario& sc)
{
    using nlohmann::json;
    json j;
    j["scheme"] = to_string(sc.scheme);
    j["s_length"] = sc.mesh.s_length;
    j["h"] = sc.mesh.h;
    j["tau_ratio"] = sc.tau_ratio;
    j["alpha_sq"] = sc.phys.alpha_sq;
    j["kappa"] = sc.phys.kappa ? json(*sc.phys.kappa) : json(nullptr);
    j["topography"] = detail::topography_json(sc.topo);
    j["boundary"] = to_string(sc.boundary);
    j["initial"] = detail::initial_json(sc.initial);
    j["nu0"] = sc.visc.nu0;
    j["mu0"] = sc.visc.mu0;
    j["newton"] = {{"tol", sc.newton.tol}, {"max_iters", sc.newton.max_iters}};
    j["t_end"] = sc.t_end;
    j["output"] = {{"dir", sc.output.dir},
                   {"cadence", sc.output.cadence ? json(*sc.output.cadence) : json(nullptr)},
                   {"laws", sc.output.laws},
                   {"energy_sampling", sc.output.energy_sampling == EnergySampling::left_node
                                           ? "left_node"
                                           : "node_average"}};
    return j;
}

inline std::string serialize_scenario(const Scenario& sc) { return scenario_to_json(sc).dump(2); }

/// Laws audited for a scenario: the configured list, or every applicable law.
inline std::vector<LawId> audited_laws(const Scenario& sc)
{
    if (sc.output.laws.empty()) return applicable_laws(sc.scheme, sc.problem());
    std::vector<LawId> ids;
    for (const auto& name : sc.output.laws) ids.push_back(find_law(name).id);
    return ids;
}

} // namespace swmhd
