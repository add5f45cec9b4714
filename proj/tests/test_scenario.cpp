#include <filesystem>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "swmhd/swmhd.hpp"

using namespace swmhd;
using nlohmann::json;

namespace {

json dam_break()
{
    return json::parse(R"({
      "scheme": "mass", "s_length": 4.0, "h": 0.04, "tau_ratio": 0.05, "alpha_sq": 1.6,
      "topography": {"variant": "flat", "params": {"level": 0.0}, "approx_mode": "energy_variant"},
      "boundary": "fixed_velocity",
      "initial": {"type": "dam_break", "rho_left": 1.0, "rho_right": 0.5},
      "nu0": 1.0, "mu0": 3.0, "t_end": 0.92, "output": {"cadence": 0.02}
    })");
}

std::string error_of(const json& j)
{
    try {
        scenario_from_json(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(Scenario, DamBreakConfig)
{
    const auto sc = scenario_from_json(dam_break());
    EXPECT_EQ(sc.scheme, SchemeKind::mass);
    EXPECT_EQ(sc.mesh.n_cells, 100u);
    EXPECT_DOUBLE_EQ(sc.mesh.tau, 0.002);
    EXPECT_EQ(sc.n_steps(), 460);
    EXPECT_EQ(sc.cadence_steps(), 10);
    const auto& d = std::get<initial::DamBreak>(sc.initial);
    EXPECT_EQ(d.rho_left, 1.0);
    EXPECT_EQ(d.rho_right, 0.5);
    EXPECT_FALSE(d.smoothing_width);
    EXPECT_DOUBLE_EQ(sc.visc.nu(sc.mesh.h), 0.04);
}

TEST(Scenario, Defaults)
{
    const auto sc = scenario_from_json(json::parse(R"({"initial": {"type": "wave"}, "t_end": 1.0})"));
    EXPECT_EQ(sc.scheme, SchemeKind::mass);
    EXPECT_DOUBLE_EQ(sc.mesh.h, 0.04);
    EXPECT_DOUBLE_EQ(sc.tau_ratio, 0.05);
    EXPECT_TRUE(sc.visc.inviscid());
    EXPECT_EQ(sc.topo.kind(), TopoKind::flat);
    EXPECT_EQ(sc.boundary, BoundaryMode::fixed_velocity);
    EXPECT_EQ(sc.cadence_steps(), 10);  // t_end / 50
    EXPECT_EQ(audited_laws(sc).size(), 4u);
}

TEST(Scenario, ErrorsNameTheKey)
{
    auto j = dam_break();
    j["tau_ratio"] = 0.0;
    EXPECT_NE(error_of(j).find("tau_ratio"), std::string::npos);

    j = dam_break();
    j["initial"]["rho_rigth"] = 0.5;
    EXPECT_NE(error_of(j).find("initial.rho_rigth: unknown key"), std::string::npos);

    j = dam_break();
    j["topography"]["params"]["slope"] = 1.0;
    EXPECT_NE(error_of(j).find("topography.params.slope: unknown key"), std::string::npos);

    j = dam_break();
    j["topography"] = {{"variant", "inclined"}};
    EXPECT_NE(error_of(j).find("topography.params.slope: missing required key"), std::string::npos);

    j = dam_break();
    j.erase("t_end");
    EXPECT_NE(error_of(j).find("t_end"), std::string::npos);

    j = dam_break();
    j["scheme"] = "threelayer";
    EXPECT_NE(error_of(j).find("pseudo-viscosity"), std::string::npos);

    j = dam_break();
    j["output"]["laws"] = {"mass", "exp_plus"};
    EXPECT_NE(error_of(j).find("output.laws[1]"), std::string::npos);

    j = dam_break();
    j["initial"]["type"] = "tsunami";
    EXPECT_NE(error_of(j).find("unknown initial condition"), std::string::npos);

    EXPECT_THROW(parse_scenario("{not json"), ConfigError);
}

TEST(Scenario, RoundTrip)
{
    auto j = dam_break();
    j["topography"] = {{"variant", "parabolic_down"},
                       {"params", {{"k", 2.0}, {"center", 1.5}}},
                       {"approx_mode", "multiplier_variant"}};
    j["boundary"] = "bottom_driven";
    j["nu0"] = 0.0;
    j["mu0"] = 0.0;
    j["kappa"] = 0.3;
    j["output"]["laws"] = {"mass", "sin"};
    const auto sc = scenario_from_json(j);
    const auto back = parse_scenario(serialize_scenario(sc));
    EXPECT_TRUE(back == sc);
    EXPECT_EQ(audited_laws(back), (std::vector<LawId>{LawId::mass, LawId::sin}));

    Scenario column = sc;
    column.initial = initial::Column{0.5, 1.0, 1.5, 2.5, 0.05};
    column.scheme = SchemeKind::threelayer;
    EXPECT_TRUE(parse_scenario(serialize_scenario(column)) == column);
}

TEST(Scenario, ShippedConfigsLoad)
{
    const std::filesystem::path dir = std::filesystem::path(SWMHD_SOURCE_DIR) / "configs";
    int count = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().extension() != ".json") continue;
        EXPECT_NO_THROW(load_scenario(e.path())) << e.path();
        ++count;
    }
    EXPECT_GE(count, 8);
}

TEST(Scenario, OutputDirectoryResolution)
{
    auto sc = scenario_from_json(dam_break());
    setenv("SWMHD_OUTPUT_ROOT", "/tmp/swmhd_root", 1);
    EXPECT_EQ(resolve_output_dir(sc, "configs/dam_break_magnetic.json"),
              std::filesystem::path("/tmp/swmhd_root/runs/dam_break_magnetic"));
    sc.output.dir = "custom";
    EXPECT_EQ(resolve_output_dir(sc, "x.json"), std::filesystem::path("/tmp/swmhd_root/custom"));
    sc.output.dir = "/abs/out";
    EXPECT_EQ(resolve_output_dir(sc, "x.json"), std::filesystem::path("/abs/out"));
    unsetenv("SWMHD_OUTPUT_ROOT");
}
