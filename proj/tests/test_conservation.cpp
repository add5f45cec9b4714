#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "swmhd/swmhd.hpp"

using namespace swmhd;

namespace {

Problem problem(double alpha_sq, double s_length = 4.0, double h = 0.1)
{
    Problem pb;
    pb.mesh = Mesh::uniform(s_length, h, 0.05 * h);
    pb.phys.alpha_sq = alpha_sq;
    return pb;
}

std::vector<LayerState> mass_trajectory(const Problem& pb, const LayerState& s0, int steps)
{
    std::vector<LayerState> out{s0};
    MassStepper st(pb);
    for (int n = 0; n < steps; ++n) out.push_back(st.step(out.back()));
    return out;
}

std::vector<std::vector<double>> threelayer_trajectory(const Problem& pb, const LayerState& s0, int steps)
{
    auto s = bootstrap_second_layer(s0, pb.mesh, pb.phys, pb.topo, pb.boundary);
    std::vector<std::vector<double>> out{s.x_prev, s.x_curr};
    ThreeLayerStepper st(pb);
    for (int n = 0; n < steps; ++n) {
        s = st.step(s);
        out.push_back(s.x_curr);
    }
    return out;
}

Topography parabola(Topography::Profile p)
{
    Topography t;
    t.profile = std::move(p);
    t.approx = BottomApprox::multiplier_variant;
    return t;
}

} // namespace

TEST(TotalEnergy, UniformRestExamples)
{
    for (auto [a2, H] : {std::pair{1.6, 7.2}, std::pair{0.0, 4.0}}) {
        const auto pb = problem(a2);
        const auto s = init_dam_break(pb.mesh, pb.phys, 1.0, 1.0);
        EXPECT_NEAR(total_energy(s, pb.mesh, pb.phys, pb.topo), H, 1e-13);
        EXPECT_NEAR(total_momentum(s, pb.mesh), 0.0, 0.0);
        EXPECT_NEAR(total_mass(s), 4.0, 1e-13);
    }
}

TEST(TotalEnergy, SamplingOfKineticTerm)
{
    auto pb = problem(0.0, 1.0);
    auto s = init_dam_break(pb.mesh, pb.phys, 1.0, 1.0, 0.0);
    for (std::size_t i = 0; i < s.u.size(); ++i) s.u[i] = static_cast<double>(i);
    const double left = total_energy(s, pb.mesh, pb.phys, pb.topo, EnergySampling::left_node);
    const double avg = total_energy(s, pb.mesh, pb.phys, pb.topo, EnergySampling::node_average);
    // h sum (k^2/2) over k = 0..9 and h sum (k^2 + (k+1)^2)/4.
    EXPECT_NEAR(left - 1.0, 0.1 * 285.0 / 2.0, 1e-12);
    EXPECT_NEAR(avg - 1.0, 0.1 * (285.0 + 385.0) / 4.0, 1e-12);
}

TEST(EnergyLedger, DriftReport)
{
    EnergyLedger led;
    for (long n = 0; n <= 200; ++n) led.record(n, 0.01 * static_cast<double>(n), 1.0 - 1e-12 * static_cast<double>(n), 0, 0);
    auto d = drift_report(led);
    EXPECT_NEAR(d.max_err_R, 2e-10, 1e-15 * 200);
    EXPECT_EQ(d.worst_n, 200);
    EXPECT_TRUE(d.non_increasing);
    EXPECT_FALSE(d.exceeded);
    EXPECT_TRUE(drift_report(led, 1e-10).exceeded);

    EnergyLedger up;
    up.record(0, 0.0, 2.0, 0, 0);
    up.record(1, 0.1, 2.5, 0, 0);
    d = drift_report(up);
    EXPECT_FALSE(d.non_increasing);
    EXPECT_DOUBLE_EQ(d.max_err_A, 0.5);
    EXPECT_DOUBLE_EQ(d.max_err_R, 0.25);
}

TEST(EnergyLedger, ZeroReferenceUsesAbsoluteError)
{
    EnergyLedger led;
    led.record(0, 0.0, 0.0, 0, 0);
    led.record(1, 0.1, 1e-3, 0, 0);
    EXPECT_DOUBLE_EQ(led.records().back().err_R, 1e-3);
}

TEST(LawRegistry, LookupAndApplicability)
{
    EXPECT_EQ(find_law("center_of_mass").id, LawId::center_of_mass);
    EXPECT_THROW(find_law("angular_momentum"), ConfigError);

    auto pb = problem(1.6);
    EXPECT_EQ(applicable_laws(SchemeKind::mass, pb).size(), 4u);
    pb.visc = {1.0, 3.0};
    EXPECT_EQ(applicable_laws(SchemeKind::mass, pb), std::vector<LawId>{LawId::mass});
    EXPECT_EQ(applicable_laws(SchemeKind::threelayer, pb).size(), 4u);

    pb.visc = {};
    pb.topo.profile = bottom::Inclined{-0.1};
    EXPECT_TRUE(inapplicable_reason(LawId::momentum, SchemeKind::mass, pb));
    EXPECT_FALSE(inapplicable_reason(LawId::energy, SchemeKind::mass, pb));
    EXPECT_THROW(require_applicable(LawId::exp_plus, SchemeKind::mass, pb), ConfigError);

    pb.topo = parabola(bottom::ParabolicUp{1.0, 0.0});
    EXPECT_TRUE(inapplicable_reason(LawId::energy, SchemeKind::mass, pb));
    EXPECT_FALSE(inapplicable_reason(LawId::exp_minus, SchemeKind::mass, pb));
    EXPECT_TRUE(inapplicable_reason(LawId::sin, SchemeKind::mass, pb));
    EXPECT_FALSE(law_computable(LawId::cos, pb));
}

TEST(LawResiduals, UniformRestTrajectoryIsExact)
{
    auto pb = problem(1.6, 4.0, 0.0625);
    const auto s0 = init_dam_break(pb.mesh, pb.phys, 0.5, 0.5);
    const auto traj = mass_trajectory(pb, s0, 5);
    for (auto id : {LawId::mass, LawId::momentum, LawId::center_of_mass, LawId::energy})
        EXPECT_EQ(residual_scan(id, traj, pb).max_residual, 0.0) << law(id).name;
}

TEST(LawResiduals, MassSchemeIdentities)
{
    // On any iterate: mass-law residual = -f1 / (tau rho rho'), and with
    // omega = 0 on a flat bottom the momentum residual = f2/tau - D(f6).
    auto pb = problem(1.6, 1.0);
    std::mt19937_64 rng(9);
    const auto prev = oracle::random_layer(pb.mesh, pb.phys.alpha_sq, rng);
    auto cur = oracle::random_layer(pb.mesh, pb.phys.alpha_sq, rng);
    cur.step = prev.step + 1;
    cur.t = prev.t + pb.mesh.tau;
    const auto it = to_iterate(cur);
    const auto f = mass_residuals(prev, it, pb, compression_switches(it.u));
    const double tau = pb.mesh.tau, h = pb.mesh.h;

    const auto rm = mass_law_residual(LawId::mass, prev, cur, pb);
    for (std::size_t i = 0; i < rm.size(); ++i)
        EXPECT_NEAR(rm[i], -f.f1[i] / (tau * cur.rho[i] * prev.rho[i]), 1e-11 * (1.0 + std::abs(rm[i])));

    const auto rp = mass_law_residual(LawId::momentum, prev, cur, pb);
    for (std::size_t k = 0; k < rp.size(); ++k) {
        const std::size_t i = k + 1;
        const double expect = f.f2[i] / tau - (f.f6[i] - f.f6[i - 1]) / h;
        EXPECT_NEAR(rp[k], expect, 1e-10 * (1.0 + std::abs(expect)));
    }
}

TEST(LawResiduals, MassSchemeDamBreak)
{
    auto pb = problem(1.6);
    const auto s0 = init_dam_break(pb.mesh, pb.phys, 1.0, 0.5);
    const auto traj = mass_trajectory(pb, s0, 40);
    for (auto id : {LawId::mass, LawId::momentum, LawId::center_of_mass, LawId::energy})
        EXPECT_LE(residual_scan(id, traj, pb).max_residual, 1e-10) << law(id).name;

    pb.visc = {1.0, 3.0};
    const auto viscous = mass_trajectory(pb, s0, 40);
    EXPECT_LE(residual_scan(LawId::mass, viscous, pb).max_residual, 1e-10);
    EXPECT_THROW(residual_scan(LawId::momentum, viscous, pb), ConfigError);
    double broken = 0.0;
    for (std::size_t n = 1; n < viscous.size(); ++n)
        broken = std::max(broken, oracle::max_abs(mass_law_residual(LawId::momentum, viscous[n - 1], viscous[n], pb)));
    EXPECT_GT(broken, 1e-6);
}

TEST(LawResiduals, MassSchemeParabolicBottoms)
{
    auto pb = problem(1.6);
    pb.topo = parabola(bottom::ParabolicUp{1.0, 2.0});
    pb.boundary = BoundaryMode::bottom_driven;
    const auto s0 = init_wave(pb.mesh, pb.phys, {1.0, 0.05, 1});
    const auto up = mass_trajectory(pb, s0, 40);
    for (auto id : {LawId::mass, LawId::exp_plus, LawId::exp_minus})
        EXPECT_LE(residual_scan(id, up, pb).max_residual, 1e-10) << law(id).name;

    pb.topo = parabola(bottom::ParabolicDown{1.0, 2.0});
    const auto down = mass_trajectory(pb, s0, 40);
    for (auto id : {LawId::sin, LawId::cos}) EXPECT_LE(residual_scan(id, down, pb).max_residual, 1e-10) << law(id).name;
}

TEST(LawResiduals, ThreeLayerScheme)
{
    auto pb = problem(1.6);
    const auto s0 = init_wave(pb.mesh, pb.phys, {1.0, 0.1, 1});
    const auto xs = threelayer_trajectory(pb, s0, 40);
    // Residuals divide by tau, so the floor here is eps |x| / tau^2 ~ 1e-10.
    for (auto id : {LawId::mass, LawId::momentum, LawId::center_of_mass, LawId::energy})
        EXPECT_LE(residual_scan(id, xs, 0.0, pb).max_residual, 1e-8) << law(id).name;
    EXPECT_THROW(residual_scan(LawId::energy, std::span(xs).first(2), 0.0, pb), ConfigError);
}

TEST(LawMonitor, RejectsWrongFeed)
{
    const auto pb = problem(1.6);
    LawMonitor mass(SchemeKind::mass, pb, {LawId::mass});
    const std::vector<double> x(41, 0.0);
    EXPECT_THROW(mass.feed(x, x, x, 0.0, 2), ConfigError);
    auto incl = pb;
    incl.topo.profile = bottom::Inclined{-0.1};
    EXPECT_THROW(LawMonitor(SchemeKind::mass, incl, {LawId::momentum}), ConfigError);
    EXPECT_NO_THROW(LawMonitor(SchemeKind::mass, incl, {LawId::momentum}, false));
    EXPECT_THROW(LawMonitor(SchemeKind::mass, incl, {LawId::sin}, false), ConfigError);
}
