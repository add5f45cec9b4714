#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "swmhd/core.hpp"

using namespace swmhd;

namespace {

const PhysParams field{1.6, 2.0, std::nullopt};

// x'' = a(x) integrated over one step with classical RK4 on fine substeps.
std::vector<double> rk4_reference(const LayerState& s, double h, double alpha_sq, double tau, int sub)
{
    const std::size_t n = s.x.size();
    std::vector<double> x = s.x, v = s.u;
    const double dt = tau / sub;
    auto acc = [&](const std::vector<double>& y) { return oracle::continuous_acceleration(y, h, alpha_sq, 0.0); };
    auto axpy = [n](const std::vector<double>& a, double c, const std::vector<double>& b) {
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = a[i] + c * b[i];
        return r;
    };
    for (int k = 0; k < sub; ++k) {
        const auto k1x = v, k1v = acc(x);
        const auto k2x = axpy(v, dt / 2, k1v), k2v = acc(axpy(x, dt / 2, k1x));
        const auto k3x = axpy(v, dt / 2, k2v), k3v = acc(axpy(x, dt / 2, k2x));
        const auto k4x = axpy(v, dt, k3v), k4v = acc(axpy(x, dt, k3x));
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += dt / 6 * (k1x[i] + 2 * k2x[i] + 2 * k3x[i] + k4x[i]);
            v[i] += dt / 6 * (k1v[i] + 2 * k2v[i] + 2 * k3v[i] + k4v[i]);
        }
    }
    return x;
}

} // namespace

TEST(Mesh, Uniform)
{
    const auto m = Mesh::uniform(4.0, 0.04, 0.002);
    EXPECT_EQ(m.n_cells, 100u);
    EXPECT_EQ(m.n_nodes(), 101u);
    EXPECT_DOUBLE_EQ(m.cell_s(0), 0.02);
    EXPECT_THROW(Mesh::uniform(4.0, 0.0, 0.1), ConfigError);
    EXPECT_THROW(Mesh::uniform(4.0, 0.1, -1.0), ConfigError);
    EXPECT_THROW(Mesh::uniform(0.1, 0.1, 0.1), ConfigError);
}

TEST(Viscosity, Coefficients)
{
    const ViscosityParams v{1.0, 3.0};
    EXPECT_DOUBLE_EQ(v.nu(0.04), 0.04);
    EXPECT_NEAR(v.mu(0.1), 3.0 / (2.0 * M_PI * M_PI) * 9.0 * 0.01, 1e-16);
    EXPECT_FALSE(v.inviscid());
    EXPECT_TRUE(ViscosityParams{}.inviscid());
}

TEST(InitDamBreak, SharpStep)
{
    const auto m = Mesh::uniform(4.0, 0.1, 0.005);
    const auto s = init_dam_break(m, field, 1.0, 0.5, 0.0);
    for (std::size_t i = 0; i < m.n_cells; ++i) EXPECT_EQ(s.rho[i], m.cell_s(i) < 2.0 ? 1.0 : 0.5);
    EXPECT_EQ(s.x[0], 0.0);
    EXPECT_NEAR(s.x[m.n_cells], 2.0 + 4.0, 1e-12);
    EXPECT_FALSE(check_layer(s));
}

TEST(InitDamBreak, UniformState)
{
    const auto m = Mesh::uniform(4.0, 0.1, 0.005);
    for (std::optional<double> w : {std::optional<double>{}, std::optional<double>{0.3}}) {
        const auto s = init_dam_break(m, field, 1.0, 1.0, w);
        for (std::size_t i = 0; i <= m.n_cells; ++i) EXPECT_NEAR(s.x[i], static_cast<double>(i) * 0.1, 1e-13);
        EXPECT_NEAR(s.x[40], 4.0, 1e-13);
        for (double r : s.rho) EXPECT_EQ(r, 1.0);
    }
}

TEST(InitDamBreak, FieldsOnTheLayer)
{
    const auto m = Mesh::uniform(4.0, 0.1, 0.005);
    const auto s = init_dam_break(m, field, 1.0, 0.5);
    for (std::size_t i = 0; i < m.n_cells; ++i) {
        EXPECT_EQ(s.p_root[i], s.rho[i]);
        EXPECT_EQ(s.omega[i], 0.0);
        EXPECT_DOUBLE_EQ(s.theta[i], compute_Q(s.rho[i], s.rho[i], s.rho[i], 1.6));
    }
    for (double u : s.u) EXPECT_EQ(u, 0.0);
    EXPECT_THROW(init_dam_break(m, field, 1.0, -0.5), ConfigError);
}

TEST(InitColumn, Examples)
{
    const auto m = Mesh::uniform(4.0, 0.1, 0.005);
    const auto s = init_column(m, field, 0.5, 1.0, 1.0, 2.0, 0.0);
    EXPECT_EQ(s.rho[15], 1.0);  // cell centre 1.55
    EXPECT_EQ(s.rho[30], 0.5);  // cell centre 3.05
    const auto flat = init_column(m, field, 0.7, 0.7, 1.0, 2.0);
    for (double r : flat.rho) EXPECT_DOUBLE_EQ(r, 0.7);
    const auto full = init_column(m, field, 0.5, 1.0, 0.0, 4.0);
    for (double r : full.rho) EXPECT_DOUBLE_EQ(r, 1.0);
    EXPECT_THROW(init_column(m, field, 0.5, 1.0, 2.0, 1.0), ConfigError);
}

TEST(InitWave, SmoothProfile)
{
    const auto m = Mesh::uniform(4.0, 0.1, 0.005);
    const auto s = init_wave(m, field, {1.0, 0.05, 1});
    EXPECT_NEAR(s.rho[0], 1.0 + 0.05 * std::cos(2 * M_PI * 0.05 / 4.0), 1e-15);
    EXPECT_THROW(init_wave(m, field, {1.0, 1.5, 1}), ConfigError);
}

TEST(InitSmoothCustom, InterpolatesTable)
{
    const auto m = Mesh::uniform(4.0, 0.1, 0.005);
    initial::SmoothCustom t{{0.0, 2.0, 4.0}, {1.0, 1.0, 1.0}, {0.0, 0.5, 1.0}};
    const auto s = init_smooth_custom(m, field, t);
    for (double r : s.rho) EXPECT_NEAR(r, 1.0, 1e-14);
    EXPECT_NEAR(s.u[20], 0.5, 1e-14);
}

TEST(CheckLayer, FlagsInvariants)
{
    const auto m = Mesh::uniform(1.0, 0.1, 0.005);
    auto s = init_dam_break(m, field, 1.0, 1.0);
    EXPECT_FALSE(check_layer(s));
    auto bad = s;
    bad.rho[3] = -1.0;
    EXPECT_EQ(check_layer(bad)->index, 3u);
    bad = s;
    bad.p_root[4] = 0.4;  // 2P - rho < 0
    EXPECT_EQ(check_layer(bad)->index, 4u);
    bad = s;
    bad.x[6] = bad.x[5];
    EXPECT_EQ(check_layer(bad)->index, 5u);
}

TEST(Bootstrap, EquilibriumAndTranslation)
{
    const auto m = Mesh::uniform(4.0, 0.1, 0.005);
    auto s = init_dam_break(m, field, 0.8, 0.8);
    auto b = bootstrap_second_layer(s, m, field, Topography{});
    EXPECT_EQ(b.step, 1);
    EXPECT_DOUBLE_EQ(b.t, 0.005);
    EXPECT_LE(oracle::max_abs_diff(b.x_curr, s.x), 1e-13);
    for (auto& u : s.u) u = 0.3;
    b = bootstrap_second_layer(s, m, field, Topography{});
    for (std::size_t i = 0; i < s.x.size(); ++i) EXPECT_NEAR(b.x_curr[i], s.x[i] + 0.005 * 0.3, 1e-13);
}

TEST(Bootstrap, ThirdOrderAgainstRk4)
{
    const auto m = Mesh::uniform(4.0, 0.1, 0.005);
    auto s = init_dam_break(m, field, 1.0, 0.5, 0.4);
    for (std::size_t i = 0; i < s.u.size(); ++i) s.u[i] = 0.2 * std::sin(m.node_s(i));
    s.u.front() = s.u.back() = 0.0;
    double prev = 0.0;
    for (int k = 0; k < 4; ++k) {
        Mesh mk = m;
        mk.tau = 0.01 / std::ldexp(1.0, k);
        const auto b = bootstrap_second_layer(s, mk, field, Topography{});
        const auto ref = rk4_reference(s, m.h, field.alpha_sq, mk.tau, 64);
        const double err = oracle::max_abs_diff(b.x_curr, ref);
        EXPECT_LE(err, 5.0 * std::pow(mk.tau, 3.0) * 1e3);
        if (k > 0) {
            EXPECT_NEAR(std::log2(prev / err), 3.0, 0.3);
        }
        prev = err;
    }
}

TEST(Bootstrap, BottomDrivenEnds)
{
    const auto m = Mesh::uniform(4.0, 0.1, 0.005);
    const auto s = init_dam_break(m, field, 0.8, 0.8);
    Topography incl;
    incl.profile = bottom::Inclined{-0.1};
    const auto fixed = bootstrap_second_layer(s, m, field, incl);
    EXPECT_DOUBLE_EQ(fixed.x_curr[0], s.x[0]);
    const auto driven = bootstrap_second_layer(s, m, field, incl, BoundaryMode::bottom_driven);
    for (std::size_t i = 0; i < s.x.size(); ++i)
        EXPECT_NEAR(driven.x_curr[i], s.x[i] - 0.5 * 0.1 * 0.005 * 0.005, 1e-13);
}

TEST(Problem, Validation)
{
    Problem pb;
    pb.phys.alpha_sq = -1.0;
    EXPECT_THROW(pb.validate(), ConfigError);
    pb.phys.alpha_sq = 0.0;
    pb.visc.nu0 = -1.0;
    EXPECT_THROW(pb.validate(), ConfigError);
    pb.visc.nu0 = 0.0;
    EXPECT_NO_THROW(pb.validate());
    EXPECT_DOUBLE_EQ(pb.secant_eps(), 1e-10 * pb.mesh.h);
}
