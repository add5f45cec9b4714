#include <cmath>

#include <gtest/gtest.h>

#include "swmhd/swmhd.hpp"

using namespace swmhd;

namespace {

const Mesh mesh = Mesh::uniform(4.0, 0.1, 0.005);
const PhysParams phys{1.6, 2.0, std::nullopt};

// Sharp dam-break profile translated rigidly by c t.
std::vector<LayerState> sliding_step(double c, int frames)
{
    std::vector<LayerState> out;
    for (int k = 0; k < frames; ++k) {
        auto s = init_dam_break(mesh, phys, 1.0, 0.5, 0.0);
        s.t = 0.1 * k;
        s.step = 20 * k;
        for (auto& x : s.x) x += c * s.t;
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace

TEST(RankineHugoniot, Examples)
{
    EXPECT_NEAR(rankine_hugoniot_speed(1.6, 2.0, 0.5), std::sqrt(7.4), 1e-15);
    EXPECT_NEAR(rankine_hugoniot_speed(0.0, 2.0, 0.5), 1.0, 1e-15);
    EXPECT_THROW(rankine_hugoniot_speed(1.6, 2.0, 0.0), ConfigError);
}

TEST(TransverseFields, Examples)
{
    auto f1 = [](double z) { return std::sin(z); };
    auto f2 = [](double z) { return 0.5 * z * z; };
    const auto r = transverse_fields(f1, f2, 2.0, 0.0, 1.0);
    EXPECT_NEAR(r.v, 2.0 * (std::sin(1.0) + 0.5), 1e-15);
    EXPECT_NEAR(r.Hy, std::sin(1.0) - 0.5, 1e-15);
    const auto z = transverse_fields(f1, f1, 0.0, 3.0, 0.7);
    EXPECT_EQ(z.v, 0.0);
    EXPECT_EQ(z.Hy, 0.0);
}

TEST(TransverseFields, SolvesTheWaveSystem)
{
    auto f1 = [](double z) { return std::exp(-z * z); };
    auto f2 = [](double z) { return std::cos(2.0 * z); };
    const double alpha = 1.3, d = 1e-5;
    for (double t : {0.0, 0.4, 1.1})
        for (double s : {-0.5, 0.2, 1.7}) {
            auto at = [&](double tt, double ss) { return transverse_fields(f1, f2, alpha, tt, ss); };
            const double v_t = (at(t + d, s).v - at(t - d, s).v) / (2 * d);
            const double v_s = (at(t, s + d).v - at(t, s - d).v) / (2 * d);
            const double H_t = (at(t + d, s).Hy - at(t - d, s).Hy) / (2 * d);
            const double H_s = (at(t, s + d).Hy - at(t, s - d).Hy) / (2 * d);
            EXPECT_NEAR(v_t, alpha * alpha * H_s, 1e-8);
            EXPECT_NEAR(H_t, v_s, 1e-8);
        }
}

TEST(MagneticGradient, Examples)
{
    auto s = init_dam_break(mesh, phys, 1.0, 0.5, 0.0);
    const auto B = magnetic_gradient(s, mesh, 0.5);
    ASSERT_EQ(B.size(), 39u);
    // Jump 1/0.5 - 1/1 across node 20, entry 19.
    EXPECT_NEAR(B[19], 0.5 * 1.0 / 0.1, 1e-12);
    for (std::size_t i = 0; i < B.size(); ++i)
        if (i != 19) {
            EXPECT_EQ(B[i], 0.0);
        }
    EXPECT_NEAR(default_kappa(s, mesh), 0.1, 1e-15);

    const auto flat = init_dam_break(mesh, phys, 0.8, 0.8);
    for (double b : magnetic_gradient(flat, mesh, 1.0)) EXPECT_EQ(b, 0.0);
    EXPECT_EQ(default_kappa(flat, mesh), 1.0);
}

TEST(FrontPosition, SharpAndSmeared)
{
    const auto s = init_dam_break(mesh, phys, 1.0, 0.5, 0.0);
    const auto f = front_position(s, 0.05);
    ASSERT_TRUE(f);
    EXPECT_EQ(f->node, 20u);
    EXPECT_DOUBLE_EQ(f->jump, 0.5);
    // Cell centres 1.95 and 2.1 in x; 90 % of the way across.
    const double c19 = 0.5 * (s.x[19] + s.x[20]), c20 = 0.5 * (s.x[20] + s.x[21]);
    EXPECT_NEAR(c20 - c19, 0.15, 1e-13);
    EXPECT_NEAR(f->x, 1.95 + 0.9 * 0.15, 1e-13);

    const auto smooth = init_dam_break(mesh, phys, 1.0, 0.5, 0.3);
    const auto g = front_position(smooth, 0.05);
    ASSERT_TRUE(g);
    EXPECT_GT(g->x, f->x);

    EXPECT_FALSE(front_position(init_dam_break(mesh, phys, 0.8, 0.8), 0.05));
    EXPECT_FALSE(front_position(s, 0.0));
}

TEST(LeastSquares, ExactLineAndErrors)
{
    const std::vector<double> t{0.0, 1.0, 2.0, 3.0}, y{1.0, 3.5, 6.0, 8.5};
    const auto f = least_squares_line(t, y);
    EXPECT_NEAR(f.slope, 2.5, 1e-14);
    EXPECT_NEAR(f.intercept, 1.0, 1e-14);
    EXPECT_NEAR(f.rms, 0.0, 1e-14);
    EXPECT_EQ(f.points, 4u);
    EXPECT_THROW(least_squares_line(std::vector<double>{1.0}, std::vector<double>{1.0}), ConfigError);
    EXPECT_THROW(least_squares_line(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 2.0}), ConfigError);
}

TEST(ShockSpeed, RecoversSyntheticSpeed)
{
    const auto traj = sliding_step(2.5, 11);
    const auto s = shock_speed_estimate(traj, 0.1, 0.9, 1.0, 0.5);
    EXPECT_NEAR(s.speed, 2.5, 1e-12);
    EXPECT_LE(s.rms, 1e-12);
    EXPECT_EQ(s.samples, 9u);
    EXPECT_THROW(shock_speed_estimate(traj, 0.9, 0.1, 1.0, 0.5), ConfigError);
    EXPECT_THROW(shock_speed_estimate(traj, 0.95, 0.99, 1.0, 0.5), ConfigError);
}

TEST(CompareRuns, IdenticalAndShifted)
{
    const auto a = sliding_step(2.5, 6);
    auto c = compare_runs(a, a, 0.31, 0.05);
    EXPECT_DOUBLE_EQ(c.t_a, 0.3);
    EXPECT_EQ(c.front_delta, 0.0);
    EXPECT_EQ(c.max_rho_delta, 0.0);
    EXPECT_EQ(c.peak_delta, 0.0);

    const auto b = sliding_step(1.0, 6);
    c = compare_runs(a, b, 0.5, 0.05);
    EXPECT_NEAR(c.front_delta, 1.5 * 0.5, 1e-12);
    EXPECT_EQ(c.max_rho_delta, 0.0);

    const std::vector<LayerState> other{init_dam_break(Mesh::uniform(2.0, 0.1, 0.005), phys, 1.0, 0.5)};
    EXPECT_THROW(compare_runs(a, other, 0.0, 0.05), ConfigError);
    EXPECT_THROW(nearest_snapshot(std::vector<LayerState>{}, 0.0), ConfigError);
}
