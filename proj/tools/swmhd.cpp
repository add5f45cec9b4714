// swmhd command-line driver.
//
//   swmhd run <config> [--out DIR]
//   swmhd verify-cl <config|run-dir>
//   swmhd convergence <config> --levels K
//   swmhd shock-speed <run-dir> [--from T0] [--to T1]
//   swmhd compare <run-dir-a> <run-dir-b> --t T
//
// Exit status: 0 success, 1 step failure or failed audit, 2 usage or
// configuration error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "swmhd/swmhd.hpp"

namespace fs = std::filesystem;
using namespace swmhd;

namespace {

enum Exit { exit_ok = 0, exit_failed = 1, exit_usage = 2 };

void print_laws(const std::vector<LawReport>& laws, SchemeKind scheme, const Problem& pb)
{
    std::printf("%-16s %-22s %-12s %-14s %s\n", "law", "multiplier", "max|resid|", "worst (n, i)", "status");
    for (const auto& l : laws) {
        const auto why = inapplicable_reason(l.id, scheme, pb);
        const std::string where = l.scan.step < 0
            ? "-"
            : "(" + std::to_string(l.scan.step) + ", " + std::to_string(l.scan.index) + ")";
        const std::string status = why ? "not expected to hold: " + *why : (l.passed() ? "PASS" : "FAIL");
        std::printf("%-16s %-22s %-12.3e %-14s %s\n", std::string(law(l.id).name).c_str(),
                    std::string(law(l.id).multiplier).c_str(), l.scan.max_residual, where.c_str(),
                    status.c_str());
    }
}

bool expected_laws_pass(const std::vector<LawReport>& laws, SchemeKind scheme, const Problem& pb)
{
    for (const auto& l : laws)
        if (!inapplicable_reason(l.id, scheme, pb) && !l.passed()) return false;
    return true;
}

int cmd_run(const std::string& config, const std::string& out)
{
    const Scenario sc = load_scenario(config);
    const fs::path dir = out.empty() ? resolve_output_dir(sc, config) : fs::path(out);
    const auto r = simulate(sc);
    write_run_directory(dir, sc, r);

    std::printf("run directory: %s\n", dir.string().c_str());
    std::printf("steps: %ld  t: %.6g  newton iterations: max %d, total %ld\n", r.steps,
                static_cast<double>(r.steps) * sc.mesh.tau, r.newton_max, r.newton_total);
    if (!r.ledger.empty()) {
        const auto d = drift_report(r.ledger);
        std::printf("energy drift: max err_A %.3e  max err_R %.3e\n", d.max_err_A, d.max_err_R);
    }
    print_laws(r.laws, sc.scheme, sc.problem());
    if (r.failure) {
        std::fprintf(stderr, "step failure (%s) at step %ld, node %zu: %s\n", to_string(r.failure->kind),
                     r.failure->step, r.failure->node, r.failure->message.c_str());
        return exit_failed;
    }
    return r.audits_passed() ? exit_ok : exit_failed;
}

std::vector<LawId> computable_laws(const Problem& pb)
{
    std::vector<LawId> ids;
    for (const auto& l : law_registry())
        if (law_computable(l.id, pb)) ids.push_back(l.id);
    return ids;
}

int cmd_verify(const std::string& target)
{
    if (fs::is_directory(target)) {
        const auto run = load_run_directory(target);
        const auto& sc = run.scenario;
        const Problem pb = sc.problem();
        const auto& snaps = run.snapshots;
        for (std::size_t k = 1; k < snaps.size(); ++k)
            if (snaps[k].step != snaps[k - 1].step + 1)
                throw ConfigError(target + ": snapshots are not consecutive layers; rerun with "
                                           "output.cadence equal to tau");
        LawMonitor mon(sc.scheme, pb, computable_laws(pb), false);
        if (sc.scheme == SchemeKind::mass) {
            for (std::size_t k = 1; k < snaps.size(); ++k) mon.feed(snaps[k - 1], snaps[k]);
        } else {
            for (std::size_t k = 1; k + 1 < snaps.size(); ++k)
                mon.feed(snaps[k - 1].x, snaps[k].x, snaps[k + 1].x, snaps[k].t, snaps[k + 1].step);
        }
        std::vector<LawReport> laws;
        for (std::size_t k = 0; k < mon.laws().size(); ++k)
            laws.push_back({mon.laws()[k], mon.results()[k], 100.0 * sc.newton.tol});
        print_laws(laws, sc.scheme, pb);
        return expected_laws_pass(laws, sc.scheme, pb) ? exit_ok : exit_failed;
    }

    const Scenario sc = load_scenario(target);
    SimulateOptions opt;
    opt.keep_snapshots = false;
    opt.laws = computable_laws(sc.problem());
    opt.include_inapplicable = true;
    const auto r = simulate(sc, opt);
    print_laws(r.laws, sc.scheme, sc.problem());
    if (r.failure) {
        std::fprintf(stderr, "step failure at step %ld: %s\n", r.failure->step, r.failure->message.c_str());
        return exit_failed;
    }
    return expected_laws_pass(r.laws, sc.scheme, sc.problem()) ? exit_ok : exit_failed;
}

int cmd_convergence(const std::string& config, int levels)
{
    const Scenario sc = load_scenario(config);
    const auto table = observed_order(sc, levels);
    std::printf("%-12s %-12s %-8s %-14s %s\n", "h", "tau", "steps", "max|dx|", "order");
    for (std::size_t k = 0; k < table.levels.size(); ++k) {
        const auto& l = table.levels[k];
        // Difference k compares levels k and k+1; order k-1 uses d_{k-1}/d_k.
        char d[32] = "", o[32] = "";
        if (k < table.differences.size()) std::snprintf(d, sizeof d, "%.6e", table.differences[k]);
        if (k >= 1 && k - 1 < table.orders.size()) std::snprintf(o, sizeof o, "%.4f", table.orders[k - 1]);
        std::printf("%-12.6g %-12.6g %-8ld %-14s %s\n", l.h, l.tau, l.steps, d, o);
    }
    if (table.exact) std::printf("order: exact (differences at round-off)\n");
    else std::printf("order (finest pair): %.4f\n", table.finest_order());
    return exit_ok;
}

int cmd_shock_speed(const std::string& dir, double from, std::optional<double> to)
{
    const auto run = load_run_directory(dir);
    const auto* d = std::get_if<initial::DamBreak>(&run.scenario.initial);
    if (!d) throw ConfigError(dir + ": shock-speed needs a dam-break run");
    if (run.snapshots.empty()) throw ConfigError(dir + ": no snapshots");
    const double t_hi = to.value_or(run.snapshots.back().t);
    const auto s = shock_speed_estimate(run.snapshots, from, t_hi, d->rho_left, d->rho_right);
    const double D = rankine_hugoniot_speed(run.scenario.phys.alpha_sq, run.scenario.phys.g1,
                                            std::min(d->rho_left, d->rho_right));
    nlohmann::json j = {{"speed", s.speed},      {"fit_rms", s.rms},        {"samples", s.samples},
                        {"window", {from, t_hi}}, {"rankine_hugoniot_speed", D}, {"ratio", s.speed / D}};
    std::cout << j.dump(2) << '\n';
    return exit_ok;
}

int cmd_compare(const std::string& a, const std::string& b, double t)
{
    const auto ra = load_run_directory(a);
    const auto rb = load_run_directory(b);
    if (ra.scenario.mesh != rb.scenario.mesh) throw ConfigError("compare: runs use different meshes");
    const auto& first = ra.snapshots.front();
    const double lo = *std::min_element(first.rho.begin(), first.rho.end());
    const double hi = *std::max_element(first.rho.begin(), first.rho.end());
    const auto c = compare_runs(ra.snapshots, rb.snapshots, t, 0.1 * (hi - lo));
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    nlohmann::json j = {{"t_a", c.t_a},
                        {"t_b", c.t_b},
                        {"front_a", opt(c.front_a)},
                        {"front_b", opt(c.front_b)},
                        {"front_delta", std::isnan(c.front_delta) ? nlohmann::json(nullptr) : nlohmann::json(c.front_delta)},
                        {"max_rho_delta", c.max_rho_delta},
                        {"peak_a", c.peak_a},
                        {"peak_b", c.peak_b},
                        {"peak_delta", c.peak_delta}};
    std::cout << j.dump(2) << '\n';
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Lagrangian finite-difference solver for 1D shallow-water MHD"};
    app.require_subcommand(1);

    std::string config, out, target, dir_a, dir_b;
    int levels = 3;
    double from = 0.1, t_probe = 0.0;
    std::optional<double> to;

    auto* run = app.add_subcommand("run", "Advance a scenario and write a run directory");
    run->add_option("config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "Output directory (overrides output.dir)");

    auto* verify = app.add_subcommand("verify-cl", "Discrete conservation-law residual report");
    verify->add_option("target", target, "Scenario JSON or run directory")->required()->check(CLI::ExistingPath);

    auto* conv = app.add_subcommand("convergence", "Observed order under joint (h, tau) refinement");
    conv->add_option("config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
    conv->add_option("--levels", levels, "Number of refinement levels (>= 3)")->check(CLI::Range(3, 8));

    auto* shock = app.add_subcommand("shock-speed", "Fit the front speed of a dam-break run");
    shock->add_option("dir", target, "Run directory")->required()->check(CLI::ExistingDirectory);
    shock->add_option("--from", from, "Start of the fit window");
    shock->add_option("--to", to, "End of the fit window (default: last snapshot)");

    auto* cmp = app.add_subcommand("compare", "Compare two runs at a probe time");
    cmp->add_option("dir_a", dir_a, "First run directory")->required()->check(CLI::ExistingDirectory);
    cmp->add_option("dir_b", dir_b, "Second run directory")->required()->check(CLI::ExistingDirectory);
    cmp->add_option("--t", t_probe, "Probe time")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*run) return cmd_run(config, out);
        if (*verify) return cmd_verify(target);
        if (*conv) return cmd_convergence(config, levels);
        if (*shock) return cmd_shock_speed(target, from, to);
        if (*cmp) return cmd_compare(dir_a, dir_b, t_probe);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_usage;
    } catch (const StepFailure& e) {
        std::fprintf(stderr, "step failure (%s) at step %ld: %s\n", to_string(e.kind()), e.step(), e.what());
        return exit_failed;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_failed;
    }
    return exit_usage;
}
