#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swmhd/analysis.hpp"
#include "swmhd/conservation.hpp"
#include "swmhd/scenario.hpp"
#include "swmhd/simulate.hpp"

// Run directories:
//   snapshots.csv  t,i,s,x,rho,u,p_root,Hx,B   one row per node
//   ledger.csv     n,t,H,err_A,err_R,momentum,mass
//   summary.json   run statistics, law audit, failure record
//   scenario.json  the scenario as run
// Cell fields (rho, p_root, Hx) describe the cell to the right of node i and
// are empty on the last node. B sits on interior nodes only.

namespace swmhd {

namespace fs = std::filesystem;

inline constexpr const char* output_root_env = "SWMHD_OUTPUT_ROOT";

inline std::string read_text_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError(p.string() + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Scenario load_scenario(const fs::path& p)
{
    try {
        return parse_scenario(read_text_file(p));
    } catch (const ConfigError& e) {
        throw ConfigError(p.string() + ": " + e.what());
    }
}

/// output.dir, or runs/<config stem>; relative paths resolve against
/// $SWMHD_OUTPUT_ROOT (default: the working directory).
inline fs::path resolve_output_dir(const Scenario& sc, const fs::path& config_path)
{
    fs::path dir = sc.output.dir.empty() ? fs::path("runs") / config_path.stem() : fs::path(sc.output.dir);
    if (dir.is_absolute()) return dir;
    const char* root = std::getenv(output_root_env);
    return (root && *root ? fs::path(root) : fs::current_path()) / dir;
}

namespace detail {

class CsvWriter {
public:
    explicit CsvWriter(const fs::path& p) : out_(p, std::ios::binary)
    {
        if (!out_) throw ConfigError(p.string() + ": cannot write");
        out_ << std::setprecision(17);
    }
    std::ostream& stream() { return out_; }

private:
    std::ofstream out_;
};

inline std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') cur += c;
    }
    out.push_back(cur);
    return out;
}

inline double to_double(const std::string& s, const std::string& where)
{
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw ConfigError(where + ": not a number '" + s + "'");
    return v;
}

/// Reads a CSV with a header row into column-name keyed rows.
inline std::vector<std::map<std::string, double>> read_csv(const fs::path& p,
                                                           const std::vector<std::string>& required)
{
    std::ifstream in(p);
    if (!in) throw ConfigError(p.string() + ": cannot open");
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(p.string() + ": empty file");
    const auto header = split_csv(line);
    for (const auto& r : required)
        if (std::find(header.begin(), header.end(), r) == header.end())
            throw ConfigError(p.string() + ": missing column '" + r + "'");
    std::vector<std::map<std::string, double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != header.size())
            throw ConfigError(p.string() + ":" + std::to_string(lineno) + ": expected "
                              + std::to_string(header.size()) + " fields");
        std::map<std::string, double> row;
        for (std::size_t k = 0; k < f.size(); ++k)
            row[header[k]] = to_double(f[k], p.string() + ":" + std::to_string(lineno));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace detail

inline const std::vector<std::string>& snapshot_columns()
{
    static const std::vector<std::string> c{"t", "i", "s", "x", "rho", "u", "p_root", "Hx", "B"};
    return c;
}

inline const std::vector<std::string>& ledger_columns()
{
    static const std::vector<std::string> c{"n", "t", "H", "err_A", "err_R", "momentum", "mass"};
    return c;
}

inline void write_snapshots_csv(const fs::path& p, const std::vector<LayerState>& snaps, const Mesh& mesh,
                                double kappa)
{
    detail::CsvWriter w(p);
    auto& o = w.stream();
    for (std::size_t k = 0; k < snapshot_columns().size(); ++k) o << (k ? "," : "") << snapshot_columns()[k];
    o << '\n';
    for (const auto& s : snaps) {
        const std::size_t n = s.n_cells();
        const auto B = magnetic_gradient(s, mesh, kappa);
        for (std::size_t i = 0; i <= n; ++i) {
            o << s.t << ',' << i << ',' << mesh.node_s(i) << ',' << s.x[i] << ',';
            if (i < n) o << s.rho[i];
            o << ',' << s.u[i] << ',';
            if (i < n) o << s.p_root[i];
            o << ',';
            if (i < n) o << 1.0 / s.rho[i];
            o << ',';
            if (i > 0 && i < n) o << B[i - 1];
            o << '\n';
        }
    }
}

inline void write_ledger_csv(const fs::path& p, const EnergyLedger& ledger)
{
    detail::CsvWriter w(p);
    auto& o = w.stream();
    for (std::size_t k = 0; k < ledger_columns().size(); ++k) o << (k ? "," : "") << ledger_columns()[k];
    o << '\n';
    for (const auto& r : ledger.records())
        o << r.n << ',' << r.t << ',' << r.H << ',' << r.err_A << ',' << r.err_R << ',' << r.momentum << ','
          << r.mass << '\n';
}

/// Snapshots back from CSV. omega and theta are not stored and come back
/// as zeros; step is t / tau rounded.
inline std::vector<LayerState> read_snapshots_csv(const fs::path& p, double tau)
{
    const auto rows = detail::read_csv(p, snapshot_columns());
    std::vector<LayerState> out;
    for (const auto& r : rows) {
        const double t = r.at("t");
        const auto i = static_cast<std::size_t>(std::llround(r.at("i")));
        if (i == 0) {
            LayerState s;
            s.t = t;
            s.step = std::lround(t / tau);
            out.push_back(std::move(s));
        }
        if (out.empty() || out.back().t != t || out.back().x.size() != i)
            throw ConfigError(p.string() + ": rows out of order at t = " + std::to_string(t));
        auto& s = out.back();
        s.x.push_back(r.at("x"));
        s.u.push_back(r.at("u"));
        if (!std::isnan(r.at("rho"))) {
            s.rho.push_back(r.at("rho"));
            s.p_root.push_back(r.at("p_root"));
        }
    }
    for (auto& s : out) {
        if (s.rho.size() + 1 != s.x.size())
            throw ConfigError(p.string() + ": inconsistent snapshot at t = " + std::to_string(s.t));
        s.omega.assign(s.rho.size(), 0.0);
        s.theta.assign(s.rho.size(), 0.0);
    }
    return out;
}

inline std::vector<LedgerRecord> read_ledger_csv(const fs::path& p)
{
    const auto rows = detail::read_csv(p, {"n", "t", "H", "err_A", "err_R", "momentum"});
    std::vector<LedgerRecord> out;
    for (const auto& r : rows) {
        LedgerRecord e;
        e.n = std::lround(r.at("n"));
        e.t = r.at("t");
        e.H = r.at("H");
        e.err_A = r.at("err_A");
        e.err_R = r.at("err_R");
        e.momentum = r.at("momentum");
        e.mass = r.count("mass") ? r.at("mass") : 0.0;
        out.push_back(e);
    }
    return out;
}

inline nlohmann::json summary_json(const Scenario& sc, const RunResult& r)
{
    using nlohmann::json;
    json j;
    j["scheme"] = to_string(sc.scheme);
    j["steps"] = r.steps;
    j["t_final"] = static_cast<double>(r.steps) * sc.mesh.tau;
    j["completed"] = r.ok();
    j["newton"] = {{"total_iterations", r.newton_total},
                   {"max_iterations", r.newton_max},
                   {"mean_iterations", r.steps > 0 ? static_cast<double>(r.newton_total) / static_cast<double>(r.steps) : 0.0}};
    j["worst_residual"] = r.worst_residual;
    j["wall_time_s"] = r.wall_seconds;
    j["kappa"] = r.kappa;
    if (!r.ledger.empty()) {
        const auto d = drift_report(r.ledger);
        j["energy"] = {{"max_err_A", d.max_err_A},
                       {"max_err_R", d.max_err_R},
                       {"worst_n", d.worst_n},
                       {"non_increasing", d.non_increasing}};
    }
    json laws = json::array();
    const Problem pb = sc.problem();
    for (const auto& l : r.laws) {
        const auto why = inapplicable_reason(l.id, sc.scheme, pb);
        laws.push_back({{"name", law(l.id).name},
                        {"multiplier", law(l.id).multiplier},
                        {"max_residual", l.scan.max_residual},
                        {"step", l.scan.step},
                        {"index", l.scan.index},
                        {"threshold", l.threshold},
                        {"expected", !why},
                        {"passed", l.passed()}});
    }
    j["laws"] = laws;
    if (const auto* d = std::get_if<initial::DamBreak>(&sc.initial)) {
        j["analysis"] = {{"rho_left", d->rho_left},
                         {"rho_right", d->rho_right},
                         {"rankine_hugoniot_speed",
                          rankine_hugoniot_speed(sc.phys.alpha_sq, sc.phys.g1, std::min(d->rho_left, d->rho_right))}};
    }
    if (r.failure)
        j["failure"] = {{"kind", to_string(r.failure->kind)},
                        {"step", r.failure->step},
                        {"node", r.failure->node},
                        {"message", r.failure->message}};
    else
        j["failure"] = nullptr;
    return j;
}

inline void write_run_directory(const fs::path& dir, const Scenario& sc, const RunResult& r)
{
    fs::create_directories(dir);
    write_snapshots_csv(dir / "snapshots.csv", r.snapshots, sc.mesh, r.kappa);
    write_ledger_csv(dir / "ledger.csv", r.ledger);
    {
        std::ofstream o(dir / "summary.json");
        o << summary_json(sc, r).dump(2) << '\n';
    }
    {
        std::ofstream o(dir / "scenario.json");
        o << serialize_scenario(sc) << '\n';
    }
}

struct LoadedRun {
    Scenario scenario;
    std::vector<LayerState> snapshots;
    std::vector<LedgerRecord> ledger;
    nlohmann::json summary;
};

inline LoadedRun load_run_directory(const fs::path& dir)
{
    if (!fs::is_directory(dir)) throw ConfigError(dir.string() + ": not a run directory");
    LoadedRun run;
    run.scenario = load_scenario(dir / "scenario.json");
    run.snapshots = read_snapshots_csv(dir / "snapshots.csv", run.scenario.mesh.tau);
    if (fs::exists(dir / "ledger.csv")) run.ledger = read_ledger_csv(dir / "ledger.csv");
    if (fs::exists(dir / "summary.json")) {
        try {
            run.summary = nlohmann::json::parse(read_text_file(dir / "summary.json"));
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError((dir / "summary.json").string() + ": " + e.what());
        }
    }
    return run;
}

} // namespace swmhd
