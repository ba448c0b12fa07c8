#pragma once

/// Experiment driver behind the command line tool: JSON configuration,
/// snapshot collection, offline POD, online sweeps and the summary report.
///
/// Output layout under the output directory:
///   snapshots/run<k>.mat, run<k>.initial.mat, manifest.csv
///   offline/side<i>_{interior,interface}.mat   POD modes, labels = singular values
///   offline/energy.csv, offline/dims.csv, offline/basis.json
///   benchmark/bench.mat                        single-domain reference
///   run/<cell>/{error,residual,trace,summary}.csv
///   run/conditioning.csv                       interface-dimension study
///   report.csv, report.txt

#include "ivrrom/fom.hpp"
#include "ivrrom/io.hpp"
#include "ivrrom/ivr.hpp"
#include "ivrrom/metrics.hpp"
#include "ivrrom/pod.hpp"
#include "ivrrom/problem.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace ivrrom {

class ConfigError : public Error {
public:
    using Error::Error;
};

namespace fs = std::filesystem;
using json = nlohmann::json;

struct SnapshotRun {
    double kappa1 = 1e-5;
    double kappa2 = 1e-5;
    double dt = 1.684e-3;
};

struct ExperimentConfig {
    std::string name = "experiment";
    std::string profile = "desk";
    double kappa1 = 1e-5;
    double kappa2 = 1e-5;
    Index nx = 32;
    double dt = 1.684e-3;
    double Tf = std::numbers::pi;
    std::vector<SnapshotRun> snapshot_runs;
    Index snapshot_stride = 1;
    Index sample_stride = 10;
    std::optional<double> delta0, deltagamma;
    std::vector<std::string> formulations;
    std::vector<Index> d_sweep;
    std::vector<Index> dgamma_sweep;  // conditioning study only
    Index dgamma_study_d0 = 20;
    std::uint64_t seed = 20240607;

    void validate() const {
        if (formulations.empty()) throw ConfigError("config: at least one formulation is required");
        for (const auto& f : formulations) parse_formulation(f);
        const bool needs_basis = std::any_of(formulations.begin(), formulations.end(),
                                             [](const std::string& f) { return parse_formulation(f).rom[1]; });
        if (needs_basis && d_sweep.empty() && !delta0) throw ConfigError("config: d_sweep is empty and no delta0 given");
        if (snapshot_runs.empty()) throw ConfigError("config: snapshot run list is empty");
        if (nx < 2 || nx % 2 != 0) throw ConfigError("config: nx must be even and at least 2");
        if (!(dt > 0.0) || !(Tf > 0.0)) throw ConfigError("config: dt and Tf must be positive");
        if (!(kappa1 > 0.0) || !(kappa2 > 0.0)) throw ConfigError("config: kappa must be positive");
        for (Index d : d_sweep)
            if (d < 1) throw ConfigError("config: d_sweep entries must be positive");
        if (snapshot_stride < 1 || sample_stride < 1) throw ConfigError("config: strides must be at least 1");
        if (profile != "desk" && profile != "paper") throw ConfigError("config: profile must be desk or paper");
    }

    json to_json() const {
        json j;
        j["name"] = name;
        j["profile"] = profile;
        j["kappa1"] = kappa1;
        j["kappa2"] = kappa2;
        j["nx"] = nx;
        j["dt"] = dt;
        j["Tf"] = Tf;
        j["snapshot_runs"] = json::array();
        for (const auto& r : snapshot_runs) j["snapshot_runs"].push_back({{"kappa1", r.kappa1}, {"kappa2", r.kappa2}, {"dt", r.dt}});
        j["snapshot_stride"] = snapshot_stride;
        j["sample_stride"] = sample_stride;
        j["delta0"] = delta0 ? json(*delta0) : json(nullptr);
        j["deltagamma"] = deltagamma ? json(*deltagamma) : json(nullptr);
        j["formulations"] = formulations;
        j["d_sweep"] = d_sweep;
        j["dgamma_sweep"] = dgamma_sweep;
        j["dgamma_study_d0"] = dgamma_study_d0;
        j["seed"] = seed;
        return j;
    }

    /// FNV-1a of the canonical JSON dump.
    std::string hash() const {
        std::uint64_t h = 1469598103934665603ULL;
        for (unsigned char c : to_json().dump()) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        std::ostringstream os;
        os << std::hex << h;
        return os.str();
    }

    std::string provenance() const { return "config " + name + " hash " + hash(); }

    ProblemConfig problem() const {
        ProblemConfig p = solid_body_rotation_config(kappa1, kappa2, nx, dt);
        p.final_time = Tf;
        return p;
    }
};

/// desk: nx = 32, Tf = pi; paper: nx = 64, Tf = 2 pi.
inline void apply_profile(ExperimentConfig& cfg, const std::string& profile) {
    if (profile == "desk") {
        cfg.nx = 32;
        cfg.Tf = std::numbers::pi;
    } else if (profile == "paper") {
        cfg.nx = 64;
        cfg.Tf = 2.0 * std::numbers::pi;
    } else {
        throw ConfigError("unknown profile '" + profile + "'");
    }
    cfg.profile = profile;
}

/// Keys absent from the document keep the profile defaults.
inline ExperimentConfig parse_config(const json& j) {
    ExperimentConfig c;
    apply_profile(c, j.value("profile", std::string("desk")));
    try {
        c.name = j.value("name", c.name);
        c.kappa1 = j.value("kappa1", c.kappa1);
        c.kappa2 = j.value("kappa2", c.kappa2);
        c.nx = j.value("nx", c.nx);
        c.dt = j.value("dt", c.dt);
        c.Tf = j.value("Tf", c.Tf);
        c.snapshot_stride = j.value("snapshot_stride", c.snapshot_stride);
        c.sample_stride = j.value("sample_stride", c.sample_stride);
        if (j.contains("delta0") && !j["delta0"].is_null()) c.delta0 = j["delta0"].get<double>();
        if (j.contains("deltagamma") && !j["deltagamma"].is_null()) c.deltagamma = j["deltagamma"].get<double>();
        c.formulations = j.value("formulations", std::vector<std::string>{});
        c.d_sweep = j.value("d_sweep", std::vector<Index>{});
        c.dgamma_sweep = j.value("dgamma_sweep", std::vector<Index>{});
        c.dgamma_study_d0 = j.value("dgamma_study_d0", c.dgamma_study_d0);
        c.seed = j.value("seed", c.seed);
        if (j.contains("snapshot_runs")) {
            for (const auto& r : j["snapshot_runs"]) {
                SnapshotRun s;
                s.kappa1 = r.value("kappa1", c.kappa1);
                s.kappa2 = r.value("kappa2", s.kappa1);
                s.dt = r.value("dt", c.dt);
                c.snapshot_runs.push_back(s);
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

inline ExperimentConfig load_config(const fs::path& path, const std::optional<std::string>& profile = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    ExperimentConfig c = parse_config(j);
    if (profile) apply_profile(c, *profile);
    c.validate();
    return c;
}

/// Serialized console output for concurrent sweep cells.
class Console {
public:
    void info(const std::string& msg) {
        std::lock_guard<std::mutex> lock(mu_);
        std::cout << msg << '\n';
    }
    void warn(const std::string& msg) {
        std::lock_guard<std::mutex> lock(mu_);
        std::cerr << "warning: " << msg << '\n';
    }
    Warning warner() {
        return [this](const std::string& m) { warn(m); };
    }

private:
    std::mutex mu_;
};

inline fs::path snapshot_stem(const fs::path& out, std::size_t k) { return out / "snapshots" / ("run" + std::to_string(k)); }

/// One single-domain trajectory per snapshot run.
inline void cmd_snapshots(const ExperimentConfig& cfg, const fs::path& out, Console& con) {
    cfg.validate();
    CsvWriter manifest(out / "snapshots" / "manifest.csv", {"run", "kappa1", "kappa2", "dt", "nx", "Tf", "columns"},
                       cfg.provenance());
    for (std::size_t k = 0; k < cfg.snapshot_runs.size(); ++k) {
        const SnapshotRun& r = cfg.snapshot_runs[k];
        ProblemConfig p = solid_body_rotation_config(r.kappa1, r.kappa2, cfg.nx, r.dt);
        p.final_time = cfg.Tf;
        p.snapshot_stride = cfg.snapshot_stride;
        const Trajectory traj = run_single_domain(p, con.warner());
        write_trajectory(snapshot_stem(out, k), traj);
        manifest.row({std::to_string(k), format_real(r.kappa1), format_real(r.kappa2), format_real(r.dt),
                      std::to_string(cfg.nx), format_real(cfg.Tf), std::to_string(traj.columns())});
        con.info("snapshot run " + std::to_string(k) + ": " + std::to_string(traj.columns()) + " snapshots");
    }
}

/// POD modes of both splits of both sides, kept up to numerical rank.
struct OfflineModes {
    std::array<PodModes, 2> interior, interface;
};

inline OfflineModes compute_modes(const ExperimentConfig& cfg, const std::vector<Trajectory>& runs) {
    const PartitionedProblem geometry(cfg.problem());
    std::optional<SnapshotSet> s1, s2;
    for (const Trajectory& t : runs) {
        auto [a, b] = restrict_to_subdomains(t, geometry.sub1, geometry.sub2);
        s1 = s1 ? concat(*s1, a) : a;
        s2 = s2 ? concat(*s2, b) : b;
    }
    if (!s1) throw ConfigError("offline: no snapshots");
    OfflineModes m;
    m.interior[0] = pod_modes(s1->X_0);
    m.interface[0] = pod_modes(s1->X_gamma);
    m.interior[1] = pod_modes(s2->X_0);
    m.interface[1] = pod_modes(s2->X_gamma);
    return m;
}

inline void write_modes(const fs::path& path, const PodModes& m) {
    std::vector<double> labels(m.sigma.data(), m.sigma.data() + m.rank);
    write_matrix(path, m.U.leftCols(m.rank), labels);
}

inline PodModes read_modes(const fs::path& path) {
    LabeledMatrix lm = read_matrix(path);
    PodModes m;
    m.U = std::move(lm.data);
    m.sigma = Eigen::Map<const Vector>(lm.labels.data(), static_cast<Index>(lm.labels.size()));
    m.rank = m.U.cols();
    return m;
}

inline std::vector<Trajectory> read_snapshot_runs(const ExperimentConfig& cfg, const fs::path& out) {
    std::vector<Trajectory> runs;
    for (std::size_t k = 0; k < cfg.snapshot_runs.size(); ++k) runs.push_back(read_trajectory(snapshot_stem(out, k)));
    return runs;
}

inline void cmd_offline(const ExperimentConfig& cfg, const fs::path& out, Console& con) {
    cfg.validate();
    const OfflineModes m = compute_modes(cfg, read_snapshot_runs(cfg, out));
    const fs::path dir = out / "offline";
    CsvWriter energy(dir / "energy.csv", {"side", "split", "index", "sigma", "energy"}, cfg.provenance());
    json meta = {{"provenance", cfg.provenance()}};
    for (int side = 1; side <= 2; ++side) {
        const std::size_t k = static_cast<std::size_t>(side - 1);
        write_modes(dir / ("side" + std::to_string(side) + "_interior.mat"), m.interior[k]);
        write_modes(dir / ("side" + std::to_string(side) + "_interface.mat"), m.interface[k]);
        for (const auto* modes : {&m.interior[k], &m.interface[k]}) {
            const std::string split = modes == &m.interior[k] ? "interior" : "interface";
            for (Index i = 0; i < modes->sigma.size(); ++i)
                energy.row({std::to_string(side), split, std::to_string(i + 1), format_real(modes->sigma(i)),
                            format_real(snapshot_energy(modes->sigma, i + 1))});
            meta["side" + std::to_string(side)][split + "_rank"] = modes->rank;
        }
    }
    CsvWriter dims(dir / "dims.csv", {"side", "delta0", "d_interior", "d_interface", "dmax_interface"}, cfg.provenance());
    if (cfg.delta0) {
        for (int side = 1; side <= 2; ++side) {
            const std::size_t k = static_cast<std::size_t>(side - 1);
            BasisRequest req;
            req.delta0 = cfg.delta0;
            req.delta_gamma = cfg.deltagamma;
            const CompositeBasis b = truncate_basis(m.interior[k], m.interface[k], req);
            dims.row({std::to_string(side), format_real(*cfg.delta0), std::to_string(b.d_interior()),
                      std::to_string(b.d_gamma()), std::to_string(b.dmax_gamma)});
            meta["side" + std::to_string(side)]["delta0_dims"] = {b.d_interior(), b.d_gamma()};
            con.info("side " + std::to_string(side) + ": delta0 " + format_real(*cfg.delta0) + " -> d0 " +
                     std::to_string(b.d_interior()) + ", dgamma " + std::to_string(b.d_gamma()));
        }
    }
    std::ofstream(dir / "basis.json") << meta.dump(2) << '\n';
}

inline OfflineModes read_offline(const fs::path& out) {
    OfflineModes m;
    for (int side = 1; side <= 2; ++side) {
        const std::size_t k = static_cast<std::size_t>(side - 1);
        m.interior[k] = read_modes(out / "offline" / ("side" + std::to_string(side) + "_interior.mat"));
        m.interface[k] = read_modes(out / "offline" / ("side" + std::to_string(side) + "_interface.mat"));
    }
    return m;
}

/// Reference trajectory at the problem parameters, sampled at sample_stride.
/// Cached under benchmark/ together with a key of the parameters it depends on.
inline Trajectory benchmark_trajectory(const ExperimentConfig& cfg, const fs::path& out, Console& con) {
    const fs::path stem = out / "benchmark" / "bench";
    const std::string key = format_real(cfg.kappa1) + " " + format_real(cfg.kappa2) + " " + std::to_string(cfg.nx) +
                            " " + format_real(cfg.dt) + " " + format_real(cfg.Tf) + " " +
                            std::to_string(cfg.sample_stride);
    const fs::path key_path = out / "benchmark" / "bench.key";
    if (fs::exists(stem.string() + ".mat") && fs::exists(key_path)) {
        std::ifstream in(key_path);
        std::string stored;
        std::getline(in, stored);
        if (stored == key) return read_trajectory(stem);
    }
    ProblemConfig p = cfg.problem();
    p.snapshot_stride = cfg.sample_stride;
    Trajectory t = run_single_domain(p, con.warner());
    write_trajectory(stem, t);
    std::ofstream(key_path) << key << '\n';
    return t;
}

/// One (formulation, basis size) entry of a sweep.
struct SweepCell {
    std::string formulation;
    std::string label;       // directory name
    std::optional<Index> d0; // empty: delta rule or full order
    bool delta_rule = false;
};

inline std::vector<SweepCell> sweep_cells(const ExperimentConfig& cfg) {
    std::vector<SweepCell> cells;
    for (const auto& name : cfg.formulations) {
        const Formulation f = parse_formulation(name);
        if (!f.rom[0] && !f.rom[1]) {
            cells.push_back({f.name(), f.name(), std::nullopt, false});
            continue;
        }
        for (Index d : cfg.d_sweep) cells.push_back({f.name(), f.name() + "_d" + std::to_string(d), d, false});
        if (cfg.delta0) cells.push_back({f.name(), f.name() + "_delta", std::nullopt, true});
    }
    return cells;
}

struct CellSummary {
    std::string label, formulation, status;
    Index d1_interior = 0, d1_gamma = 0, d2_interior = 0, d2_gamma = 0, multiplier_dim = 0;
    double cond = 0.0, final_eps = 0.0, max_eps = 0.0, max_residual = 0.0;
    bool spd = false;
    double offline_seconds = 0.0, online_seconds = 0.0;
};

inline const std::vector<std::string>& summary_header() {
    static const std::vector<std::string> h = {"cell", "formulation", "status", "d1_interior", "d1_interface",
                                               "d2_interior", "d2_interface", "multiplier_dim", "cond2_S", "schur_spd",
                                               "final_eps", "max_eps", "max_interface_residual"};
    return h;
}

inline std::vector<std::string> summary_row(const CellSummary& s) {
    return {s.label, s.formulation, s.status, std::to_string(s.d1_interior), std::to_string(s.d1_gamma),
            std::to_string(s.d2_interior), std::to_string(s.d2_gamma), std::to_string(s.multiplier_dim),
            format_real(s.cond), s.spd ? "1" : "0", format_real(s.final_eps), format_real(s.max_eps),
            format_real(s.max_residual)};
}

inline BasisRequest cell_request(const SweepCell& cell, const ExperimentConfig& cfg) {
    BasisRequest req;
    if (cell.delta_rule) {
        req.delta0 = cfg.delta0;
    } else {
        req.d0 = cell.d0;
    }
    req.delta_gamma = cfg.deltagamma;
    return req;
}

inline CellSummary run_cell(const SweepCell& cell, const ExperimentConfig& cfg, const PartitionedProblem& problem,
                            const OfflineModes* modes, const Trajectory& bench, const fs::path& out, Console& con) {
    CellSummary s;
    s.label = cell.label;
    s.formulation = cell.formulation;
    const Formulation form = parse_formulation(cell.formulation);
    std::array<std::optional<CompositeBasis>, 2> bases;
    for (std::size_t k = 0; k < 2; ++k) {
        if (!form.rom[k]) continue;
        if (modes == nullptr) throw ConfigError("run: offline modes are required for " + form.name());
        bases[k] = truncate_basis(modes->interior[k], modes->interface[k], cell_request(cell, cfg));
    }
    CoupledSystem sys(problem, form, bases[0] ? &*bases[0] : nullptr, bases[1] ? &*bases[1] : nullptr, con.warner());
    RunOptions opt;
    opt.sample_stride = cfg.sample_stride;
    const SimulationResult res = run(sys, opt);
    const ErrorSeries err = error_series(res, bench, problem);

    const fs::path dir = out / "run" / cell.label;
    {
        CsvWriter w(dir / "error.csv", {"step", "t", "eps", "max_rel"}, cfg.provenance());
        for (std::size_t i = 0; i < err.steps.size(); ++i)
            w.row({std::to_string(err.steps[i]), format_real(err.times[i]), format_real(err.eps[i]),
                   format_real(err.max_rel[i])});
    }
    {
        CsvWriter w(dir / "residual.csv", {"step", "t", "residual_max", "residual_weighted", "rhs_norm"},
                    cfg.provenance());
        for (std::size_t i = 0; i < res.step_times.size(); ++i)
            w.row({std::to_string(i), format_real(res.step_times[i]), format_real(res.residual_max[i]),
                   format_real(res.residual_weighted[i]), format_real(res.rhs_norm[i])});
    }
    {
        CsvWriter w(dir / "trace.csv", {"y", "single_domain", "side1", "side2"}, cfg.provenance());
        const Index last = res.states1.cols() - 1;
        const auto t1 = interface_trace(res.states1.col(last), problem.sub1);
        const auto t2 = interface_trace(res.states2.col(last), problem.sub2);
        const Vector ref = gather_local(problem.sub1, bench.states.col(bench.columns() - 1));
        const auto tr = interface_trace(ref, problem.sub1);
        for (std::size_t i = 0; i < t1.first.size(); ++i)
            w.row(std::vector<double>{t1.first[i], tr.second[i], t1.second[i], t2.second[i]});
    }
    s.status = "ok";
    s.d1_interior = res.d1_interior;
    s.d1_gamma = res.d1_gamma;
    s.d2_interior = res.d2_interior;
    s.d2_gamma = res.d2_gamma;
    s.multiplier_dim = res.multiplier_dim;
    s.cond = res.schur_cond;
    s.spd = res.schur_spd;
    s.final_eps = err.eps.back();
    s.max_eps = *std::max_element(err.eps.begin(), err.eps.end());
    s.max_residual = res.residual_max.empty() ? 0.0 : *std::max_element(res.residual_max.begin(), res.residual_max.end());
    s.offline_seconds = res.offline_seconds;
    s.online_seconds = res.online_seconds;
    CsvWriter w(dir / "summary.csv", summary_header(), cfg.provenance());
    w.row(summary_row(s));
    std::ofstream(dir / "timing.txt") << "offline_seconds " << format_real(s.offline_seconds) << "\nonline_seconds "
                                      << format_real(s.online_seconds) << '\n';
    return s;
}

/// cond2(S) of RR_rLM and RR_fLM against the retained interface dimension.
inline void conditioning_study(const ExperimentConfig& cfg, const PartitionedProblem& problem, const OfflineModes& m,
                               const fs::path& out, Console& con) {
    CsvWriter w(out / "run" / "conditioning.csv", {"formulation", "d_interior", "d_interface", "cond2_S", "schur_spd"},
                cfg.provenance());
    for (Index dg : cfg.dgamma_sweep) {
        for (FormulationTag tag : {FormulationTag::RR_rLM, FormulationTag::RR_fLM}) {
            BasisRequest req;
            req.d0 = std::min(cfg.dgamma_study_d0, std::min(m.interior[0].rank, m.interior[1].rank));
            req.d_gamma = dg;
            const CompositeBasis b1 = truncate_basis(m.interior[0], m.interface[0], req);
            const CompositeBasis b2 = truncate_basis(m.interior[1], m.interface[1], req);
            const CoupledSystem sys(problem, make_formulation(tag), &b1, &b2, [](const std::string&) {});
            w.row({make_formulation(tag).name(), std::to_string(*req.d0), std::to_string(dg),
                   format_real(sys.schur().cond), sys.schur().spd() ? "1" : "0"});
        }
    }
    con.info("conditioning study: " + std::to_string(cfg.dgamma_sweep.size()) + " interface dimensions");
}

/// Runs every sweep cell on a pool of `jobs` threads; each cell writes its
/// own directory.
inline std::vector<CellSummary> cmd_run(const ExperimentConfig& cfg, const fs::path& out, Console& con, int jobs = 1) {
    cfg.validate();
    const PartitionedProblem problem(cfg.problem());
    const std::vector<SweepCell> cells = sweep_cells(cfg);
    const bool needs_modes = std::any_of(cells.begin(), cells.end(), [](const SweepCell& c) {
        return parse_formulation(c.formulation).rom[1];
    }) || !cfg.dgamma_sweep.empty();
    std::optional<OfflineModes> modes;
    if (needs_modes) modes = read_offline(out);
    const Trajectory bench = benchmark_trajectory(cfg, out, con);

    std::vector<CellSummary> summaries(cells.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            try {
                summaries[i] = run_cell(cells[i], cfg, problem, modes ? &*modes : nullptr, bench, out, con);
                con.info(cells[i].label + ": final eps " + format_real(summaries[i].final_eps) + ", cond2(S) " +
                         format_real(summaries[i].cond));
            } catch (const Error& e) {
                summaries[i].label = cells[i].label;
                summaries[i].formulation = cells[i].formulation;
                summaries[i].status = std::string("failed: ") + e.what();
                con.warn(cells[i].label + ": " + e.what());
                CsvWriter w(out / "run" / cells[i].label / "summary.csv", summary_header(), cfg.provenance());
                w.row(summary_row(summaries[i]));
            }
        }
    };
    const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (!cfg.dgamma_sweep.empty()) conditioning_study(cfg, problem, *modes, out, con);
    return summaries;
}

/// Aggregates the per-cell summaries into report.csv and report.txt.
inline std::vector<CellSummary> cmd_report(const ExperimentConfig& cfg, const fs::path& out, Console& con) {
    std::vector<CellSummary> rows;
    CsvWriter csv(out / "report.csv", [] {
        auto h = summary_header();
        h.push_back("offline_seconds");
        h.push_back("online_seconds");
        return h;
    }(), cfg.provenance());
    std::ostringstream txt;
    txt << "experiment " << cfg.name << " (" << cfg.provenance() << ")\n";
    char line[256];
    std::snprintf(line, sizeof(line), "%-18s %-8s %5s %5s %5s %5s %12s %12s %12s\n", "cell", "status", "d1_0", "d1_g",
                  "d2_0", "d2_g", "cond2(S)", "final eps", "online s");
    txt << line;
    for (const SweepCell& cell : sweep_cells(cfg)) {
        const fs::path dir = out / "run" / cell.label;
        if (!fs::exists(dir / "summary.csv")) {
            con.warn("report: missing results for " + cell.label);
            continue;
        }
        const auto table = read_csv(dir / "summary.csv");
        if (table.size() < 2) continue;
        const auto& r = table[1];
        CellSummary s;
        s.label = r[0];
        s.formulation = r[1];
        s.status = r[2];
        s.d1_interior = std::stol(r[3]);
        s.d1_gamma = std::stol(r[4]);
        s.d2_interior = std::stol(r[5]);
        s.d2_gamma = std::stol(r[6]);
        s.multiplier_dim = std::stol(r[7]);
        s.cond = std::stod(r[8]);
        s.spd = r[9] == "1";
        s.final_eps = std::stod(r[10]);
        s.max_eps = std::stod(r[11]);
        s.max_residual = std::stod(r[12]);
        std::ifstream timing(dir / "timing.txt");
        std::string key;
        while (timing >> key) (key == "offline_seconds" ? timing >> s.offline_seconds : timing >> s.online_seconds);
        auto row = summary_row(s);
        row.push_back(format_real(s.offline_seconds));
        row.push_back(format_real(s.online_seconds));
        csv.row(row);
        std::snprintf(line, sizeof(line), "%-18s %-8s %5ld %5ld %5ld %5ld %12.4e %12.4e %12.3f\n", s.label.c_str(),
                      s.status.substr(0, 8).c_str(), static_cast<long>(s.d1_interior), static_cast<long>(s.d1_gamma),
                      static_cast<long>(s.d2_interior), static_cast<long>(s.d2_gamma), s.cond, s.final_eps,
                      s.online_seconds);
        txt << line;
        rows.push_back(s);
    }
    std::ofstream(out / "report.txt") << txt.str();
    con.info(txt.str());
    return rows;
}

}  // namespace ivrrom
