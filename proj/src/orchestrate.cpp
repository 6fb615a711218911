#include "qsl/orchestrate.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <memory>

#include <nlohmann/json.hpp>

#include "qsl/io.hpp"
#include "qsl/scattering.hpp"

namespace qsl {

namespace {

// Snapshot observer: stores the field at the requested times (nearest sample).
struct CheckpointCollector {
    std::vector<double> wanted;
    double sample_dt = 0.0;
    std::vector<std::pair<double, Field>>* sink = nullptr;

    void operator()(const State& s) const {
        for (double t : wanted)
            if (std::abs(s.t - t) <= 0.5 * sample_dt + 1e-12) {
                sink->push_back({s.t, s.u});
                return;
            }
    }
};

}  // namespace

Trajectory simulate(const RunConfig& cfg) {
    cfg.validate();
    const ModelOnGrid model = ModelOnGrid::build(cfg.model, cfg.grid);
    const Field u0 = build_initial(cfg);

    Trajectory traj;
    const double sample_dt = cfg.solver.dt * cfg.solver.sample_every;

    std::vector<Observer> observers;
    if (cfg.diagnostics_enabled)
        observers.push_back(Observer{[&](long, const State& s) {
            traj.records.push_back(compute_record(model, s, cfg.solver.boundary_mass_tol));
        }, 1});
    if (!cfg.checkpoint_times.empty()) {
        CheckpointCollector cc{cfg.checkpoint_times, sample_dt, &traj.checkpoints};
        observers.push_back(Observer{[cc](long, const State& s) { cc(s); }, 1});
    }

    const RunResult res = run(model, cfg.solver, u0, observers);
    traj.boundary_warnings = res.boundary_warnings;
    return traj;
}

OrchestrateResult orchestrate(const RunConfig& cfg) {
    OrchestrateResult out;
    namespace fs = std::filesystem;
    const auto t_start = std::chrono::steady_clock::now();

    fs::create_directories(cfg.output_dir);
    const std::string base = cfg.output_dir + "/" + cfg.prefix;

    nlohmann::ordered_json manifest;
    manifest["tool"] = "qslab";
    manifest["version"] = "0.1.0";
    manifest["config"] = render_config(cfg);
    manifest["constants"]["v_eps"] = cfg.model.v.eps;
    manifest["constants"]["w_eps"] = cfg.model.w.eps;
    manifest["constants"]["interaction_eps"] = cfg.interaction_eps;
    manifest["constants"]["interaction_r0"] =
        cfg.interaction_r0 != 0.0 ? cfg.interaction_r0 : 2.0 * cfg.grid.dx();
    manifest["constants"]["sobolev_cs"] =
        cfg.model.dim >= 3 ? (cfg.sobolev_cs != 0.0 ? cfg.sobolev_cs : sobolev_constant(cfg.model.dim))
                           : 0.0;
    manifest["seed"] = cfg.seed;

    const ModelOnGrid model = ModelOnGrid::build(cfg.model, cfg.grid);
    const Field u0 = build_initial(cfg);
    const double sample_dt = cfg.solver.dt * cfg.solver.sample_every;

    Trajectory traj;
    std::unique_ptr<Interaction1dAccumulator> acc1d;
    std::unique_ptr<Interaction2dAccumulator> acc2d;
    std::unique_ptr<Interaction3dAccumulator> acc3d;
    if (cfg.interaction_enabled) {
        if (cfg.grid.dim == 1)
            acc1d = std::make_unique<Interaction1dAccumulator>(model, cfg.interaction_eps);
        else if (cfg.grid.dim == 2)
            acc2d = std::make_unique<Interaction2dAccumulator>(
                model, cfg.interaction_r0 != 0.0 ? cfg.interaction_r0 : 2.0 * cfg.grid.dx());
        else
            acc3d = std::make_unique<Interaction3dAccumulator>(model);
    }

    std::vector<Observer> observers;
    if (cfg.diagnostics_enabled)
        observers.push_back(Observer{[&](long, const State& s) {
            traj.records.push_back(compute_record(model, s, cfg.solver.boundary_mass_tol));
        }, 1});
    if (!cfg.checkpoint_times.empty()) {
        CheckpointCollector cc{cfg.checkpoint_times, sample_dt, &traj.checkpoints};
        observers.push_back(Observer{[cc](long, const State& s) { cc(s); }, 1});
    }
    if (cfg.interaction_enabled)
        observers.push_back(Observer{[&](long, const State& s) {
            if (acc1d) acc1d->sample(s);
            if (acc2d) acc2d->sample(s);
            if (acc3d) acc3d->sample(s);
        }, 1});

    std::string status = "ok";
    try {
        const RunResult res = run(model, cfg.solver, u0, observers);
        traj.boundary_warnings = res.boundary_warnings;
    } catch (const DivergedError& e) {
        status = std::string("diverged: ") + e.what();
        out.exit_code = kExitDiverged;
        out.failed_stage = "solver";
    }

    // Flush whatever was collected, diverged or not.
    if (cfg.diagnostics_enabled) write_text(base + "_diagnostics.csv", diagnostics_csv(traj.records));
    for (const auto& [t, f] : traj.checkpoints) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%g", t);
        write_checkpoint(base + "_ckpt_t" + buf + ".bin", f, t);
    }
    if (!traj.checkpoints.empty()) {
        const PullbackSeries ps = cauchy_gaps(traj);
        std::vector<std::string> cols = {"t_i", "t_j", "gap_l2", "gap_sigma"};
        std::vector<std::vector<double>> data(4);
        for (std::size_t i = 0; i < ps.times.size(); ++i)
            for (std::size_t j = 0; j < ps.times.size(); ++j) {
                data[0].push_back(ps.times[i]);
                data[1].push_back(ps.times[j]);
                data[2].push_back(ps.gap_l2[i][j]);
                data[3].push_back(ps.gap_sigma[i][j]);
            }
        write_text(base + "_scatter.csv", table_csv(cols, data));
        write_checkpoint(base + "_uplus.bin", ps.u_plus, ps.times.back());
        manifest["artifacts"]["u_plus"] = cfg.prefix + "_uplus.bin";
    }
    if (acc1d) {
        const Interaction1dResult r = acc1d->finalize();
        std::vector<double> lhs_accum(r.t.size(), 0.0);
        for (std::size_t i = 1; i < r.t.size(); ++i)
            lhs_accum[i] = lhs_accum[i - 1] +
                           0.5 * (r.t[i] - r.t[i - 1]) * (r.lhs_density[i] + r.lhs_density[i - 1]);
        write_text(base + "_interaction.csv",
                   table_csv({"t", "action", "rhs", "lhs_density", "lhs_accum"},
                             {r.t, r.action, r.rhs, r.lhs_density, lhs_accum}));
        manifest["interaction"]["max_identity_residual"] = r.max_identity_residual;
        manifest["interaction"]["lhs_accumulated"] = r.lhs_accumulated;
        manifest["interaction"]["measured_c"] = r.measured_c;
    }
    if (acc2d) {
        const Interaction2dResult r = acc2d->finalize();
        manifest["interaction"]["diff_quotient"] = r.diff_quotient;
        manifest["interaction"]["cross_term"] = r.cross_term;
        manifest["interaction"]["dhalf_sq"] = r.dhalf_sq;
        manifest["interaction"]["sup_hhalf_sq"] = r.sup_hhalf_sq;
    }
    if (acc3d) {
        const Interaction3dResult r = acc3d->finalize();
        write_text(base + "_interaction.csv", table_csv({"t", "action"}, {r.t, r.action}));
        manifest["interaction"]["l4"] = r.l4;
        manifest["interaction"]["htilde_term"] = r.htilde_term;
        manifest["interaction"]["measured_c"] = r.measured_c;
    }

    if (!traj.records.empty()) {
        const auto& first = traj.records.front();
        const auto& last = traj.records.back();
        manifest["summary"]["mass_drift"] =
            first.mass > 0.0 ? std::abs(last.mass - first.mass) / first.mass : 0.0;
        manifest["summary"]["energy_drift"] =
            first.energy != 0.0 ? std::abs(last.energy - first.energy) / std::abs(first.energy) : 0.0;
        manifest["summary"]["samples"] = traj.records.size();
        if (traj.records.size() >= 2) {
            const PseudoconformalResult pr = pseudoconformal(traj);
            manifest["summary"]["pseudoconformal_max_R"] = pr.max_abs_R;
            manifest["summary"]["pseudoconformal_form_discrepancy"] = pr.form_discrepancy;
        }
    }
    manifest["summary"]["boundary_warnings"] = traj.boundary_warnings;
    manifest["status"] = status;
    const auto t_stop = std::chrono::steady_clock::now();
    manifest["timings"]["total_s"] =
        std::chrono::duration<double>(t_stop - t_start).count();
    write_text(base + "_manifest.json", manifest.dump(2) + "\n");

    out.trajectory = std::move(traj);
    return out;
}

}  // namespace qsl
