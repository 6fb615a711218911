// qslab: batch driver for the spectral simulator and its diagnostics.
// Subcommands: simulate, diagnose, check, scatter, fit-decay, export-plot.
// Exit codes: 0 ok, 2 config error, 3 diverged, 4 hypothesis rejected.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "qsl/checker.hpp"
#include "qsl/config.hpp"
#include "qsl/diagnostics.hpp"
#include "qsl/io.hpp"
#include "qsl/orchestrate.hpp"
#include "qsl/scattering.hpp"

namespace {

using namespace qsl;

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    RunConfig cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    const OrchestrateResult res = orchestrate(cfg);
    if (res.exit_code != kExitOk)
        std::cerr << "run failed in stage: " << res.failed_stage << "\n";
    else
        std::cout << "wrote artifacts under " << cfg.output_dir << "/" << cfg.prefix << "_*\n";
    return res.exit_code;
}

int cmd_diagnose(const std::string& config_path, const std::string& ckpt_path,
                 const std::string& out_csv) {
    const RunConfig cfg = load_config(config_path);
    const Checkpoint ck = read_checkpoint(ckpt_path);
    if (ck.field.grid.dim != cfg.model.dim)
        throw ConfigError("checkpoint dimension does not match the configured model");
    const ModelOnGrid mg = ModelOnGrid::build(cfg.model, ck.field.grid);
    const DiagnosticRecord r = compute_record(mg, State{ck.t, ck.field}, cfg.solver.boundary_mass_tol);
    const std::string csv = diagnostics_csv({r});
    if (out_csv.empty())
        std::cout << csv;
    else
        write_text(out_csv, csv);
    return kExitOk;
}

int cmd_check(const std::string& theorem, const std::string& config_path, double mass_sq,
              double energy, double p, double theta, double q, double r) {
    const RunConfig cfg = load_config(config_path);
    const double cs = cfg.model.dim >= 3
                          ? (cfg.sobolev_cs != 0.0 ? cfg.sobolev_cs : sobolev_constant(cfg.model.dim))
                          : 0.0;
    TheoremReport rep;
    if (theorem == "wv") {
        const WvReport wv = check_wv(cfg.model);
        rep = wv.report;
    } else if (theorem == "1") {
        rep = check_theorem1(cfg.model, mass_sq, energy, cs);
    } else if (theorem == "3") {
        rep = check_theorem3(cfg.model);
    } else if (theorem == "4") {
        const CrResult cr = cfg.model.dim >= 3 && cfg.model.h.active()
                                ? cr_constant(cfg.model, mass_sq, cs)
                                : CrResult{};
        rep = check_theorem4(cfg.model, p, theta, q, r, cr.value);
    } else if (theorem == "6") {
        rep = check_theorem6(cfg.model);
    } else if (theorem == "7") {
        rep = check_theorem7(cfg.model);
    } else if (theorem == "cor6.5") {
        rep = check_corollary65(cfg.model);
    } else {
        std::cerr << "unknown theorem id: " << theorem << "\n";
        return kExitConfig;
    }
    std::cout << rep.render();
    std::cout << rep.machine_line() << "\n";
    return rep.verdict == Verdict::Applies ? kExitOk : kExitHypothesisRejected;
}

int cmd_scatter(const std::string& config_path, const std::string& out_dir) {
    RunConfig cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (cfg.checkpoint_times.empty()) {
        std::cerr << "scatter needs diagnostics.checkpoint_times\n";
        return kExitConfig;
    }
    const OrchestrateResult res = orchestrate(cfg);
    if (res.exit_code != kExitOk) return res.exit_code;
    const PullbackSeries ps = cauchy_gaps(res.trajectory);
    std::printf("checkpoints:");
    for (double t : ps.times) std::printf(" %g", t);
    std::printf("\nlast L2 gap: %.6e\n", ps.last_gap_l2);
    return kExitOk;
}

int cmd_fit_decay(const std::string& csv_path, const std::string& column, double t_lo, double t_hi) {
    const CsvTable table = read_csv(csv_path);
    const auto& t = table.column("t");
    const auto& y = table.column(column);
    const DecayFit fit = decay_fit(t, y, t_lo, t_hi);
    std::printf("iota %.6f intercept %.6f points %zu window [%g, %g]\n", fit.iota, fit.intercept,
                fit.n_points, t_lo, t_hi);
    return kExitOk;
}

int cmd_export_plot(const std::string& csv_path, const std::string& xcol, const std::string& ycol,
                    const std::string& mode, double t_lo, double t_hi, const std::string& out) {
    const CsvTable table = read_csv(csv_path);
    PlotMode pm = PlotMode::Linear;
    if (mode == "loglog")
        pm = PlotMode::LogLog;
    else if (mode == "slope-fit")
        pm = PlotMode::SlopeFit;
    else if (mode != "linear") {
        std::cerr << "unknown plot mode: " << mode << "\n";
        return kExitConfig;
    }
    const std::string text = export_plotdata(table.column(xcol), table.column(ycol), pm, t_lo, t_hi);
    if (out.empty())
        std::cout << text;
    else
        write_text(out, text);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-spectral simulator and diagnostics for a quasilinear Schrodinger family"};
    app.require_subcommand(1);

    std::string config_path, out_dir, ckpt_path, out_csv, theorem, column = "phi";
    std::string csv_path, xcol = "t", ycol = "phi", mode = "linear", out_file;
    double mass_sq = 1.0, energy = 1.0, t_lo = 5.0, t_hi = 50.0;
    double opt_p = 2.0, opt_theta = 1.0, opt_q = 2.0, opt_r = 1.0;

    auto* sim = app.add_subcommand("simulate", "advance a configured run and write artifacts");
    sim->add_option("--config", config_path)->required();
    sim->add_option("--output-dir", out_dir);

    auto* diag = app.add_subcommand("diagnose", "recompute the functionals on a stored checkpoint");
    diag->add_option("--config", config_path)->required();
    diag->add_option("--checkpoint", ckpt_path)->required();
    diag->add_option("--out", out_csv);

    auto* chk = app.add_subcommand("check", "closed-form hypothesis checks");
    chk->add_option("--theorem", theorem, "one of 1|3|4|6|7|cor6.5|wv")->required();
    chk->add_option("--params", config_path)->required();
    chk->add_option("--mass-sq", mass_sq);
    chk->add_option("--energy", energy);
    chk->add_option("--p", opt_p, "mixed-norm time exponent (theorem 4)");
    chk->add_option("--theta", opt_theta, "defect power (theorem 4)");
    chk->add_option("--q", opt_q, "mixed-norm time exponent, G-route (theorem 4)");
    chk->add_option("--r", opt_r, "mixed-norm space exponent, G-route (theorem 4)");

    auto* sca = app.add_subcommand("scatter", "run and report free-evolution pullback gaps");
    sca->add_option("--config", config_path)->required();
    sca->add_option("--output-dir", out_dir);

    auto* fit = app.add_subcommand("fit-decay", "log-log slope of a diagnostics column");
    fit->add_option("--csv", csv_path)->required();
    fit->add_option("--column", column);
    fit->add_option("--t-lo", t_lo);
    fit->add_option("--t-hi", t_hi);

    auto* exp = app.add_subcommand("export-plot", "plot-ready two-column text");
    exp->add_option("--csv", csv_path)->required();
    exp->add_option("--x", xcol);
    exp->add_option("--y", ycol);
    exp->add_option("--mode", mode, "linear|loglog|slope-fit");
    exp->add_option("--t-lo", t_lo);
    exp->add_option("--t-hi", t_hi);
    exp->add_option("--out", out_file);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_dir);
        if (diag->parsed()) return cmd_diagnose(config_path, ckpt_path, out_csv);
        if (chk->parsed())
            return cmd_check(theorem, config_path, mass_sq, energy, opt_p, opt_theta, opt_q, opt_r);
        if (sca->parsed()) return cmd_scatter(config_path, out_dir);
        if (fit->parsed()) return cmd_fit_decay(csv_path, column, t_lo, t_hi);
        if (exp->parsed()) return cmd_export_plot(csv_path, xcol, ycol, mode, t_lo, t_hi, out_file);
    } catch (const qsl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return qsl::kExitConfig;
    } catch (const qsl::DivergedError& e) {
        std::cerr << "diverged: " << e.what() << "\n";
        return qsl::kExitDiverged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return qsl::kExitConfig;
    }
    return 0;
}
