#include "qsl/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qsl/io.hpp"

namespace qsl {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": not a number: '" + v + "'");
    }
}

long parse_long(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": not an integer: '" + v + "'");
    }
}

bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("line " + std::to_string(line) + ": not a boolean: '" + v + "'");
}

std::vector<double> parse_list(const std::string& v, int line) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(item, line));
    }
    return out;
}

PotentialSpec parse_potential(const std::string& prefix,
                              const std::map<std::string, std::pair<std::string, int>>& kv) {
    PotentialSpec p;
    auto get = [&](const std::string& key) -> const std::pair<std::string, int>* {
        const auto it = kv.find(prefix + key);
        return it == kv.end() ? nullptr : &it->second;
    };
    if (const auto* k = get("kind")) {
        if (k->first == "zero")
            p.kind = PotentialKind::Zero;
        else if (k->first == "inverse_power")
            p.kind = PotentialKind::SmoothedInversePower;
        else if (k->first == "bounded_rational")
            p.kind = PotentialKind::BoundedRational;
        else
            throw ConfigError("line " + std::to_string(k->second) + ": unknown potential kind '" +
                              k->first + "'");
    }
    if (const auto* a = get("amplitude")) p.amplitude = parse_double(a->first, a->second);
    if (const auto* e = get("exponent")) p.exponent = parse_double(e->first, e->second);
    if (const auto* e = get("eps")) p.eps = parse_double(e->first, e->second);
    return p;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    // First pass: (section.key -> value, line).
    std::map<std::string, std::pair<std::string, int>> kv;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = trim(line.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any [section]");
        if (!kv.emplace(section + "." + key, std::make_pair(val, lineno)).second)
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }

    static const std::vector<std::string> known = {
        "model.dim", "model.h_kind", "model.h_alpha", "model.f_coeffs", "model.f_exps",
        "model.v_kind", "model.v_amplitude", "model.v_exponent", "model.v_eps",
        "model.w_kind", "model.w_amplitude", "model.w_exponent", "model.w_eps",
        "grid.points", "grid.half_width",
        "solver.scheme", "solver.dt", "solver.t_end", "solver.sample_every",
        "solver.boundary_mass_tol", "solver.strict_boundary",
        "initial.kind", "initial.amplitude", "initial.width", "initial.mode", "initial.file",
        "diagnostics.enabled", "diagnostics.checkpoint_times", "diagnostics.interaction",
        "diagnostics.interaction_eps", "diagnostics.interaction_r0",
        "output.directory", "output.prefix",
        "run.seed", "run.sobolev_cs"};
    for (const auto& [key, vl] : kv)
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("line " + std::to_string(vl.second) + ": unknown key '" + key + "'");

    RunConfig cfg;
    auto get = [&](const std::string& key) -> const std::pair<std::string, int>* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    if (const auto* v = get("model.dim")) cfg.model.dim = static_cast<int>(parse_long(v->first, v->second));
    if (const auto* v = get("model.h_kind")) {
        if (v->first == "none")
            cfg.model.h.kind = HKind::None;
        else if (v->first == "power")
            cfg.model.h.kind = HKind::Power;
        else
            throw ConfigError("line " + std::to_string(v->second) + ": unknown h kind '" + v->first + "'");
    }
    if (const auto* v = get("model.h_alpha")) cfg.model.h.alpha = parse_double(v->first, v->second);
    {
        std::vector<double> coeffs, exps;
        if (const auto* v = get("model.f_coeffs")) coeffs = parse_list(v->first, v->second);
        if (const auto* v = get("model.f_exps")) exps = parse_list(v->first, v->second);
        if (coeffs.size() != exps.size())
            throw ConfigError("model.f_coeffs and model.f_exps must have the same length");
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            cfg.model.f.terms.push_back(FTerm{coeffs[i], exps[i]});
    }
    cfg.model.v = parse_potential("model.v_", kv);
    cfg.model.w = parse_potential("model.w_", kv);

    if (const auto* v = get("grid.points")) cfg.grid.m = static_cast<int>(parse_long(v->first, v->second));
    if (const auto* v = get("grid.half_width")) cfg.grid.half_width = parse_double(v->first, v->second);
    cfg.grid.dim = cfg.model.dim;

    if (const auto* v = get("solver.scheme")) {
        if (v->first == "strang")
            cfg.solver.scheme = Scheme::Strang;
        else if (v->first == "ifrk4")
            cfg.solver.scheme = Scheme::IfRk4;
        else
            throw ConfigError("line " + std::to_string(v->second) + ": unknown scheme '" + v->first + "'");
    }
    if (const auto* v = get("solver.dt")) cfg.solver.dt = parse_double(v->first, v->second);
    if (const auto* v = get("solver.t_end")) cfg.solver.t_end = parse_double(v->first, v->second);
    if (const auto* v = get("solver.sample_every"))
        cfg.solver.sample_every = static_cast<int>(parse_long(v->first, v->second));
    if (const auto* v = get("solver.boundary_mass_tol"))
        cfg.solver.boundary_mass_tol = parse_double(v->first, v->second);
    if (const auto* v = get("solver.strict_boundary"))
        cfg.solver.strict_boundary = parse_bool(v->first, v->second);

    if (const auto* v = get("initial.kind")) {
        if (v->first == "gaussian")
            cfg.initial.kind = InitialKind::Gaussian;
        else if (v->first == "plane_wave")
            cfg.initial.kind = InitialKind::PlaneWave;
        else if (v->first == "file")
            cfg.initial.kind = InitialKind::File;
        else
            throw ConfigError("line " + std::to_string(v->second) + ": unknown initial kind '" +
                              v->first + "'");
    }
    if (const auto* v = get("initial.amplitude")) cfg.initial.amplitude = parse_double(v->first, v->second);
    if (const auto* v = get("initial.width")) cfg.initial.width = parse_double(v->first, v->second);
    if (const auto* v = get("initial.mode"))
        cfg.initial.mode = static_cast<int>(parse_long(v->first, v->second));
    if (const auto* v = get("initial.file")) cfg.initial.file = v->first;

    if (const auto* v = get("diagnostics.enabled")) cfg.diagnostics_enabled = parse_bool(v->first, v->second);
    if (const auto* v = get("diagnostics.checkpoint_times"))
        cfg.checkpoint_times = parse_list(v->first, v->second);
    if (const auto* v = get("diagnostics.interaction")) cfg.interaction_enabled = parse_bool(v->first, v->second);
    if (const auto* v = get("diagnostics.interaction_eps"))
        cfg.interaction_eps = parse_double(v->first, v->second);
    if (const auto* v = get("diagnostics.interaction_r0"))
        cfg.interaction_r0 = parse_double(v->first, v->second);

    if (const auto* v = get("output.directory")) cfg.output_dir = v->first;
    if (const auto* v = get("output.prefix")) cfg.prefix = v->first;
    if (const auto* v = get("run.seed")) cfg.seed = parse_long(v->first, v->second);
    if (const auto* v = get("run.sobolev_cs")) cfg.sobolev_cs = parse_double(v->first, v->second);

    // Default regularization: one grid spacing.
    if (cfg.model.v.kind == PotentialKind::SmoothedInversePower && cfg.model.v.eps == 0.0)
        cfg.model.v.eps = cfg.grid.dx();
    if (cfg.model.w.kind == PotentialKind::SmoothedInversePower && cfg.model.w.eps == 0.0)
        cfg.model.w.eps = cfg.grid.dx();

    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    model.validate();
    grid.validate();
    try {
        solver.validate(model, grid);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("solver/model: ") + e.what());
    }
    for (double t : checkpoint_times)
        if (t < 0.0 || t > solver.t_end + 1e-12)
            throw ConfigError("checkpoint time " + std::to_string(t) + " outside [0, t_end]");
    if (interaction_enabled) {
        if (grid.dim == 1 && interaction_eps < 2.0 * grid.dx())
            throw ConfigError("diagnostics.interaction_eps must be >= 2 dx");
        if (grid.dim == 2 && interaction_r0 != 0.0 && interaction_r0 < grid.dx())
            throw ConfigError("diagnostics.interaction_r0 must be >= dx");
    }
    if (initial.kind == InitialKind::File && initial.file.empty())
        throw ConfigError("initial.kind = file needs initial.file");
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

Field build_initial(const RunConfig& cfg) {
    Field u(cfg.grid);
    const Grid& g = cfg.grid;
    switch (cfg.initial.kind) {
        case InitialKind::Gaussian: {
            const double w2 = cfg.initial.width * cfg.initial.width;
            for (std::size_t i = 0; i < u.size(); ++i)
                u.v[i] = cfg.initial.amplitude * std::exp(-0.5 * radius_sq(g, i) / w2);
            break;
        }
        case InitialKind::PlaneWave: {
            const double k = cfg.initial.mode * std::numbers::pi / g.half_width;
            for (std::size_t i = 0; i < u.size(); ++i) {
                const auto ix = unravel(g, i);
                u.v[i] = cfg.initial.amplitude * std::polar(1.0, k * g.x(ix[0]));
            }
            break;
        }
        case InitialKind::File: {
            const Checkpoint ck = read_checkpoint(cfg.initial.file);
            if (!(ck.field.grid == g))
                throw ConfigError("initial.file grid does not match [grid]");
            u = ck.field;
            break;
        }
    }
    return u;
}

std::string render_config(const RunConfig& cfg) {
    auto g = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    std::string s;
    s += "[model]\n";
    s += "dim = " + std::to_string(cfg.model.dim) + "\n";
    s += std::string("h_kind = ") + (cfg.model.h.active() ? "power" : "none") + "\n";
    if (cfg.model.h.active()) s += "h_alpha = " + g(cfg.model.h.alpha) + "\n";
    if (!cfg.model.f.terms.empty()) {
        std::string cs, es;
        for (std::size_t i = 0; i < cfg.model.f.terms.size(); ++i) {
            cs += (i ? "," : "") + g(cfg.model.f.terms[i].coeff);
            es += (i ? "," : "") + g(cfg.model.f.terms[i].exponent);
        }
        s += "f_coeffs = " + cs + "\nf_exps = " + es + "\n";
    }
    auto pot = [&](const char* pfx, const PotentialSpec& p) {
        std::string o = std::string(pfx) + "kind = ";
        switch (p.kind) {
            case PotentialKind::Zero: o += "zero\n"; break;
            case PotentialKind::SmoothedInversePower:
                o += "inverse_power\n";
                o += std::string(pfx) + "amplitude = " + g(p.amplitude) + "\n";
                o += std::string(pfx) + "exponent = " + g(p.exponent) + "\n";
                o += std::string(pfx) + "eps = " + g(p.eps) + "\n";
                break;
            case PotentialKind::BoundedRational:
                o += "bounded_rational\n";
                o += std::string(pfx) + "amplitude = " + g(p.amplitude) + "\n";
                break;
        }
        return o;
    };
    s += pot("v_", cfg.model.v);
    s += pot("w_", cfg.model.w);
    s += "[grid]\npoints = " + std::to_string(cfg.grid.m) +
         "\nhalf_width = " + g(cfg.grid.half_width) + "\n";
    s += "[solver]\nscheme = " + std::string(cfg.solver.scheme == Scheme::Strang ? "strang" : "ifrk4") +
         "\ndt = " + g(cfg.solver.dt) + "\nt_end = " + g(cfg.solver.t_end) +
         "\nsample_every = " + std::to_string(cfg.solver.sample_every) +
         "\nboundary_mass_tol = " + g(cfg.solver.boundary_mass_tol) +
         "\nstrict_boundary = " + (cfg.solver.strict_boundary ? "true" : "false") + "\n";
    s += "[initial]\nkind = ";
    switch (cfg.initial.kind) {
        case InitialKind::Gaussian:
            s += "gaussian\namplitude = " + g(cfg.initial.amplitude) + "\nwidth = " +
                 g(cfg.initial.width) + "\n";
            break;
        case InitialKind::PlaneWave:
            s += "plane_wave\namplitude = " + g(cfg.initial.amplitude) +
                 "\nmode = " + std::to_string(cfg.initial.mode) + "\n";
            break;
        case InitialKind::File:
            s += "file\nfile = " + cfg.initial.file + "\n";
            break;
    }
    s += "[diagnostics]\nenabled = " + std::string(cfg.diagnostics_enabled ? "true" : "false") + "\n";
    if (!cfg.checkpoint_times.empty()) {
        std::string ts;
        for (std::size_t i = 0; i < cfg.checkpoint_times.size(); ++i)
            ts += (i ? "," : "") + g(cfg.checkpoint_times[i]);
        s += "checkpoint_times = " + ts + "\n";
    }
    s += "interaction = " + std::string(cfg.interaction_enabled ? "true" : "false") + "\n";
    if (cfg.interaction_enabled) {
        s += "interaction_eps = " + g(cfg.interaction_eps) + "\n";
        if (cfg.interaction_r0 != 0.0) s += "interaction_r0 = " + g(cfg.interaction_r0) + "\n";
    }
    s += "[output]\ndirectory = " + cfg.output_dir + "\nprefix = " + cfg.prefix + "\n";
    s += "[run]\nseed = " + std::to_string(cfg.seed) + "\n";
    if (cfg.sobolev_cs != 0.0) s += "sobolev_cs = " + g(cfg.sobolev_cs) + "\n";
    return s;
}

}  // namespace qsl
