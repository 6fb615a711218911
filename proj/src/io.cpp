#include "qsl/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace qsl {

namespace {

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_checkpoint(const std::string& path, const Field& u, double t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open checkpoint for writing: " + path);
    out << "qslab-ckpt 1 " << u.grid.dim << " " << u.grid.m << " " << fmt_g(u.grid.half_width)
        << " " << fmt_g(t) << "\n";
    static_assert(sizeof(cplx) == 16);
    out.write(reinterpret_cast<const char*>(u.v.data()),
              static_cast<std::streamsize>(u.v.size() * sizeof(cplx)));
    if (!out) throw IoError("short write on checkpoint: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    std::string header;
    if (!std::getline(in, header)) throw IoError("missing checkpoint header: " + path);
    std::istringstream hs(header);
    std::string magic;
    int version = 0, dim = 0, m = 0;
    double half_width = 0.0, t = 0.0;
    hs >> magic >> version >> dim >> m >> half_width >> t;
    if (magic != "qslab-ckpt" || version != 1)
        throw IoError("bad checkpoint magic/version in " + path);
    Checkpoint ck;
    ck.version = version;
    ck.t = t;
    ck.field.grid = Grid{dim, m, half_width};
    ck.field.grid.validate();
    ck.field.v.resize(ck.field.grid.size());
    in.read(reinterpret_cast<char*>(ck.field.v.data()),
            static_cast<std::streamsize>(ck.field.v.size() * sizeof(cplx)));
    if (in.gcount() != static_cast<std::streamsize>(ck.field.v.size() * sizeof(cplx)))
        throw IoError("truncated checkpoint payload in " + path);
    return ck;
}

const char* const kDiagnosticsCsvHeader =
    "t,mass,energy,variance,dilation,grad_l2,gradh_l2,pot_mass,hartree_quart,"
    "g_int,g1_int,g2_int,phi,p_value,p_expanded,theta,hu_sq,boundary_fraction,boundary_ok";

std::string diagnostics_csv(const std::vector<DiagnosticRecord>& records) {
    std::string s = std::string(kDiagnosticsCsvHeader) + "\n";
    for (const auto& r : records) {
        s += fmt_g(r.t);
        for (double v : {r.mass, r.energy, r.variance, r.dilation, r.grad_l2, r.gradh_l2,
                         r.pot_mass, r.hartree_quart, r.g_int, r.g1_int, r.g2_int, r.phi,
                         r.p_value, r.p_expanded, r.theta, r.hu_sq, r.boundary_fraction})
            s += "," + fmt_g(v);
        s += r.boundary_ok ? ",1" : ",0";
        s += "\n";
    }
    return s;
}

std::string table_csv(const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& data) {
    if (columns.size() != data.size()) throw IoError("table_csv: column/label mismatch");
    std::string s;
    for (std::size_t c = 0; c < columns.size(); ++c) s += (c ? "," : "") + columns[c];
    s += "\n";
    const std::size_t rows = data.empty() ? 0 : data.front().size();
    for (const auto& col : data)
        if (col.size() != rows) throw IoError("table_csv: ragged columns");
    for (std::size_t rix = 0; rix < rows; ++rix) {
        for (std::size_t c = 0; c < data.size(); ++c) s += (c ? "," : "") + fmt_g(data[c][rix]);
        s += "\n";
    }
    return s;
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return data[i];
    throw IoError("csv column not found: " + name);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open csv: " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty csv: " + path);
    std::stringstream hs(line);
    std::string item;
    while (std::getline(hs, item, ',')) t.columns.push_back(item);
    t.data.assign(t.columns.size(), {});
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::size_t c = 0;
        while (std::getline(ls, item, ',')) {
            if (c >= t.columns.size()) throw IoError("csv row wider than header: " + path);
            t.data[c++].push_back(std::strtod(item.c_str(), nullptr));
        }
        if (c != t.columns.size()) throw IoError("csv row narrower than header: " + path);
    }
    return t;
}

std::string export_plotdata(const std::vector<double>& x, const std::vector<double>& y,
                            PlotMode mode, double t_lo, double t_hi) {
    if (x.size() != y.size()) throw IoError("export_plotdata: mismatched series");
    std::string s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (mode != PlotMode::Linear && (x[i] <= 0.0 || y[i] <= 0.0)) continue;
        const double xa = mode == PlotMode::Linear ? x[i] : std::log10(x[i]);
        const double ya = mode == PlotMode::Linear ? y[i] : std::log10(y[i]);
        s += fmt_g(xa) + " " + fmt_g(ya) + "\n";
    }
    if (mode == PlotMode::SlopeFit && !x.empty()) {
        const auto [slope, icept] = loglog_slope(x, y, t_lo, t_hi);
        (void)icept;
        s += "# slope " + fmt_g(slope) + " over [" + fmt_g(t_lo) + ", " + fmt_g(t_hi) + "]\n";
    }
    return s;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << content;
    if (!out) throw IoError("short write: " + path);
}

}  // namespace qsl
