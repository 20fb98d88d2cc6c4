#include "fracflow/io.hpp"

#include "fracflow/error.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fracflow {

using nlohmann::json;

std::string format_double(double v)
{
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace {

std::string grid_header(const Grid& g)
{
    std::string s = "# grid: " + std::to_string(g.dim());
    for (std::size_t a = 0; a < g.dim(); ++a) s += "," + std::to_string(g.n(a));
    for (std::size_t a = 0; a < g.dim(); ++a) s += "," + format_double(g.length(a));
    for (std::size_t a = 0; a < g.dim(); ++a) s += "," + format_double(g.origin(a));
    return s + "\n";
}

double parse_double(const std::string& tok, const std::string& path)
{
    const char* b = tok.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(b, &end);
    if (end == b || *end != '\0') throw ConfigError(path + ": cannot parse number '" + tok + "'");
    return v;
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

Grid parse_grid_header(const std::string& line, const std::string& path)
{
    const std::string tag = "# grid:";
    if (line.rfind(tag, 0) != 0) throw ConfigError(path + ": missing '# grid:' header");
    std::vector<std::string> tok = split(line.substr(tag.size()), ',');
    if (tok.empty()) throw ConfigError(path + ": empty grid header");
    const double dd = parse_double(tok[0].substr(tok[0].find_first_not_of(' ')), path);
    const std::size_t d = static_cast<std::size_t>(dd);
    if (dd != static_cast<double>(d) || d == 0 || tok.size() != 1 + 3 * d)
        throw ConfigError(path + ": malformed grid header");
    std::vector<std::size_t> n(d);
    Vec L(d), o(d);
    for (std::size_t a = 0; a < d; ++a) {
        const double na = parse_double(tok[1 + a], path);
        n[a] = static_cast<std::size_t>(na);
        L[a] = parse_double(tok[1 + d + a], path);
        o[a] = parse_double(tok[1 + 2 * d + a], path);
    }
    return Grid(n, L, o);
}

void write_grid_rows(std::ostream& os, const std::vector<ScalarField>& fields)
{
    const Grid& g = fields.front().grid;
    std::string line;
    for (std::size_t i = 0; i < g.size(); ++i) {
        line.clear();
        const std::vector<std::size_t> idx = g.unravel(i);
        for (std::size_t a = 0; a < g.dim(); ++a) {
            line += format_double(g.coord(a, idx[a]));
            line += ',';
        }
        for (std::size_t c = 0; c < fields.size(); ++c) {
            line += format_double(fields[c].values[i]);
            line += c + 1 < fields.size() ? ',' : '\n';
        }
        os << line;
    }
}

}  // namespace

void write_text_atomic(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw ConfigError("cannot open '" + tmp.string() + "' for writing");
        os << content;
        if (!os) throw ConfigError("write to '" + tmp.string() + "' failed");
    }
    fs::rename(tmp, target);
}

void write_fields_csv(const std::string& path, const std::vector<ScalarField>& fields)
{
    if (fields.empty()) throw DomainError("write_fields_csv: nothing to write");
    for (const ScalarField& f : fields)
        if (f.grid != fields.front().grid) throw DimensionError("write_fields_csv: fields live on different grids");
    std::ostringstream os;
    os << grid_header(fields.front().grid);
    write_grid_rows(os, fields);
    write_text_atomic(path, os.str());
}

void write_field_csv(const std::string& path, const ScalarField& f) { write_fields_csv(path, {f}); }

Grid read_field_grid(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open field file '" + path + "'");
    std::string line;
    std::getline(is, line);
    return parse_grid_header(line, path);
}

std::size_t field_csv_columns(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open field file '" + path + "'");
    std::string line;
    std::getline(is, line);
    const Grid g = parse_grid_header(line, path);
    if (!std::getline(is, line)) throw ConfigError(path + ": no data rows");
    const std::size_t cols = split(line, ',').size();
    if (cols <= g.dim()) throw ConfigError(path + ": rows carry no value column");
    return cols - g.dim();
}

ScalarField read_field_csv(const std::string& path, std::size_t column)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open field file '" + path + "'");
    std::string line;
    if (!std::getline(is, line)) throw ConfigError(path + ": empty file");
    const Grid g = parse_grid_header(line, path);
    ScalarField f(g);
    std::size_t row = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (row >= g.size()) throw ConfigError(path + ": more rows than grid points");
        const std::vector<std::string> tok = split(line, ',');
        if (tok.size() <= g.dim() + column) throw ConfigError(path + ": row " + std::to_string(row + 2) + " is too short");
        f.values[row] = parse_double(tok[g.dim() + column], path);
        ++row;
    }
    if (row != g.size())
        throw ConfigError(path + ": expected " + std::to_string(g.size()) + " rows, found " + std::to_string(row));
    return f;
}

void write_ensemble_csv(const std::string& path, const Ensemble& e)
{
    std::string out;
    out.reserve(e.points.size() * 24);
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double* x = e.point(i);
        for (std::size_t c = 0; c < e.dim; ++c) {
            out += format_double(x[c]);
            out += c + 1 < e.dim ? ',' : '\n';
        }
    }
    write_text_atomic(path, out);
}

void write_json(const std::string& path, const json& j) { write_text_atomic(path, j.dump(2) + "\n"); }

json read_json(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open '" + path + "'");
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string sidecar_path(const std::string& data_path)
{
    const std::string ext = ".csv";
    if (data_path.size() > ext.size() && data_path.compare(data_path.size() - ext.size(), ext.size(), ext) == 0)
        return data_path.substr(0, data_path.size() - ext.size()) + ".json";
    return data_path + ".json";
}

json grid_json(const Grid& g)
{
    return {{"d", g.dim()}, {"n", g.shape()}, {"length", g.lengths()}, {"origin", g.origins()}};
}

json frame_json(const Frame& f)
{
    json j = json::array();
    for (std::size_t l = 0; l < f.dim(); ++l) j.push_back(f[l].components());
    return j;
}

json jump_json(const JumpLaw& j)
{
    json o = {{"kind", to_string(j.kind)}};
    switch (j.kind) {
    case JumpLaw::Kind::FixedVector: o["vector"] = j.vector; break;
    case JumpLaw::Kind::FoldedGaussian:
        o["beta"] = j.beta;
        o["r"] = j.r;
        o["p"] = j.p;
        break;
    case JumpLaw::Kind::UserTable:
        o["atoms"] = j.atoms;
        o["weights"] = j.weights;
        break;
    }
    return o;
}

json descriptor_json(const ProcessDescriptor& d)
{
    json j = {{"process", d.process}, {"d", d.d},           {"frame", frame_json(d.frame)},
              {"alpha", d.alpha},     {"lambda", d.lambda}, {"t", d.t}};
    if (!d.u.empty()) j["u"] = d.u;
    if (!d.theta.empty()) j["theta"] = d.theta;
    if (d.process == "compound-poisson" || d.process == "subordinated-cp" || d.process == "compensated-levy")
        j["jump"] = jump_json(d.jump);
    if (d.tau) j["tau"] = to_string(*d.tau);
    return j;
}

}  // namespace fracflow
