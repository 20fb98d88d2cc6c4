#include "fracflow/config.hpp"

#include "fracflow/error.hpp"
#include "fracflow/io.hpp"
#include "fracflow/validation.hpp"

#include <toml.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace fracflow {

using nlohmann::json;

namespace {

json node_to_json(const toml::node& n, const std::string& where)
{
    if (const auto* t = n.as_table()) {
        json o = json::object();
        for (const auto& [k, v] : *t) o[std::string(k.str())] = node_to_json(v, where + "." + std::string(k.str()));
        return o;
    }
    if (const auto* a = n.as_array()) {
        json arr = json::array();
        for (const auto& v : *a) arr.push_back(node_to_json(v, where));
        return arr;
    }
    if (const auto* s = n.as_string()) return s->get();
    if (const auto* i = n.as_integer()) return i->get();
    if (const auto* f = n.as_floating_point()) return f->get();
    if (const auto* b = n.as_boolean()) return b->get();
    throw ConfigError(where + ": dates and times are not supported");
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed)
{
    if (!obj.is_object()) throw ConfigError(where + " must be a table");
    for (const auto& [k, v] : obj.items())
        if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

const json& section(const json& cfg, const std::string& name)
{
    static const json empty = json::object();
    if (!cfg.contains(name)) return empty;
    const json& s = cfg.at(name);
    if (!s.is_object()) throw ConfigError("[" + name + "] must be a table");
    return s;
}

const json& require(const json& s, const std::string& where, const std::string& key)
{
    if (!s.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
    return s.at(key);
}

double number(const json& v, const std::string& what)
{
    if (!v.is_number()) throw ConfigError(what + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(what + " must be finite");
    return x;
}

double number_or(const json& s, const std::string& key, double dflt, const std::string& where)
{
    return s.contains(key) ? number(s.at(key), where + "." + key) : dflt;
}

std::int64_t integer(const json& v, const std::string& what)
{
    if (!v.is_number_integer()) throw ConfigError(what + " must be an integer");
    return v.get<std::int64_t>();
}

Vec vec(const json& v, const std::string& what)
{
    if (v.is_number()) return {number(v, what)};
    if (!v.is_array()) throw ConfigError(what + " must be an array of numbers");
    Vec out;
    for (const json& e : v) out.push_back(number(e, what));
    return out;
}

std::string string(const json& v, const std::string& what)
{
    if (!v.is_string()) throw ConfigError(what + " must be a string");
    return v.get<std::string>();
}

void in_range(double v, double lo, bool lo_open, double hi, bool hi_open, const std::string& what)
{
    const bool ok = (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
    if (!ok) {
        std::ostringstream os;
        os << what << " = " << v << " must lie in " << (lo_open ? "(" : "[") << lo << "," << hi << (hi_open ? ")" : "]");
        throw ConfigError(os.str());
    }
}

Grid parse_grid(const json& cfg, json& norm)
{
    const json& g = section(cfg, "grid");
    check_keys(g, "[grid]", {"d", "n", "length", "origin"});
    const json& nj = require(g, "[grid]", "n");
    const json& lj = require(g, "[grid]", "length");
    std::size_t d = 0;
    if (g.contains("d")) {
        const std::int64_t dd = integer(g.at("d"), "grid.d");
        if (dd < 1 || dd > 3) throw ConfigError("grid.d must be 1, 2 or 3");
        d = static_cast<std::size_t>(dd);
    }
    if (nj.is_array()) d = d ? d : nj.size();
    else if (lj.is_array()) d = d ? d : lj.size();
    if (d == 0) d = 1;
    std::vector<std::size_t> n;
    if (nj.is_array()) {
        for (const json& e : nj) {
            const std::int64_t v = integer(e, "grid.n");
            if (v < 1) throw ConfigError("grid.n entries must be positive");
            n.push_back(static_cast<std::size_t>(v));
        }
    } else {
        const std::int64_t v = integer(nj, "grid.n");
        if (v < 1) throw ConfigError("grid.n must be positive");
        n.assign(d, static_cast<std::size_t>(v));
    }
    Vec L = vec(lj, "grid.length");
    if (L.size() == 1 && d > 1) L.assign(d, L[0]);
    Vec o;
    if (g.contains("origin")) o = vec(g.at("origin"), "grid.origin");
    if (n.size() != d || L.size() != d || (!o.empty() && o.size() != d))
        throw ConfigError("[grid] entries disagree on the dimension");
    try {
        Grid grid(n, L, o);
        norm["grid"] = grid_json(grid);
        norm["grid"].erase("d");
        return grid;
    } catch (const Error& e) {
        throw ConfigError(std::string("[grid]: ") + e.what());
    }
}

Frame parse_frame(const json& cfg, std::size_t d, json& norm)
{
    const json& f = section(cfg, "frame");
    check_keys(f, "[frame]", {"angles", "rows"});
    if (f.contains("angles") && f.contains("rows")) throw ConfigError("[frame]: give either angles or rows, not both");
    try {
        Frame frame = Frame::canonical(d);
        if (f.contains("angles")) {
            frame = frame_from_angles(d, vec(f.at("angles"), "frame.angles"));
        } else if (f.contains("rows")) {
            std::vector<Vec> rows;
            if (!f.at("rows").is_array()) throw ConfigError("frame.rows must be an array of arrays");
            for (const json& r : f.at("rows")) rows.push_back(vec(r, "frame.rows"));
            frame = Frame(rows);
        }
        if (frame.dim() != d) throw ConfigError("[frame] dimension differs from d = " + std::to_string(d));
        norm["frame"] = {{"rows", frame_json(frame)}};
        return frame;
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("[frame]: ") + e.what());
    }
}

Vec parse_direction(const json& v, std::size_t d, const std::string& what)
{
    const Vec th = vec(v, what);
    if (th.size() != d) throw ConfigError(what + " must have " + std::to_string(d) + " entries");
    if (norm(th) == 0.0) throw ConfigError(what + " must be nonzero");
    return Direction::normalized(th).components();
}

void check_top(const json& cfg, const std::set<std::string>& allowed)
{
    if (!cfg.is_object()) throw ConfigError("config must be a table");
    for (const auto& [k, v] : cfg.items())
        if (!allowed.count(k)) throw ConfigError("unknown section or key '" + k + "'");
}

JumpLaw parse_jump(const json& cfg, std::size_t d, json& norm)
{
    const json& j = section(cfg, "jump");
    check_keys(j, "[jump]", {"kind", "vector", "beta", "r", "p", "atoms", "weights"});
    const std::string kind = string(require(j, "[jump]", "kind"), "jump.kind");
    JumpLaw law;
    try {
        switch (parse_jump_kind(kind)) {
        case JumpLaw::Kind::FixedVector: law = JumpLaw::fixed(vec(require(j, "[jump]", "vector"), "jump.vector")); break;
        case JumpLaw::Kind::FoldedGaussian:
            law = JumpLaw::folded_gaussian(number(require(j, "[jump]", "beta"), "jump.beta"),
                                           number(require(j, "[jump]", "r"), "jump.r"), number_or(j, "p", 0.5, "jump"));
            break;
        case JumpLaw::Kind::UserTable: {
            std::vector<Vec> atoms;
            const json& a = require(j, "[jump]", "atoms");
            if (!a.is_array()) throw ConfigError("jump.atoms must be an array of arrays");
            for (const json& e : a) atoms.push_back(vec(e, "jump.atoms"));
            law = JumpLaw::table(atoms, vec(require(j, "[jump]", "weights"), "jump.weights"));
            break;
        }
        }
        law.validate(d);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("[jump]: ") + e.what());
    }
    norm["jump"] = jump_json(law);
    return law;
}

}  // namespace

json parse_toml(const std::string& text, const std::string& source)
{
    try {
        const toml::table t = toml::parse(text, std::string_view(source));
        return node_to_json(t, source);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
        throw ConfigError(os.str());
    }
}

json load_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config '" + path + "'");
    const std::string ext = ".json";
    if (path.size() > ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0) {
        const json side = read_json(path);
        if (!side.contains("config")) throw ConfigError(path + ": sidecar has no 'config' member");
        return side.at("config");
    }
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_toml(ss.str(), path);
}

SolveConfig parse_solve_config(const json& cfg)
{
    check_top(cfg, {"grid", "initial", "frame", "solve"});
    SolveConfig out;
    json norm = json::object();
    out.grid = parse_grid(cfg, norm);
    const std::size_t d = out.grid.dim();

    const json& ic = section(cfg, "initial");
    check_keys(ic, "[initial]", {"kind", "path", "sigma", "center"});
    out.initial.kind = ic.contains("kind") ? string(ic.at("kind"), "initial.kind") : "delta";
    json icn = {{"kind", out.initial.kind}};
    if (out.initial.kind == "file") {
        out.initial.path = string(require(ic, "[initial]", "path"), "initial.path");
        icn["path"] = out.initial.path;
    } else if (out.initial.kind == "gaussian") {
        out.initial.sigma = number_or(ic, "sigma", 1.0, "initial");
        if (!(out.initial.sigma > 0.0)) throw ConfigError("initial.sigma must be > 0");
        out.initial.center = ic.contains("center") ? vec(ic.at("center"), "initial.center") : Vec(d, 0.0);
        if (out.initial.center.size() != d) throw ConfigError("initial.center must have d entries");
        icn["sigma"] = out.initial.sigma;
        icn["center"] = out.initial.center;
    } else if (out.initial.kind != "delta") {
        throw ConfigError("initial.kind must be delta, gaussian or file");
    }
    norm["initial"] = icn;

    SolveSpec& sp = out.spec;
    sp.frame = parse_frame(cfg, d, norm);
    const json& s = section(cfg, "solve");
    check_keys(s, "[solve]", {"kind", "alpha", "beta", "lambda", "t", "u", "theta", "subordination"});
    try {
        sp.kind = parse_solve_kind(string(require(s, "[solve]", "kind"), "solve.kind"));
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    sp.alpha = number_or(s, "alpha", 1.0, "solve");
    in_range(sp.alpha, 0.0, true, 1.0, false, "solve.alpha");
    sp.t = number(require(s, "[solve]", "t"), "solve.t");
    if (sp.t < 0.0) throw ConfigError("solve.t must be >= 0");
    json sn = {{"kind", to_string(sp.kind)}, {"alpha", sp.alpha}, {"t", sp.t}};
    if (sp.kind != SolveKind::HeatDirectional) {
        sp.u = s.contains("u") ? vec(s.at("u"), "solve.u") : Vec(d, 0.0);
        if (sp.u.size() != d) throw ConfigError("solve.u must have " + std::to_string(d) + " entries");
        sn["u"] = sp.u;
    }
    if (sp.kind == SolveKind::Fade) {
        sp.beta = number(require(s, "[solve]", "beta"), "solve.beta");
        in_range(*sp.beta, 1.0, true, 2.0, true, "solve.beta");
        sn["beta"] = *sp.beta;
    } else if (s.contains("beta")) {
        throw ConfigError("solve.beta only applies to kind = fade");
    }
    if (sp.kind == SolveKind::FpTransport) {
        sp.lambda = number_or(s, "lambda", 0.0, "solve");
        if (sp.lambda < 0.0) throw ConfigError("solve.lambda must be >= 0");
        sn["lambda"] = sp.lambda;
    } else if (s.contains("lambda")) {
        throw ConfigError("solve.lambda only applies to kind = fp-transport");
    }
    if (sp.kind == SolveKind::HeatDirectional) {
        if (s.contains("u")) throw ConfigError("solve.u does not apply to kind = heat-directional");
        sp.theta = s.contains("theta") ? parse_direction(s.at("theta"), d, "solve.theta") : sp.frame[0].components();
        sp.subordination = s.contains("subordination") && s.at("subordination").is_boolean()
                               ? s.at("subordination").get<bool>()
                               : false;
        if (s.contains("subordination") && !s.at("subordination").is_boolean())
            throw ConfigError("solve.subordination must be true or false");
        sn["theta"] = *sp.theta;
        sn["subordination"] = sp.subordination;
    } else if (s.contains("theta") || s.contains("subordination")) {
        throw ConfigError("solve.theta and solve.subordination only apply to kind = heat-directional");
    }
    norm["solve"] = sn;
    out.normalized = norm;
    return out;
}

ScalarField build_initial(const SolveConfig& cfg)
{
    const InitialCondition& ic = cfg.initial;
    if (ic.kind == "delta") {
        try {
            return delta_field(cfg.grid);
        } catch (const Error& e) {
            throw ConfigError(std::string("initial delta: ") + e.what());
        }
    }
    if (ic.kind == "gaussian") {
        const std::size_t d = cfg.grid.dim();
        const double norm_c = std::pow(2.0 * kPi * ic.sigma * ic.sigma, -0.5 * static_cast<double>(d));
        return sample_field(cfg.grid, [&](const Vec& x) {
            double r2 = 0.0;
            for (std::size_t a = 0; a < d; ++a) r2 += (x[a] - ic.center[a]) * (x[a] - ic.center[a]);
            return norm_c * std::exp(-0.5 * r2 / (ic.sigma * ic.sigma));
        });
    }
    ScalarField f = read_field_csv(ic.path);
    if (f.grid != cfg.grid) throw ConfigError("initial file '" + ic.path + "' is not on the configured grid");
    return f;
}

SampleConfig parse_sample_config(const json& cfg, std::optional<std::uint64_t> seed_override)
{
    check_top(cfg, {"process", "frame", "jump"});
    SampleConfig out;
    ProcessDescriptor& p = out.desc;
    json norm = json::object();
    const json& s = section(cfg, "process");
    check_keys(s, "[process]", {"name", "d", "alpha", "lambda", "t", "u", "theta", "tau", "n", "seed"});
    p.process = string(require(s, "[process]", "name"), "process.name");
    static const std::set<std::string> known = {"advection",        "subordinated-bm",  "compound-poisson",
                                                "subordinated-cp", "compensated-levy", "fp"};
    if (!known.count(p.process)) throw ConfigError("unknown process '" + p.process + "'");
    const std::int64_t n = integer(require(s, "[process]", "n"), "process.n");
    if (n < 1) throw ConfigError("process.n must be >= 1 (got " + std::to_string(n) + ")");
    out.n = static_cast<std::size_t>(n);
    if (seed_override) {
        out.seed = *seed_override;
    } else if (s.contains("seed")) {
        const std::int64_t sd = integer(s.at("seed"), "process.seed");
        if (sd < 0) throw ConfigError("process.seed must be >= 0");
        out.seed = static_cast<std::uint64_t>(sd);
    } else {
        out.seed = 1;
    }
    std::int64_t d = 1;
    if (s.contains("d")) d = integer(s.at("d"), "process.d");
    else if (s.contains("u")) d = static_cast<std::int64_t>(vec(s.at("u"), "process.u").size());
    else if (s.contains("theta")) d = static_cast<std::int64_t>(vec(s.at("theta"), "process.theta").size());
    if (d < 1 || d > 3) throw ConfigError("process.d must be 1, 2 or 3");
    p.d = static_cast<std::size_t>(d);
    p.frame = parse_frame(cfg, p.d, norm);
    p.alpha = number_or(s, "alpha", 1.0, "process");
    in_range(p.alpha, 0.0, true, 1.0, false, "process.alpha");
    p.t = number(require(s, "[process]", "t"), "process.t");
    if (p.t < 0.0) throw ConfigError("process.t must be >= 0");
    p.lambda = number_or(s, "lambda", 0.0, "process");
    if (p.lambda < 0.0) throw ConfigError("process.lambda must be >= 0");
    const bool needs_u = p.process == "advection" || p.process == "fp";
    const bool needs_jump = p.process == "compound-poisson" || p.process == "subordinated-cp" ||
                            p.process == "compensated-levy";
    if (needs_u) {
        p.u = s.contains("u") ? vec(s.at("u"), "process.u") : Vec(p.d, 0.0);
        if (p.u.size() != p.d) throw ConfigError("process.u must have d entries");
    } else if (s.contains("u")) {
        throw ConfigError("process.u does not apply to process '" + p.process + "'");
    }
    if (p.process == "subordinated-bm") {
        p.theta = parse_direction(require(s, "[process]", "theta"), p.d, "process.theta");
    } else if (s.contains("theta")) {
        throw ConfigError("process.theta only applies to subordinated-bm");
    }
    if (needs_jump) {
        p.jump = parse_jump(cfg, p.d, norm);
    } else if (cfg.contains("jump")) {
        throw ConfigError("[jump] does not apply to process '" + p.process + "'");
    }
    if (s.contains("tau")) {
        if (p.process != "compound-poisson" && p.process != "subordinated-cp")
            throw ConfigError("process.tau only applies to compound-poisson and subordinated-cp");
        try {
            p.tau = parse_tau(string(s.at("tau"), "process.tau"));
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
        if (*p.tau == TauMap::Identity && p.d != 1) throw ConfigError("tau = identity requires d = 1");
    }
    if (p.process == "subordinated-cp") {
        if (!p.tau) throw ConfigError("subordinated-cp requires process.tau");
        if (*p.tau == TauMap::Identity) {
            bool neg = false;
            if (p.jump.kind == JumpLaw::Kind::FixedVector) neg = p.jump.vector[0] < 0.0;
            if (p.jump.kind == JumpLaw::Kind::FoldedGaussian) neg = p.jump.p < 1.0;
            if (p.jump.kind == JumpLaw::Kind::UserTable)
                for (std::size_t a = 0; a < p.jump.atoms.size(); ++a)
                    neg = neg || (p.jump.weights[a] > 0.0 && p.jump.atoms[a][0] < 0.0);
            if (neg) throw ConfigError("tau = identity takes negative values on the jump support");
        }
    }
    if (p.process == "compensated-levy" && p.jump.kind == JumpLaw::Kind::FoldedGaussian && p.jump.p != 0.5 &&
        !(p.jump.beta > 0.5))
        throw ConfigError("compensated-levy needs a finite jump mean: folded-gaussian beta must exceed 1/2 when p != 1/2");
    json pn = {{"name", p.process}, {"d", p.d}, {"alpha", p.alpha}, {"t", p.t}, {"n", out.n}, {"seed", out.seed}};
    if (p.lambda != 0.0 || needs_jump || p.process == "fp") pn["lambda"] = p.lambda;
    if (needs_u) pn["u"] = p.u;
    if (!p.theta.empty()) pn["theta"] = p.theta;
    if (p.tau) pn["tau"] = to_string(*p.tau);
    norm["process"] = pn;
    out.normalized = norm;
    return out;
}

OpConfig parse_op_config(const json& cfg)
{
    check_top(cfg, {"op", "frame"});
    OpConfig out;
    json norm = json::object();
    const json& s = section(cfg, "op");
    check_keys(s, "[op]", {"name", "input", "beta", "alpha", "order", "shift", "theta"});
    out.name = string(require(s, "[op]", "name"), "op.name");
    out.input = string(require(s, "[op]", "input"), "op.input");
    json on = {{"name", out.name}, {"input", out.input}};
    const std::size_t d = read_field_grid(out.input).dim();
    auto forbid = [&](std::initializer_list<const char*> keys) {
        for (const char* k : keys)
            if (s.contains(k)) throw ConfigError(std::string("op.") + k + " does not apply to " + out.name);
    };
    if (out.name == "fractional-gradient" || out.name == "fractional-divergence") {
        out.beta = number(require(s, "[op]", "beta"), "op.beta");
        in_range(out.beta, 0.0, true, 1.0, false, "op.beta");
        out.frame = parse_frame(cfg, d, norm);
        forbid({"alpha", "order", "shift", "theta"});
        on["beta"] = out.beta;
    } else if (out.name == "directional-operator") {
        out.beta = number(require(s, "[op]", "beta"), "op.beta");
        in_range(out.beta, 1.0, true, 2.0, false, "op.beta");
        out.frame = parse_frame(cfg, d, norm);
        forbid({"alpha", "order", "shift", "theta"});
        on["beta"] = out.beta;
    } else if (out.name == "riesz") {
        if (d != 1) throw ConfigError("riesz applies to d = 1 fields");
        out.order = number(require(s, "[op]", "order"), "op.order");
        in_range(out.order, 0.0, true, 2.0, false, "op.order");
        forbid({"alpha", "beta", "shift", "theta"});
        on["order"] = out.order;
    } else if (out.name == "directional-second-power") {
        out.alpha = number(require(s, "[op]", "alpha"), "op.alpha");
        in_range(out.alpha, 0.0, true, 1.0, false, "op.alpha");
        out.theta = s.contains("theta") ? parse_direction(s.at("theta"), d, "op.theta") : Frame::canonical(d)[0].components();
        forbid({"beta", "order", "shift"});
        on["alpha"] = out.alpha;
        on["theta"] = out.theta;
    } else if (out.name == "fractional-shift") {
        if (d != 1) throw ConfigError("fractional-shift applies to d = 1 fields");
        out.alpha = number(require(s, "[op]", "alpha"), "op.alpha");
        in_range(out.alpha, 0.0, true, 1.0, false, "op.alpha");
        out.shift = number(require(s, "[op]", "shift"), "op.shift");
        if (out.shift < 0.0) throw ConfigError("op.shift must be >= 0");
        forbid({"beta", "order", "theta"});
        on["alpha"] = out.alpha;
        on["shift"] = out.shift;
    } else {
        throw ConfigError("unknown operator '" + out.name + "'");
    }
    if (!out.frame && cfg.contains("frame")) throw ConfigError("[frame] does not apply to " + out.name);
    norm["op"] = on;
    out.normalized = norm;
    return out;
}

ValidateConfig parse_validate_config(const json& cfg)
{
    check_top(cfg, {"validate"});
    const json& s = section(cfg, "validate");
    check_keys(s, "[validate]", {"cases", "all", "seed"});
    ValidateConfig out;
    if (s.contains("cases")) {
        if (!s.at("cases").is_array()) throw ConfigError("validate.cases must be an array of names");
        for (const json& c : s.at("cases")) out.cases.push_back(string(c, "validate.cases"));
    }
    if (s.contains("all")) {
        if (!s.at("all").is_boolean()) throw ConfigError("validate.all must be true or false");
        out.all = s.at("all").get<bool>();
    }
    if (s.contains("seed")) {
        const std::int64_t sd = integer(s.at("seed"), "validate.seed");
        if (sd < 0) throw ConfigError("validate.seed must be >= 0");
        out.seed = static_cast<std::uint64_t>(sd);
    }
    for (const std::string& c : out.cases)
        if (!is_validation_case(c)) throw ConfigError("unknown validation case '" + c + "'");
    return out;
}

}  // namespace fracflow
