#include "fracflow/cli.hpp"

#include "fracflow/config.hpp"
#include "fracflow/error.hpp"
#include "fracflow/fracops.hpp"
#include "fracflow/io.hpp"
#include "fracflow/random.hpp"
#include "fracflow/solvers.hpp"
#include "fracflow/stochastic.hpp"
#include "fracflow/validation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>

namespace fracflow {

using nlohmann::json;

namespace {

json base_sidecar(const std::string& command, const json& config)
{
    return {{"command", command}, {"version", FRACFLOW_VERSION}, {"config", config}};
}

}  // namespace

int cmd_solve(const std::string& config_path, const std::string& out_path, std::ostream& out)
{
    const SolveConfig cfg = parse_solve_config(load_config(config_path));
    const ScalarField f0 = build_initial(cfg);
    const ScalarField rho = solve(cfg.spec, f0);
    check_box(rho);
    write_field_csv(out_path, rho);
    json side = base_sidecar("solve", cfg.normalized);
    side["grid"] = grid_json(rho.grid);
    side["diagnostics"] = {{"mass", mass(rho)},
                           {"min_value", min_value(rho)},
                           {"boundary_mass_fraction", boundary_mass_fraction(rho)}};
    write_json(sidecar_path(out_path), side);
    out << "mass " << format_double(mass(rho)) << "\n"
        << "min " << format_double(min_value(rho)) << "\n";
    return kExitOk;
}

int cmd_sample(const std::string& config_path, const std::string& out_path, std::optional<std::uint64_t> seed,
               std::ostream& out)
{
    const SampleConfig cfg = parse_sample_config(load_config(config_path), seed);
    const Ensemble ens = simulate(cfg.desc, cfg.n, cfg.seed);
    write_ensemble_csv(out_path, ens);
    json side = base_sidecar("sample", cfg.normalized);
    side["descriptor"] = descriptor_json(cfg.desc);
    side["seed"] = cfg.seed;
    side["n"] = cfg.n;
    side["t"] = cfg.desc.t;
    side["columns"] = ens.dim;
    write_json(sidecar_path(out_path), side);
    out << "seed " << cfg.seed << "\n";
    return kExitOk;
}

int cmd_validate(const std::vector<std::string>& cases, bool all, const std::string& report_path,
                 std::optional<std::uint64_t> seed, std::ostream& out)
{
    std::vector<std::string> names = all ? validation_cases() : cases;
    if (names.empty()) throw ConfigError("validate needs --case NAME or --all");
    for (const std::string& n : names)
        if (!is_validation_case(n)) throw ConfigError("unknown validation case '" + n + "'");
    ValidationOptions opt;
    if (seed) opt.seed = *seed;
    json reports = json::array();
    bool ok = true;
    for (const std::string& n : names) {
        const ValidationReport r = run_validation(n, opt);
        ok = ok && r.pass;
        out << (r.pass ? "PASS " : "FAIL ") << n << " (" << r.seconds << " s)\n";
        for (const Check& c : r.checks)
            if (!c.pass) out << "    " << c.name << " = " << c.value << " (limit " << c.threshold << ")\n";
        reports.push_back(to_json(r));
    }
    if (!report_path.empty()) write_json(report_path, {{"pass", ok}, {"version", FRACFLOW_VERSION}, {"cases", reports}});
    return ok ? kExitOk : kExitValidationFailed;
}

int cmd_apply_op(const std::string& config_path, const std::string& out_path, std::ostream& out)
{
    const OpConfig cfg = parse_op_config(load_config(config_path));
    std::vector<ScalarField> result;
    if (cfg.name == "fractional-divergence") {
        const Grid g = read_field_grid(cfg.input);
        const std::size_t cols = field_csv_columns(cfg.input);
        if (cols != g.dim())
            throw ConfigError("fractional-divergence needs " + std::to_string(g.dim()) + " value columns in '" +
                              cfg.input + "', found " + std::to_string(cols));
        std::vector<ScalarField> comps;
        for (std::size_t c = 0; c < cols; ++c) comps.push_back(read_field_csv(cfg.input, c));
        result.push_back(fractional_divergence(VectorField(g, comps), *cfg.frame, cfg.beta));
    } else {
        const ScalarField f = read_field_csv(cfg.input);
        if (cfg.name == "fractional-gradient") {
            result = fractional_gradient(f, *cfg.frame, cfg.beta).components;
        } else if (cfg.name == "directional-operator") {
            result.push_back(directional_operator(f, *cfg.frame, cfg.beta));
        } else if (cfg.name == "riesz") {
            result.push_back(riesz_derivative_1d(f, cfg.order));
        } else if (cfg.name == "directional-second-power") {
            result.push_back(fractional_power_directional_second(f, Direction(cfg.theta), cfg.alpha));
        } else {
            result.push_back(fractional_shift(f, cfg.shift, cfg.alpha));
        }
    }
    write_fields_csv(out_path, result);
    json side = base_sidecar("apply-op", cfg.normalized);
    side["grid"] = grid_json(result.front().grid);
    side["columns"] = result.size();
    write_json(sidecar_path(out_path), side);
    out << "wrote " << result.size() << " column(s) to " << out_path << "\n";
    return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Fractional directional calculus: solvers, process simulation and validation", "fracflow"};
    app.set_version_flag("--version", std::string(FRACFLOW_VERSION));
    app.require_subcommand(1);

    std::string config, out_path, report;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::vector<std::string> cases;
    bool all = false;

    auto add_threads = [&](CLI::App* s) {
        s->add_option("--threads", threads, "Worker threads (default: FRACFLOW_THREADS or all cores)")
            ->check(CLI::PositiveNumber);
    };
    CLI::App* solve = app.add_subcommand("solve", "Run a deterministic solver");
    solve->add_option("--config", config, "TOML config or output sidecar")->required();
    solve->add_option("--out", out_path, "Output field CSV")->required();
    add_threads(solve);

    CLI::App* sample = app.add_subcommand("sample", "Simulate a process ensemble");
    sample->add_option("--config", config, "TOML config or output sidecar")->required();
    sample->add_option("--out", out_path, "Output ensemble CSV")->required();
    sample->add_option("--seed", seed, "Override the configured seed");
    add_threads(sample);

    CLI::App* validate = app.add_subcommand("validate", "Run validation cases");
    validate->add_option("--case", cases, "Case name (repeatable)");
    validate->add_flag("--all", all, "Run every registered case");
    validate->add_option("--config", config, "TOML config with a [validate] table");
    validate->add_option("--out", report, "Write the JSON report here");
    validate->add_option("--seed", seed, "Base seed");
    validate->add_flag_callback("--list", [&]() {
        for (const std::string& n : validation_cases()) out << n << "\n";
        throw CLI::Success();
    }, "List case names and exit");
    add_threads(validate);

    CLI::App* apply = app.add_subcommand("apply-op", "Apply an operator to a stored field");
    apply->add_option("--config", config, "TOML config or output sidecar")->required();
    apply->add_option("--out", out_path, "Output field CSV")->required();
    add_threads(apply);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitConfigError;
    }

    const WarningHandler previous = set_warning_handler([&err](const std::string& m) { err << "warning: " << m << "\n"; });
    struct Restore {
        WarningHandler h;
        ~Restore() { set_warning_handler(h); }
    } restore{previous};
    const std::size_t old_threads = default_threads();
    struct RestoreThreads {
        std::size_t n;
        ~RestoreThreads() { set_default_threads(n); }
    } restore_threads{old_threads};
    if (threads) set_default_threads(*threads);

    try {
        if (*solve) return cmd_solve(config, out_path, out);
        if (*sample) return cmd_sample(config, out_path, seed, out);
        if (*apply) return cmd_apply_op(config, out_path, out);
        if (!config.empty()) {
            const ValidateConfig vc = parse_validate_config(load_config(config));
            cases.insert(cases.end(), vc.cases.begin(), vc.cases.end());
            all = all || vc.all;
            if (!seed) seed = vc.seed;
        }
        return cmd_validate(cases, all, report, seed, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumericError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumericError;
    }
}

int run_cli(int argc, const char* const* argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace fracflow
