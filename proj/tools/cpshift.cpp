#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cpshift/cli.hpp"

using namespace cpshift;

namespace {

struct Common {
    std::string config_path;
    std::vector<std::string> sets;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("-c,--config", c.config_path, "key = value config file");
    app->add_option("-s,--set", c.sets, "override one key, e.g. --set mu=0.3")->allow_extra_args(false);
}

cli::RunConfig load(const Common& c)
{
    cli::RunConfig cfg;
    if (!c.config_path.empty()) cli::apply_file(cfg, c.config_path);
    for (const auto& kv : c.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        cli::apply_setting(cfg, cli::trim(kv.substr(0, eq)), kv.substr(eq + 1));
    }
    return cfg;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Collective Casimir-Polder shifts above a square atomic array"};
    app.require_subcommand(1);

    Common sweep_opts, dec_opts, asym_opts;
    std::string out_path;
    auto* sweep = app.add_subcommand("sweep", "tabulate shifts over a log-spaced height grid (CSV on stdout)");
    add_common(sweep, sweep_opts);
    sweep->add_option("-o,--output", out_path, "write the CSV here instead of stdout");

    double dec_z = 0.1;
    auto* dec = app.add_subcommand("decompose", "bulk / edge / vertex split at one height");
    add_common(dec, dec_opts);
    dec->add_option("-z,--z-tilde", dec_z, "height")->required();

    double asym_z = 0.1;
    auto* asym = app.add_subcommand("asymptotic", "closed-form limiting laws at one height");
    add_common(asym, asym_opts);
    asym->add_option("-z,--z-tilde", asym_z, "height")->required();

    std::int64_t samples = 10000;
    std::uint64_t seed = 42;
    std::string corrupt;
    auto* verify = app.add_subcommand("verify-diagrams", "check the twelve-process denominator identity");
    verify->add_option("-n,--samples", samples, "random (w, w') samples");
    verify->add_option("--seed", seed, "RNG seed");
    verify->add_option("--corrupt-process", corrupt, "perturb one process denominator (I..XII) to exercise the check");

    std::string csv_path, column, mode = "direct";
    double lo = 0.0, hi = 0.0;
    auto* fit = app.add_subcommand("fit", "log-log slope of one CSV column");
    fit->add_option("csv", csv_path, "sweep CSV")->required();
    fit->add_option("--column", column, "column name")->required();
    fit->add_option("--z-lo", lo, "window start")->required();
    fit->add_option("--z-hi", hi, "window end")->required();
    fit->add_option("--mode", mode, "direct or envelope")->check(CLI::IsMember({"direct", "envelope"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*sweep) {
            const auto cfg = load(sweep_opts);
            if (out_path.empty()) {
                cli::cmd_sweep(cfg, std::cout, std::cerr);
            } else {
                std::ofstream out(out_path);
                if (!out) throw ConfigError("cannot write " + out_path);
                cli::cmd_sweep(cfg, out, std::cerr);
            }
        } else if (*dec) {
            cli::cmd_decompose(load(dec_opts), dec_z, std::cout);
        } else if (*asym) {
            cli::cmd_asymptotic(load(asym_opts), asym_z, std::cout);
        } else if (*verify) {
            std::optional<ProcessId> bad;
            if (!corrupt.empty()) {
                bad = process_from_string(corrupt);
                if (!bad) throw ConfigError("unknown process '" + corrupt + "'");
            }
            return cli::cmd_verify_diagrams(samples, seed, bad, std::cout);
        } else if (*fit) {
            cli::cmd_fit(csv_path, column, {lo, hi}, mode == "direct" ? cli::FitMode::direct : cli::FitMode::envelope, std::cout);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
