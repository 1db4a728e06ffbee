#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "rmf/error.hpp"
#include "rmf/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Relativistic mean-field solver on a periodic lattice"};
    app.require_subcommand(1, 1);

    std::string config_path, out_dir;
    bool override_regime = false, dump_fields = false;

    const std::vector<std::pair<const char*, const char*>> commands = {
        {"solve", "run the SCF solve, post-hoc checks and configured probes"},
        {"validate", "check the coupling regime only"},
        {"probe-subadditivity", "run the configured subadditivity probes"},
        {"probe-descent", "check the first-order commutator descent step"},
        {"check-bounds", "check the operator bounds on seeded random orbitals"},
        {"spectrum", "run the SCF solve and write the mean-field spectra"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
        sub->add_flag("--override-regime", override_regime, "proceed outside the validated coupling regime");
        sub->add_flag("--dump-fields", dump_fields, "also write densities, fields and spectra");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : rmf::exit_schema_error;
    }

    rmf::RunOptions opt;
    opt.command = app.get_subcommands().front()->get_name();
    opt.override_regime = override_regime;
    opt.dump_fields = dump_fields;

    rmf::RunConfig cfg;
    try {
        opt.threads = rmf::threads_from_environment();
        cfg = rmf::parse_config(config_path);
    } catch (const rmf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return rmf::exit_schema_error;
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;

    rmf::ResultBundle bundle = rmf::run(cfg, opt);
    for (const auto& line : bundle.summary) std::cout << line << "\n";
    for (const auto& f : bundle.failures) std::cerr << "failure: " << f << "\n";
    try {
        rmf::write_bundle(bundle, cfg.output_dir);
    } catch (const std::exception& e) {
        std::cerr << "error [cli-io]: cannot write results: " << e.what() << "\n";
        return rmf::exit_runtime_error;
    }
    std::cout << "results written to " << cfg.output_dir << " (exit " << bundle.exit_code << ")\n";
    return bundle.exit_code;
}
