#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "enscade/cli.hpp"
#include "enscade/manifest.hpp"
#include "enscade/version.hpp"

namespace {

enscade::RunConfig build_config(const std::string& config_file,
                                const std::vector<std::string>& overrides,
                                const enscade::RunConfig& base) {
    enscade::RunConfig cfg = base;
    if (!config_file.empty()) cfg = enscade::RunConfig::from_file(config_file);
    for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw enscade::ConfigError("--set expects key=value, got '" + kv + "'");
        cfg.apply_override(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"enscade: periodic-box vorticity solver and enstrophy-cascade diagnostics"};
    app.set_version_flag("--version", std::string(enscade::kVersion));
    app.require_subcommand(1);

    std::string config_file;
    std::vector<std::string> overrides;
    std::string manifest_path;
    std::string out_dir;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_file, "configuration file (key = value lines)");
        sub->add_option("--set", overrides, "override one key: --set key=value")
            ->take_all()
            ->allow_extra_args(false);
        sub->add_option("--out", out_dir, "output directory (overrides out_dir)");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run the solver, write snapshots");
    add_common(simulate);
    CLI::App* analyze = app.add_subcommand("analyze", "evaluate the cascade report");
    analyze->add_option("--manifest", manifest_path, "trajectory manifest.json")->required();
    add_common(analyze);
    CLI::App* verify = app.add_subcommand("verify", "run the property suites");
    add_common(verify);
    app.add_subcommand("defaults", "print the default configuration");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("defaults")) {
            std::cout << enscade::RunConfig::defaults().to_text();
            return enscade::kExitOk;
        }
        if (app.got_subcommand("simulate")) {
            enscade::RunConfig cfg =
                build_config(config_file, overrides, enscade::RunConfig::defaults());
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            return enscade::cmd_simulate(cfg, std::cout);
        }
        if (app.got_subcommand("analyze")) {
            // analysis parameters start from the config the run was made with
            const enscade::RunManifest m = enscade::RunManifest::load(manifest_path);
            enscade::RunConfig cfg = build_config(config_file, overrides, m.config);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            return enscade::cmd_analyze(cfg, manifest_path, std::cout);
        }
        if (app.got_subcommand("verify")) {
            enscade::RunConfig cfg =
                build_config(config_file, overrides, enscade::RunConfig::defaults());
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            return enscade::cmd_verify(cfg, std::cout);
        }
    } catch (const enscade::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return enscade::kExitConfig;
    } catch (const enscade::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return enscade::kExitNumerical;
    } catch (const enscade::FieldError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return enscade::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return enscade::kExitNumerical;
    }
    return enscade::kExitOk;
}
