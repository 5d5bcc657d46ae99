#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cribsim/config.hpp"
#include "cribsim/outputs.hpp"
#include "cribsim/scenarios.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::string format = "csv";
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--config", opt.config_path, "configuration file (key = value lines)");
    cmd->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--format", opt.format, "csv|json|svg")->capture_default_str();
    cmd->add_option("--set", opt.overrides, "override a config key, e.g. --set pulse.mean_photons=0.6");
    cmd->add_option("--seed", opt.seed, "override the RNG seed")
        ->each([&opt](const std::string&) { opt.seed_set = true; });
}

int run(const std::string& scenario, const CommonOptions& opt) {
    cribsim::ScenarioConfig cfg;
    if (!opt.config_path.empty())
        cfg = cribsim::ScenarioConfig::load(opt.config_path);
    for (const auto& kv : opt.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw cribsim::config_error("--set expects key=value, got '" + kv + "'");
        cfg.set_key(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (opt.seed_set)
        cfg.seed = opt.seed;
    cfg.validate();

    const auto bundle = cribsim::run_scenario(scenario, cfg);
    const auto files = cribsim::emit_outputs(bundle, cribsim::parse_format(opt.format), opt.out_dir);
    for (const auto& f : files)
        std::cout << "wrote " << f << "\n";
    if (bundle.metadata.contains("efficiency"))
        std::cout << "efficiency = " << bundle.metadata["efficiency"].dump() << "\n";
    if (bundle.metadata.contains("fit"))
        std::cout << "fit = " << bundle.metadata["fit"].dump() << "\n";
    if (bundle.metadata.contains("all_ok"))
        std::cout << "all_ok = " << bundle.metadata["all_ok"].dump() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CRIB photon-echo memory simulator"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"simulate", "echo-histogram"},      {"decay-scan", "decay-scan"},
        {"linearity", "linearity"},          {"fit-decay", "fit-decay"},
        {"sequence-check", "sequence-check"}, {"no-peak-control", "no-peak-control"},
    };

    std::vector<CommonOptions> opts(commands.size());
    std::string chosen;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        auto* cmd = app.add_subcommand(commands[i].first, "run the " + commands[i].second + " scenario");
        add_common(cmd, opts[i]);
        cmd->callback([&chosen, i, &commands]() { chosen = commands[i].second; });
    }

    CLI11_PARSE(app, argc, argv);

    std::size_t idx = 0;
    for (std::size_t i = 0; i < commands.size(); ++i)
        if (commands[i].second == chosen)
            idx = i;

    try {
        return run(chosen, opts[idx]);
    } catch (const cribsim::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const cribsim::numerical_failure& e) {
        std::cerr << "numerical failure: " << e.what() << " (step " << e.step << ", depth "
                  << e.depth_index << ")\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
