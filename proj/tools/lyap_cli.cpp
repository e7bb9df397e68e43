#include <iostream>

#include <CLI11.hpp>

#include "lyap/commands.hpp"

namespace {

struct Overrides {
    int levels = -1;
    double tau = -1.0, epsilon = -1.0;
    int window = -1;
    long long horizon = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    long long length_cap = -1;
    std::string out;
};

void apply(const Overrides& o, lyap::ExperimentConfig& cfg) {
    if (o.levels >= 0) cfg.levels = o.levels;
    if (o.tau >= 0) cfg.tau = o.tau;
    if (o.epsilon >= 0) cfg.epsilon = o.epsilon;
    if (o.window >= 0) cfg.window = o.window;
    if (o.horizon >= 0) cfg.horizon = o.horizon;
    if (o.seed_set) cfg.seed = o.seed;
    if (o.length_cap >= 0) cfg.length_cap = o.length_cap;
    if (!o.out.empty()) cfg.out = o.out;
    cfg.validate();
}

int emit(const lyap::CommandResult& r, const std::string& out_path) {
    std::cout << r.report;
    if (!out_path.empty()) lyap::write_file(out_path + ".report", r.report);
    return r.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lyapunov-irregular point experiments over subshifts of finite type"};
    app.require_subcommand(1);

    std::string config_path;
    std::string witness_path;
    Overrides o;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
        cmd->add_option("--out", o.out, "output path for reports/witness files");
        cmd->add_option("--levels", o.levels, "certified oscillation levels K");
        cmd->add_option("--tau", o.tau, "gap parameter tau");
        cmd->add_option("--epsilon", o.epsilon, "epsilon in (0, tau/2)");
        cmd->add_option("--window", o.window, "cylinder window length for scans");
        cmd->add_option("--horizon", o.horizon, "membership search horizon");
        cmd->add_option("--seed", o.seed, "seed for sampled checks")
            ->each([&](const std::string&) { o.seed_set = true; });
        cmd->add_option("--caps", o.length_cap, "block length cap");
    };

    CLI::App* spectrum = app.add_subcommand("spectrum", "Lyapunov blocks per measure");
    CLI::App* irregular = app.add_subcommand("irregular", "construct + certify a witness");
    CLI::App* verify = app.add_subcommand("verify", "re-certify a stored witness");
    CLI::App* scan = app.add_subcommand("scan", "density evidence over cylinders");
    CLI::App* bounds = app.add_subcommand("bounds", "norm/cone/shadowing bound suite");
    for (CLI::App* c : {spectrum, irregular, verify, scan, bounds}) add_common(c);
    verify->add_option("--witness", witness_path, "witness file to verify")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        lyap::ExperimentConfig cfg = lyap::load_config(config_path);
        apply(o, cfg);
        if (spectrum->parsed()) return emit(lyap::cmd_spectrum(cfg), cfg.out);
        if (irregular->parsed()) return emit(lyap::cmd_irregular(cfg), cfg.out);
        if (verify->parsed()) return emit(lyap::cmd_verify(witness_path, cfg), cfg.out);
        if (scan->parsed()) return emit(lyap::cmd_scan(cfg), cfg.out);
        if (bounds->parsed()) return emit(lyap::cmd_bounds(cfg), cfg.out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return lyap::exit_code_for(e);
    }
    return lyap::kExitError;
}
