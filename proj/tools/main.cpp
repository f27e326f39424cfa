#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pmqkd/config.hpp"
#include "pmqkd/errors.hpp"
#include "pmqkd/experiment.hpp"
#include "pmqkd/keyrate_bb84.hpp"
#include "pmqkd/keyrate_polarization.hpp"
#include "pmqkd/sim.hpp"

namespace {

using pmqkd::Convention;
using pmqkd::Protocol;

struct CommonOptions {
    std::string config_path;
    std::string protocol = "both";
    std::string convention;
    std::string dark_factor = "1-pd2";
    double mu = 0.0;
    bool optimize_mu = false;
    double length_km = 0.0;
    std::string out_path;

    CLI::Option* mu_opt = nullptr;
    CLI::Option* convention_opt = nullptr;
};

void add_common_options(CLI::App* cmd, CommonOptions& opts, bool with_protocol) {
    cmd->add_option("--config", opts.config_path,
                    "Parameter file (key = value lines)");
    if (with_protocol) {
        cmd->add_option("--protocol", opts.protocol,
                        "Protocol: polarization, bb84, or both")
            ->check(CLI::IsMember({"polarization", "bb84", "both"}));
    }
    opts.convention_opt =
        cmd->add_option("--convention", opts.convention,
                        "Arm transmittance convention: paper-literal or "
                        "symmetric-mid");
    opts.mu_opt = cmd->add_option("--mu", opts.mu, "Source intensity");
    cmd->add_option("--e11-dark-factor", opts.dark_factor,
                    "Dark-count factor in the single-pair error rate: 1-pd2 "
                    "or (1-pd)2")
        ->check(CLI::IsMember({"1-pd2", "(1-pd)2"}));
    cmd->add_option("--out", opts.out_path, "Write output to a file");
}

// Config file first, then explicit flags override it.
pmqkd::RunConfig resolve_config(const CommonOptions& opts) {
    pmqkd::RunConfig config;
    if (!opts.config_path.empty()) {
        config = pmqkd::load_config(opts.config_path);
    }
    if (opts.convention_opt != nullptr && opts.convention_opt->count() > 0) {
        config.convention = pmqkd::convention_from_token(opts.convention);
    }
    if (opts.mu_opt != nullptr && opts.mu_opt->count() > 0) {
        config.params.intensity = opts.mu;
    }
    pmqkd::validate(config.params);
    return config;
}

std::vector<Protocol> selected_protocols(const std::string& token) {
    if (token == "both") {
        return {Protocol::Bb84, Protocol::Polarization};
    }
    return {pmqkd::protocol_from_token(token)};
}

nlohmann::ordered_json params_to_json(const pmqkd::SystemParams& p) {
    nlohmann::ordered_json j;
    j["dark_count_rate"] = p.dark_count_rate;
    j["misalignment"] = p.misalignment;
    j["detector_efficiency"] = p.detector_efficiency;
    j["error_correction_inefficiency"] = p.error_correction_inefficiency;
    j["intrinsic_error"] = p.intrinsic_error;
    j["attenuation_db_per_km"] = p.attenuation_db_per_km;
    j["intensity"] = p.intensity;
    return j;
}

void emit(const CommonOptions& opts, const std::string& text) {
    if (opts.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(opts.out_path);
    if (!out) {
        throw pmqkd::ConfigError("cannot open output file: " + opts.out_path);
    }
    out << text;
}

void echo_params(const pmqkd::SystemParams& params, Convention convention) {
    nlohmann::ordered_json j = params_to_json(params);
    j["convention"] = pmqkd::to_token(convention);
    std::cerr << "params: " << j.dump() << "\n";
}

nlohmann::ordered_json polarization_result_json(
    const pmqkd::PolarizationKeyRateResult& r, double mu) {
    nlohmann::ordered_json j;
    j["mu"] = mu;
    j["R"] = r.R;
    j["R_clamped"] = r.R_clamped;
    j["Q_total"] = r.Q_total;
    j["E_total"] = r.E_total;
    j["Y_11"] = r.Y_11;
    j["e_11"] = r.e_11;
    j["Q_11"] = r.Q_11;
    j["Q_D0"] = r.Q_D0;
    j["Q_D1"] = r.Q_D1;
    j["mu_prime"] = r.mu_prime;
    j["x"] = r.x;
    return j;
}

nlohmann::ordered_json bb84_result_json(const pmqkd::BB84KeyRateResult& r,
                                        double mu) {
    nlohmann::ordered_json j;
    j["mu"] = mu;
    j["R"] = r.R;
    j["R_clamped"] = r.R_clamped;
    j["Q_mu"] = r.Q_mu;
    j["E_mu"] = r.E_mu;
    j["Y_0"] = r.Y_0;
    j["Y_1"] = r.Y_1;
    j["e_1"] = r.e_1;
    j["q_1"] = r.q_1;
    return j;
}

int run_keyrate(const CommonOptions& opts) {
    const pmqkd::RunConfig config = resolve_config(opts);
    const pmqkd::E11DarkFactor dark_factor =
        pmqkd::e11_dark_factor_from_token(opts.dark_factor);
    const pmqkd::ChannelConfig channel{opts.length_km, config.convention};

    nlohmann::ordered_json j;
    j["params"] = params_to_json(config.params);
    j["convention"] = pmqkd::to_token(config.convention);
    j["length_km"] = opts.length_km;
    j["results"] = nlohmann::ordered_json::object();

    for (Protocol protocol : selected_protocols(opts.protocol)) {
        double mu = config.params.intensity;
        if (opts.optimize_mu) {
            mu = pmqkd::optimize_mu(protocol, config.params, channel, dark_factor).mu;
        }
        pmqkd::SystemParams params = config.params;
        params.intensity = mu;
        if (protocol == Protocol::Polarization) {
            const auto r = pmqkd::keyrate_polarization(params, channel, dark_factor);
            j["results"][pmqkd::to_token(protocol)] = polarization_result_json(r, mu);
        } else {
            const auto r = pmqkd::keyrate_bb84(params, opts.length_km);
            j["results"][pmqkd::to_token(protocol)] = bb84_result_json(r, mu);
        }
    }
    emit(opts, j.dump(2) + "\n");
    return 0;
}

int run_sweep(const CommonOptions& opts, double l_start, double l_end,
              double l_step) {
    const pmqkd::RunConfig config = resolve_config(opts);

    pmqkd::SweepSpec spec;
    spec.l_start = l_start;
    spec.l_end = l_end;
    spec.l_step = l_step;
    spec.protocols = selected_protocols(opts.protocol);
    spec.convention = config.convention;
    spec.mu_policy = opts.optimize_mu ? pmqkd::MuPolicy::OptimizedPerDistance
                                      : pmqkd::MuPolicy::Fixed;
    spec.dark_factor = pmqkd::e11_dark_factor_from_token(opts.dark_factor);

    const std::vector<pmqkd::SweepRow> rows = pmqkd::run_sweep(spec, config.params);
    std::ostringstream csv;
    pmqkd::write_csv(csv, rows);
    emit(opts, csv.str());
    echo_params(config.params, config.convention);
    return 0;
}

int run_cutoff(const CommonOptions& opts, double floor) {
    const pmqkd::RunConfig config = resolve_config(opts);
    const pmqkd::E11DarkFactor dark_factor =
        pmqkd::e11_dark_factor_from_token(opts.dark_factor);
    const pmqkd::MuPolicy policy = opts.optimize_mu
                                       ? pmqkd::MuPolicy::OptimizedPerDistance
                                       : pmqkd::MuPolicy::Fixed;

    nlohmann::ordered_json j;
    j["params"] = params_to_json(config.params);
    j["convention"] = pmqkd::to_token(config.convention);
    j["floor"] = floor;
    j["mu_policy"] = opts.optimize_mu ? "optimized-per-distance" : "fixed";
    j["results"] = nlohmann::ordered_json::object();

    for (Protocol protocol : selected_protocols(opts.protocol)) {
        const pmqkd::CutoffResult r = pmqkd::cutoff_distance(
            protocol, config.params, config.convention, floor, policy, dark_factor);
        nlohmann::ordered_json entry;
        entry["cutoff_km"] = r.distance_km;
        entry["lower_bound_only"] = r.lower_bound_only;
        j["results"][pmqkd::to_token(protocol)] = entry;
    }
    emit(opts, j.dump(2) + "\n");
    return 0;
}

int run_optimize_mu(const CommonOptions& opts) {
    const pmqkd::RunConfig config = resolve_config(opts);
    const pmqkd::E11DarkFactor dark_factor =
        pmqkd::e11_dark_factor_from_token(opts.dark_factor);
    const pmqkd::ChannelConfig channel{opts.length_km, config.convention};

    nlohmann::ordered_json j;
    j["params"] = params_to_json(config.params);
    j["convention"] = pmqkd::to_token(config.convention);
    j["length_km"] = opts.length_km;
    j["results"] = nlohmann::ordered_json::object();

    bool any_dead = false;
    for (Protocol protocol : selected_protocols(opts.protocol)) {
        const pmqkd::MuOptimum best =
            pmqkd::optimize_mu(protocol, config.params, channel, dark_factor);
        nlohmann::ordered_json entry;
        entry["mu"] = best.mu;
        entry["R"] = best.rate;
        entry["positive"] = best.positive;
        j["results"][pmqkd::to_token(protocol)] = entry;
        if (!best.positive) {
            any_dead = true;
            std::cerr << "no positive key rate for " << pmqkd::to_token(protocol)
                      << " at " << opts.length_km << " km\n";
        }
    }
    emit(opts, j.dump(2) + "\n");
    return any_dead ? 3 : 0;
}

int run_simulate(const CommonOptions& opts, const std::string& mode_token,
                 double theta, double phi_1, double phi_2,
                 std::uint32_t phase_slices, std::uint64_t rounds,
                 std::uint64_t seed) {
    const pmqkd::RunConfig config = resolve_config(opts);

    pmqkd::ProtocolConfig cfg;
    cfg.mode = mode_token == "phase" ? pmqkd::SimMode::Phase
                                     : pmqkd::SimMode::Polarization;
    cfg.params = config.params;
    cfg.channel = pmqkd::ChannelConfig{opts.length_km, config.convention};
    cfg.theta = theta;
    cfg.phi_1 = phi_1;
    cfg.phi_2 = phi_2;
    cfg.phase_slices = phase_slices;
    cfg.n_rounds = rounds;
    cfg.seed = seed;

    const pmqkd::SimTally tally = pmqkd::simulate(cfg);
    emit(opts, pmqkd::tally_to_json(tally) + "\n");
    echo_params(config.params, config.convention);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-matching QKD key-rate models and protocol simulator"};
    app.require_subcommand(1);

    CommonOptions keyrate_opts;
    CLI::App* keyrate_cmd =
        app.add_subcommand("keyrate", "Analytic key rate at one distance");
    add_common_options(keyrate_cmd, keyrate_opts, true);
    keyrate_cmd->add_option("--length", keyrate_opts.length_km, "Fiber length in km");
    keyrate_cmd->add_flag("--optimize-mu", keyrate_opts.optimize_mu,
                          "Use the best intensity per protocol");

    CommonOptions sweep_opts;
    double l_start = 0.0;
    double l_end = 400.0;
    double l_step = 5.0;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Key rate versus distance as CSV");
    add_common_options(sweep_cmd, sweep_opts, true);
    sweep_cmd->add_option("--l-start", l_start, "First length in km");
    sweep_cmd->add_option("--l-end", l_end, "Last length in km");
    sweep_cmd->add_option("--l-step", l_step, "Length step in km");
    sweep_cmd->add_flag("--optimize-mu", sweep_opts.optimize_mu,
                        "Re-optimize intensity at every distance");

    CommonOptions cutoff_opts;
    double floor = 1e-15;
    CLI::App* cutoff_cmd = app.add_subcommand(
        "cutoff", "Longest distance with key rate at or above a floor");
    add_common_options(cutoff_cmd, cutoff_opts, true);
    cutoff_cmd->add_option("--floor", floor, "Key rate floor");
    cutoff_cmd->add_flag("--optimize-mu", cutoff_opts.optimize_mu,
                         "Re-optimize intensity at every distance");

    CommonOptions optimize_opts;
    CLI::App* optimize_cmd =
        app.add_subcommand("optimize-mu", "Best intensity at one distance");
    add_common_options(optimize_cmd, optimize_opts, true);
    optimize_cmd->add_option("--length", optimize_opts.length_km,
                             "Fiber length in km");

    CommonOptions simulate_opts;
    std::string mode = "polarization";
    double theta = 1.5707963267948966;
    double phi_1 = 0.5235987755982988;
    double phi_2 = 0.7853981633974483;
    std::uint32_t phase_slices = 16;
    std::uint64_t rounds = 1000000;
    std::uint64_t seed = 0;
    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "Monte Carlo protocol run");
    add_common_options(simulate_cmd, simulate_opts, false);
    simulate_cmd->add_option("--mode", mode, "Detection model: polarization or phase")
        ->check(CLI::IsMember({"polarization", "phase"}));
    simulate_cmd->add_option("--length", simulate_opts.length_km,
                             "Fiber length in km");
    simulate_cmd->add_option("--theta", theta, "Bloch polar angle of both bases");
    simulate_cmd->add_option("--phi-1", phi_1, "Azimuth of the first basis");
    simulate_cmd->add_option("--phi-2", phi_2, "Azimuth of the second basis");
    simulate_cmd->add_option("--phase-slices", phase_slices,
                             "Phase grid size for phase mode");
    simulate_cmd->add_option("--rounds", rounds, "Number of rounds");
    simulate_cmd->add_option("--seed", seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (keyrate_cmd->parsed()) {
            return run_keyrate(keyrate_opts);
        }
        if (sweep_cmd->parsed()) {
            return run_sweep(sweep_opts, l_start, l_end, l_step);
        }
        if (cutoff_cmd->parsed()) {
            return run_cutoff(cutoff_opts, floor);
        }
        if (optimize_cmd->parsed()) {
            return run_optimize_mu(optimize_opts);
        }
        if (simulate_cmd->parsed()) {
            return run_simulate(simulate_opts, mode, theta, phi_1, phi_2,
                                phase_slices, rounds, seed);
        }
    } catch (const pmqkd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const pmqkd::DegenerateChannelError& e) {
        std::cerr << "degenerate channel: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
