#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pmqkd/channel.hpp"

namespace pmqkd {

// Polarization: each party picks one of two shared bases and a key bit; the
// midpoint performs a two-time-bin coincidence measurement (each party's
// pulse occupies the bin keyed by its bit, a success is exactly one click per
// bin, and the announced parity reading is corrupted with probability e_d).
// Phase: each party picks a random phase from a d-slice grid and encodes the
// bit as a pi offset; the midpoint interferes the two pulses on one 50:50
// beam splitter and announces which single detector clicked.
enum class SimMode { Polarization, Phase };

const char* to_token(SimMode m);  // "polarization" / "phase"

enum class Outcome { L, R, NoClick, DoubleClick };

struct ProtocolConfig {
    SimMode mode = SimMode::Polarization;
    SystemParams params;
    ChannelConfig channel;
    // polarization mode: the two shared bases (theta, phi_1) and (theta, phi_2)
    double theta = 1.5707963267948966;
    double phi_1 = 0.5235987755982988;
    double phi_2 = 0.7853981633974483;
    // phase mode: number of slices in the announced-phase grid
    std::uint32_t phase_slices = 16;
    std::uint64_t n_rounds = 0;
    std::uint64_t seed = 0;
};

void validate(const ProtocolConfig& cfg);  // throws ConfigError

struct RoundRecord {
    int k_a;
    int k_b;
    int basis_choice_a;  // basis index (polarization) or phase index (phase)
    int basis_choice_b;
    Outcome outcome;
    std::optional<int> k_b_after_flip;  // present iff outcome is L or R; flipped on R
    bool kept_after_sift;
};

// One protocol round. Deterministic in (cfg.seed, round_index): every round
// draws from its own counter-derived substream, so results are independent
// of evaluation order.
RoundRecord run_round(const ProtocolConfig& cfg, std::uint64_t round_index);

// Sifted key pairs (k_a, k_b_final) of the kept rounds. In phase mode a
// announced-phase difference of pi flips Bob's bit once more.
std::vector<std::pair<int, int>> sift(const ProtocolConfig& cfg,
                                      const std::vector<RoundRecord>& rounds);

struct SimTally {
    std::uint64_t n_rounds;
    std::uint64_t n_success;
    std::uint64_t n_sifted;
    std::uint64_t n_errors;
    double empirical_gain;   // n_success / n_rounds
    double empirical_qber;   // n_errors / n_sifted (0 when nothing sifted)
    double gain_stderr;      // binomial
    double qber_stderr;      // binomial
    std::uint64_t seed;
    SimMode mode;
    Convention convention;
};

SimTally simulate(const ProtocolConfig& cfg);

// Flat JSON object with keys exactly: n_rounds, n_success, n_sifted,
// n_errors, empirical_gain, empirical_qber, gain_stderr, qber_stderr, seed,
// mode, convention.
std::string tally_to_json(const SimTally& t);

}  // namespace pmqkd
