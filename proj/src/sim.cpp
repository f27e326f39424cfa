#include "pmqkd/sim.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "pmqkd/bloch.hpp"
#include "pmqkd/errors.hpp"

namespace pmqkd {

namespace {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

// SplitMix64 stream keyed by (seed, round index). Every round owns its
// substream, so the tally is independent of evaluation order.
class RoundRng {
public:
    RoundRng(std::uint64_t seed, std::uint64_t index)
        : state_(mix64(mix64(seed ^ 0x5851F42D4C957F2DULL) +
                       index * 0x9E3779B97F4A7C15ULL)) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        return mix64(z);
    }

    double next_unit() {  // [0, 1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    int next_bit() { return static_cast<int>(next_u64() >> 63); }

    bool bernoulli(double p) { return next_unit() < p; }

    std::uint32_t next_below(std::uint32_t n) {
        return static_cast<std::uint32_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

inline double click_probability(double intensity, double p_d) {
    return 1.0 - (1.0 - p_d) * std::exp(-intensity);
}

Outcome classify_failure(int total_clicks) {
    return total_clicks >= 2 ? Outcome::DoubleClick : Outcome::NoClick;
}

RoundRecord run_round_polarization(const ProtocolConfig& cfg, RoundRng& rng) {
    const SystemParams& p = cfg.params;
    const ArmTransmittances arms = arm_transmittances(p, cfg.channel);
    const double sa = arms.eta_a * p.intensity / 2.0;
    const double sb = arms.eta_b * p.intensity / 2.0;

    RoundRecord r{};
    r.k_a = rng.next_bit();
    r.k_b = rng.next_bit();
    r.basis_choice_a = rng.next_bit();
    r.basis_choice_b = rng.next_bit();

    const double phi[2] = {cfg.phi_1, cfg.phi_2};

    // Slot intensities: two time bins x two interference ports. Distinct bins
    // see one party's light split evenly; a shared bin interferes both pulses.
    double slot[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    if (r.k_a != r.k_b) {
        slot[r.k_a][0] = slot[r.k_a][1] = sa / 2.0;
        slot[r.k_b][0] = slot[r.k_b][1] = sb / 2.0;
    } else {
        const double delta = (phi[r.basis_choice_a] + std::numbers::pi * r.k_a) -
                             (phi[r.basis_choice_b] + std::numbers::pi * r.k_b);
        const double mu_prime = sa + sb;
        const double cross = std::sqrt(sa * sb) * std::cos(delta);
        slot[r.k_a][0] = mu_prime / 2.0 + cross;
        slot[r.k_a][1] = mu_prime / 2.0 - cross;
    }

    int bin_clicks[2] = {0, 0};
    for (int bin = 0; bin < 2; ++bin) {
        for (int port = 0; port < 2; ++port) {
            if (rng.bernoulli(click_probability(slot[bin][port], p.dark_count_rate))) {
                ++bin_clicks[bin];
            }
        }
    }

    if (bin_clicks[0] == 1 && bin_clicks[1] == 1) {
        // A coincidence reads as "bits differ"; misalignment corrupts the
        // reading with probability e_d.
        const bool differ = !rng.bernoulli(p.misalignment);
        r.outcome = differ ? Outcome::R : Outcome::L;
    } else {
        r.outcome = classify_failure(bin_clicks[0] + bin_clicks[1]);
    }

    if (r.outcome == Outcome::L) {
        r.k_b_after_flip = r.k_b;
    } else if (r.outcome == Outcome::R) {
        r.k_b_after_flip = 1 - r.k_b;
    }
    r.kept_after_sift = r.k_b_after_flip.has_value() &&
                        r.basis_choice_a == r.basis_choice_b;
    return r;
}

RoundRecord run_round_phase(const ProtocolConfig& cfg, RoundRng& rng) {
    const SystemParams& p = cfg.params;
    const ArmTransmittances arms = arm_transmittances(p, cfg.channel);
    const double sa = arms.eta_a * p.intensity / 2.0;
    const double sb = arms.eta_b * p.intensity / 2.0;
    const std::uint32_t d = cfg.phase_slices;

    RoundRecord r{};
    r.k_a = rng.next_bit();
    r.k_b = rng.next_bit();
    r.basis_choice_a = static_cast<int>(rng.next_below(d));
    r.basis_choice_b = static_cast<int>(rng.next_below(d));

    const double step = 2.0 * std::numbers::pi / d;
    const double delta = (step * r.basis_choice_a + std::numbers::pi * r.k_a) -
                         (step * r.basis_choice_b + std::numbers::pi * r.k_b);
    const double mu_prime = sa + sb;
    const double cross = 2.0 * (std::sqrt(sa * sb) / 2.0) * std::cos(delta);
    const double intensity_l = mu_prime / 2.0 + cross;
    const double intensity_r = mu_prime / 2.0 - cross;

    bool optical_l = rng.bernoulli(1.0 - std::exp(-intensity_l));
    bool optical_r = rng.bernoulli(1.0 - std::exp(-intensity_r));
    const bool dark_l = rng.bernoulli(p.dark_count_rate);
    const bool dark_r = rng.bernoulli(p.dark_count_rate);
    if (rng.bernoulli(p.misalignment)) {
        std::swap(optical_l, optical_r);  // misalignment swaps the output ports
    }
    const bool click_l = optical_l || dark_l;
    const bool click_r = optical_r || dark_r;

    if (click_l && !click_r) {
        r.outcome = Outcome::L;
    } else if (click_r && !click_l) {
        r.outcome = Outcome::R;
    } else {
        r.outcome = classify_failure((click_l ? 1 : 0) + (click_r ? 1 : 0));
    }

    if (r.outcome == Outcome::L) {
        r.k_b_after_flip = r.k_b;
    } else if (r.outcome == Outcome::R) {
        r.k_b_after_flip = 1 - r.k_b;
    }

    const std::uint32_t diff =
        (static_cast<std::uint32_t>(r.basis_choice_a) + d -
         static_cast<std::uint32_t>(r.basis_choice_b)) % d;
    const bool phases_match = diff == 0 || (d % 2 == 0 && diff == d / 2);
    r.kept_after_sift = r.k_b_after_flip.has_value() && phases_match;
    return r;
}

// Bob's key bit after every announced correction. In phase mode an
// announced-phase difference of pi flips once more.
std::optional<int> final_key_bit(const ProtocolConfig& cfg, const RoundRecord& r) {
    if (!r.kept_after_sift || !r.k_b_after_flip.has_value()) {
        return std::nullopt;
    }
    int bit = *r.k_b_after_flip;
    if (cfg.mode == SimMode::Phase) {
        const std::uint32_t d = cfg.phase_slices;
        const std::uint32_t diff =
            (static_cast<std::uint32_t>(r.basis_choice_a) + d -
             static_cast<std::uint32_t>(r.basis_choice_b)) % d;
        if (d % 2 == 0 && diff == d / 2) {
            bit = 1 - bit;
        }
    }
    return bit;
}

}  // namespace

const char* to_token(SimMode m) {
    return m == SimMode::Polarization ? "polarization" : "phase";
}

void validate(const ProtocolConfig& cfg) {
    validate(cfg.params);
    if (cfg.n_rounds == 0) {
        throw ConfigError("n_rounds must be >= 1");
    }
    if (cfg.phase_slices == 0) {
        throw ConfigError("phase_slices must be >= 1");
    }
    // validates theta range and phi finiteness; both bases share theta
    basis_from_phase(cfg.theta, cfg.phi_1);
    basis_from_phase(cfg.theta, cfg.phi_2);
}

RoundRecord run_round(const ProtocolConfig& cfg, std::uint64_t round_index) {
    RoundRng rng(cfg.seed, round_index);
    return cfg.mode == SimMode::Polarization ? run_round_polarization(cfg, rng)
                                             : run_round_phase(cfg, rng);
}

std::vector<std::pair<int, int>> sift(const ProtocolConfig& cfg,
                                      const std::vector<RoundRecord>& rounds) {
    std::vector<std::pair<int, int>> kept;
    for (const RoundRecord& r : rounds) {
        if (auto bit = final_key_bit(cfg, r)) {
            kept.emplace_back(r.k_a, *bit);
        }
    }
    return kept;
}

SimTally simulate(const ProtocolConfig& cfg) {
    validate(cfg);

    SimTally t{};
    t.n_rounds = cfg.n_rounds;
    t.seed = cfg.seed;
    t.mode = cfg.mode;
    t.convention = cfg.channel.convention;

    for (std::uint64_t i = 0; i < cfg.n_rounds; ++i) {
        const RoundRecord r = run_round(cfg, i);
        if (r.outcome == Outcome::L || r.outcome == Outcome::R) {
            ++t.n_success;
        }
        if (auto bit = final_key_bit(cfg, r)) {
            ++t.n_sifted;
            if (*bit != r.k_a) {
                ++t.n_errors;
            }
        }
    }

    const double n = static_cast<double>(t.n_rounds);
    t.empirical_gain = static_cast<double>(t.n_success) / n;
    t.gain_stderr = std::sqrt(t.empirical_gain * (1.0 - t.empirical_gain) / n);
    if (t.n_sifted > 0) {
        const double m = static_cast<double>(t.n_sifted);
        t.empirical_qber = static_cast<double>(t.n_errors) / m;
        t.qber_stderr = std::sqrt(t.empirical_qber * (1.0 - t.empirical_qber) / m);
    } else {
        t.empirical_qber = 0.0;
        t.qber_stderr = 0.0;
    }
    return t;
}

std::string tally_to_json(const SimTally& t) {
    nlohmann::ordered_json j;
    j["n_rounds"] = t.n_rounds;
    j["n_success"] = t.n_success;
    j["n_sifted"] = t.n_sifted;
    j["n_errors"] = t.n_errors;
    j["empirical_gain"] = t.empirical_gain;
    j["empirical_qber"] = t.empirical_qber;
    j["gain_stderr"] = t.gain_stderr;
    j["qber_stderr"] = t.qber_stderr;
    j["seed"] = t.seed;
    j["mode"] = to_token(t.mode);
    j["convention"] = to_token(t.convention);
    return j.dump(2);
}

}  // namespace pmqkd
