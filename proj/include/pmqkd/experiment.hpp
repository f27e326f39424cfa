#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pmqkd/channel.hpp"
#include "pmqkd/keyrate_polarization.hpp"

namespace pmqkd {

enum class Protocol { Bb84, Polarization };

const char* to_token(Protocol p);
Protocol protocol_from_token(const std::string& token);

enum class MuPolicy { Fixed, OptimizedPerDistance };

struct MuOptimum {
    double mu = 0.0;
    double rate = 0.0;
    bool positive = false;  // false when no intensity yields a positive rate
};

// Best clamped key rate over intensities in [1e-4, 4].
MuOptimum optimize_mu(Protocol protocol, const SystemParams& params,
                      const ChannelConfig& channel,
                      E11DarkFactor dark_factor = E11DarkFactor::OneMinusPd2);

struct CutoffResult {
    double distance_km = 0.0;
    bool lower_bound_only = false;  // rate still above floor at the search cap
};

// Longest distance (to within 0.1 km) where the clamped rate stays at or
// above `floor`. Throws DegenerateChannelError when already below at L = 0.
CutoffResult cutoff_distance(Protocol protocol, const SystemParams& params,
                             Convention convention, double floor,
                             MuPolicy mu_policy,
                             E11DarkFactor dark_factor = E11DarkFactor::OneMinusPd2);

struct SweepSpec {
    double l_start = 0.0;
    double l_end = 400.0;
    double l_step = 5.0;
    std::vector<Protocol> protocols = {Protocol::Bb84, Protocol::Polarization};
    Convention convention = Convention::PaperLiteral;
    MuPolicy mu_policy = MuPolicy::Fixed;
    E11DarkFactor dark_factor = E11DarkFactor::OneMinusPd2;
};

struct SweepRow {
    double length_km = 0.0;
    Protocol protocol = Protocol::Bb84;
    Convention convention = Convention::PaperLiteral;
    double mu = 0.0;
    double rate = 0.0;
    double rate_clamped = 0.0;
    double gain = 0.0;          // total gain Q
    double qber = 0.0;          // total error rate E
    double yield_single = 0.0;  // single-photon(-pair) yield
    double error_single = 0.0;  // single-photon(-pair) error rate
    bool degenerate = false;    // numeric columns are NaN when set
};

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SystemParams& params);

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_csv(std::istream& in);

}  // namespace pmqkd
