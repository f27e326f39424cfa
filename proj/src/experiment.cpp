#include "pmqkd/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "pmqkd/errors.hpp"
#include "pmqkd/keyrate_bb84.hpp"

namespace pmqkd {

namespace {

constexpr double kMuLow = 1e-4;
constexpr double kMuHigh = 4.0;
constexpr double kSearchCapKm = 1000.0;
constexpr double kCutoffResolutionKm = 0.1;

// Unclamped rate, or -inf when the operating point is degenerate. Ranking by
// the unclamped rate keeps the argmax meaningful even when every intensity
// is below zero.
double rate_for_mu(Protocol protocol, SystemParams params,
                   const ChannelConfig& channel, E11DarkFactor dark_factor,
                   double mu) {
    params.intensity = mu;
    try {
        if (protocol == Protocol::Polarization) {
            return keyrate_polarization(params, channel, dark_factor).R;
        }
        return keyrate_bb84(params, channel.length_km).R;
    } catch (const DegenerateChannelError&) {
        return -std::numeric_limits<double>::infinity();
    }
}

}  // namespace

const char* to_token(Protocol p) {
    return p == Protocol::Bb84 ? "bb84" : "polarization";
}

Protocol protocol_from_token(const std::string& token) {
    if (token == "bb84") return Protocol::Bb84;
    if (token == "polarization") return Protocol::Polarization;
    throw ConfigError("unknown protocol: " + token);
}

MuOptimum optimize_mu(Protocol protocol, const SystemParams& params,
                      const ChannelConfig& channel, E11DarkFactor dark_factor) {
    const auto rate = [&](double mu) {
        return rate_for_mu(protocol, params, channel, dark_factor, mu);
    };

    // Coarse grid first, then golden-section refinement around the best cell.
    constexpr int kGridPoints = 200;
    double best_mu = kMuLow;
    double best_rate = -std::numeric_limits<double>::infinity();
    int best_index = 0;
    for (int i = 0; i < kGridPoints; ++i) {
        const double mu = kMuLow + (kMuHigh - kMuLow) * i / (kGridPoints - 1);
        const double r = rate(mu);
        if (r > best_rate) {
            best_rate = r;
            best_mu = mu;
            best_index = i;
        }
    }
    if (!std::isfinite(best_rate)) {
        return {std::numeric_limits<double>::quiet_NaN(), 0.0, false};
    }

    const double cell = (kMuHigh - kMuLow) / (kGridPoints - 1);
    double lo = std::max(kMuLow, kMuLow + cell * (best_index - 1));
    double hi = std::min(kMuHigh, kMuLow + cell * (best_index + 1));
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - inv_phi * (hi - lo);
    double b = lo + inv_phi * (hi - lo);
    double fa = rate(a);
    double fb = rate(b);
    for (int iter = 0; iter < 90 && hi - lo > 1e-12; ++iter) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = rate(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = rate(a);
        }
    }
    const double refined_mu = (lo + hi) / 2.0;
    const double refined_rate = rate(refined_mu);
    if (refined_rate > best_rate) {
        best_rate = refined_rate;
        best_mu = refined_mu;
    }

    MuOptimum result;
    result.mu = best_mu;
    result.positive = best_rate > 0.0;
    result.rate = std::max(best_rate, 0.0);
    return result;
}

CutoffResult cutoff_distance(Protocol protocol, const SystemParams& params,
                             Convention convention, double floor,
                             MuPolicy mu_policy, E11DarkFactor dark_factor) {
    if (!(std::isfinite(floor)) || floor <= 0.0) {
        throw ConfigError("key rate floor must be positive and finite");
    }

    const auto rate_at = [&](double length_km) -> double {
        ChannelConfig channel{length_km, convention};
        try {
            if (mu_policy == MuPolicy::OptimizedPerDistance) {
                return optimize_mu(protocol, params, channel, dark_factor).rate;
            }
            if (protocol == Protocol::Polarization) {
                return keyrate_polarization(params, channel, dark_factor).R_clamped;
            }
            return keyrate_bb84(params, length_km).R_clamped;
        } catch (const DegenerateChannelError&) {
            return 0.0;
        }
    };

    if (rate_at(0.0) < floor) {
        throw DegenerateChannelError("key rate is below the floor at zero distance");
    }
    if (rate_at(kSearchCapKm) >= floor) {
        return {kSearchCapKm, true};
    }

    double lo = 0.0;  // invariant: rate_at(lo) >= floor > rate_at(hi)
    double hi = kSearchCapKm;
    while (hi - lo > kCutoffResolutionKm) {
        const double mid = (lo + hi) / 2.0;
        if (rate_at(mid) >= floor) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {lo, false};
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SystemParams& params) {
    if (!(std::isfinite(spec.l_start)) || spec.l_start < 0.0) {
        throw ConfigError("sweep start must be >= 0");
    }
    if (!(std::isfinite(spec.l_end)) || spec.l_end < spec.l_start) {
        throw ConfigError("sweep end must be >= sweep start");
    }
    if (!(std::isfinite(spec.l_step)) || spec.l_step <= 0.0) {
        throw ConfigError("sweep step must be > 0");
    }
    if (spec.protocols.empty()) {
        throw ConfigError("sweep needs at least one protocol");
    }
    validate(params);

    const std::size_t n_lengths = static_cast<std::size_t>(
        std::floor((spec.l_end - spec.l_start) / spec.l_step + 1e-9)) + 1;
    const std::size_t n_rows = n_lengths * spec.protocols.size();
    std::vector<SweepRow> rows(n_rows);

    const auto fill_row = [&](std::size_t index) {
        const std::size_t length_index = index / spec.protocols.size();
        const Protocol protocol = spec.protocols[index % spec.protocols.size()];
        const double length_km = spec.l_start + spec.l_step * length_index;
        const ChannelConfig channel{length_km, spec.convention};

        SweepRow row;
        row.length_km = length_km;
        row.protocol = protocol;
        row.convention = spec.convention;

        double mu = params.intensity;
        if (spec.mu_policy == MuPolicy::OptimizedPerDistance) {
            mu = optimize_mu(protocol, params, channel, spec.dark_factor).mu;
        }
        row.mu = mu;

        const double nan = std::numeric_limits<double>::quiet_NaN();
        try {
            if (std::isnan(mu)) {
                throw DegenerateChannelError("no usable intensity");
            }
            SystemParams p = params;
            p.intensity = mu;
            if (protocol == Protocol::Polarization) {
                const PolarizationKeyRateResult kr =
                    keyrate_polarization(p, channel, spec.dark_factor);
                row.rate = kr.R;
                row.rate_clamped = kr.R_clamped;
                row.gain = kr.Q_total;
                row.qber = kr.E_total;
                row.yield_single = kr.Y_11;
                row.error_single = kr.e_11;
            } else {
                const BB84KeyRateResult kr = keyrate_bb84(p, length_km);
                row.rate = kr.R;
                row.rate_clamped = kr.R_clamped;
                row.gain = kr.Q_mu;
                row.qber = kr.E_mu;
                row.yield_single = kr.Y_1;
                row.error_single = kr.e_1;
            }
        } catch (const DegenerateChannelError&) {
            row.degenerate = true;
            row.rate = row.rate_clamped = row.gain = row.qber = nan;
            row.yield_single = row.error_single = nan;
        }
        rows[index] = row;
    };

    const std::size_t n_workers =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n_rows);
    std::vector<std::future<void>> futures;
    futures.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) {
        futures.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < n_rows; i += n_workers) {
                fill_row(i);
            }
        }));
    }
    for (auto& f : futures) {
        f.get();
    }
    return rows;
}

namespace {

std::string format_double(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

double parse_double(const std::string& field, const char* column) {
    const char* begin = field.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw ConfigError(std::string("bad numeric value in column ") + column +
                          ": " + field);
    }
    return value;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "L_km,protocol,convention,mu,R,R_clamped,Q,E,Y_single,e_single\n";
    for (const SweepRow& row : rows) {
        out << format_double(row.length_km) << ',' << to_token(row.protocol)
            << ',' << to_token(row.convention) << ',' << format_double(row.mu)
            << ',' << format_double(row.rate) << ','
            << format_double(row.rate_clamped) << ',' << format_double(row.gain)
            << ',' << format_double(row.qber) << ','
            << format_double(row.yield_single) << ','
            << format_double(row.error_single) << '\n';
    }
}

std::vector<SweepRow> parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("empty sweep file");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "L_km,protocol,convention,mu,R,R_clamped,Q,E,Y_single,e_single") {
        throw ConfigError("unexpected sweep header: " + line);
    }

    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        if (fields.size() != 10) {
            throw ConfigError("sweep row must have 10 columns: " + line);
        }
        SweepRow row;
        row.length_km = parse_double(fields[0], "L_km");
        row.protocol = protocol_from_token(fields[1]);
        row.convention = convention_from_token(fields[2]);
        row.mu = parse_double(fields[3], "mu");
        row.rate = parse_double(fields[4], "R");
        row.rate_clamped = parse_double(fields[5], "R_clamped");
        row.gain = parse_double(fields[6], "Q");
        row.qber = parse_double(fields[7], "E");
        row.yield_single = parse_double(fields[8], "Y_single");
        row.error_single = parse_double(fields[9], "e_single");
        row.degenerate = std::isnan(row.rate);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace pmqkd
