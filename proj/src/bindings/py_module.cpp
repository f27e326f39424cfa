#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pmqkd/bloch.hpp"
#include "pmqkd/channel.hpp"
#include "pmqkd/errors.hpp"
#include "pmqkd/experiment.hpp"
#include "pmqkd/keyrate_bb84.hpp"
#include "pmqkd/keyrate_polarization.hpp"
#include "pmqkd/math.hpp"
#include "pmqkd/sim.hpp"

namespace py = pybind11;

namespace {

py::dict polarization_dict(const pmqkd::PolarizationKeyRateResult& r) {
    py::dict d;
    d["Y_11"] = r.Y_11;
    d["e_11"] = r.e_11;
    d["Q_11"] = r.Q_11;
    d["Q_D0"] = r.Q_D0;
    d["Q_D1"] = r.Q_D1;
    d["Q_total"] = r.Q_total;
    d["E_total"] = r.E_total;
    d["mu_prime"] = r.mu_prime;
    d["x"] = r.x;
    d["R"] = r.R;
    d["R_clamped"] = r.R_clamped;
    return d;
}

py::dict bb84_dict(const pmqkd::BB84KeyRateResult& r) {
    py::dict d;
    d["Y_0"] = r.Y_0;
    d["Y_1"] = r.Y_1;
    d["e_1"] = r.e_1;
    d["Q_mu"] = r.Q_mu;
    d["E_mu"] = r.E_mu;
    d["q_1"] = r.q_1;
    d["R"] = r.R;
    d["R_clamped"] = r.R_clamped;
    return d;
}

py::dict row_dict(const pmqkd::SweepRow& row) {
    py::dict d;
    d["L_km"] = row.length_km;
    d["protocol"] = pmqkd::to_token(row.protocol);
    d["convention"] = pmqkd::to_token(row.convention);
    d["mu"] = row.mu;
    d["R"] = row.rate;
    d["R_clamped"] = row.rate_clamped;
    d["Q"] = row.gain;
    d["E"] = row.qber;
    d["Y_single"] = row.yield_single;
    d["e_single"] = row.error_single;
    d["degenerate"] = row.degenerate;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Phase-matching QKD key-rate models and protocol simulator";

    py::register_exception<pmqkd::ConfigError>(m, "ConfigError",
                                               PyExc_ValueError);
    py::register_exception<pmqkd::DegenerateChannelError>(
        m, "DegenerateChannelError", PyExc_ArithmeticError);

    m.def("binary_entropy", &pmqkd::binary_entropy, py::arg("p"));
    m.def("bessel_i0", &pmqkd::bessel_i0, py::arg("x"));

    py::class_<pmqkd::PolarizationState>(m, "PolarizationState")
        .def_readonly("amp0", &pmqkd::PolarizationState::amp0)
        .def_readonly("amp1", &pmqkd::PolarizationState::amp1);

    m.def("bloch_state", &pmqkd::bloch_state, py::arg("theta"), py::arg("phi"));
    m.def(
        "basis_states",
        [](double theta, double phi) {
            const pmqkd::Basis b = pmqkd::basis_from_phase(theta, phi);
            return py::make_tuple(b.state0, b.state1);
        },
        py::arg("theta"), py::arg("phi"));
    m.def("inner_product", &pmqkd::inner_product, py::arg("a"), py::arg("b"));
    m.def("norm_squared", &pmqkd::norm_squared, py::arg("s"));

    py::class_<pmqkd::SystemParams>(m, "SystemParams")
        .def(py::init<>())
        .def_readwrite("dark_count_rate", &pmqkd::SystemParams::dark_count_rate)
        .def_readwrite("misalignment", &pmqkd::SystemParams::misalignment)
        .def_readwrite("detector_efficiency",
                       &pmqkd::SystemParams::detector_efficiency)
        .def_readwrite("error_correction_inefficiency",
                       &pmqkd::SystemParams::error_correction_inefficiency)
        .def_readwrite("intrinsic_error", &pmqkd::SystemParams::intrinsic_error)
        .def_readwrite("attenuation_db_per_km",
                       &pmqkd::SystemParams::attenuation_db_per_km)
        .def_readwrite("intensity", &pmqkd::SystemParams::intensity);

    m.def(
        "end_to_end_transmittance",
        [](const pmqkd::SystemParams& p, double length_km) {
            return pmqkd::end_to_end_transmittance(p, length_km);
        },
        py::arg("params"), py::arg("length_km"));
    m.def(
        "arm_transmittances",
        [](const pmqkd::SystemParams& p, double length_km,
           const std::string& convention) {
            const pmqkd::ChannelConfig channel{
                length_km, pmqkd::convention_from_token(convention)};
            const pmqkd::ArmTransmittances arms = pmqkd::arm_transmittances(p, channel);
            return py::make_tuple(arms.eta_a, arms.eta_b);
        },
        py::arg("params"), py::arg("length_km"),
        py::arg("convention") = "paper-literal");

    m.def(
        "keyrate_polarization",
        [](const pmqkd::SystemParams& p, double length_km,
           const std::string& convention, const std::string& dark_factor) {
            const pmqkd::ChannelConfig channel{
                length_km, pmqkd::convention_from_token(convention)};
            return polarization_dict(pmqkd::keyrate_polarization(
                p, channel, pmqkd::e11_dark_factor_from_token(dark_factor)));
        },
        py::arg("params"), py::arg("length_km") = 0.0,
        py::arg("convention") = "paper-literal",
        py::arg("e11_dark_factor") = "1-pd2");

    m.def(
        "keyrate_bb84",
        [](const pmqkd::SystemParams& p, double length_km) {
            return bb84_dict(pmqkd::keyrate_bb84(p, length_km));
        },
        py::arg("params"), py::arg("length_km") = 0.0);

    m.def(
        "optimize_mu",
        [](const std::string& protocol, const pmqkd::SystemParams& p,
           double length_km, const std::string& convention,
           const std::string& dark_factor) {
            const pmqkd::ChannelConfig channel{
                length_km, pmqkd::convention_from_token(convention)};
            const pmqkd::MuOptimum best = pmqkd::optimize_mu(
                pmqkd::protocol_from_token(protocol), p, channel,
                pmqkd::e11_dark_factor_from_token(dark_factor));
            py::dict d;
            d["mu"] = best.mu;
            d["R"] = best.rate;
            d["positive"] = best.positive;
            return d;
        },
        py::arg("protocol"), py::arg("params"), py::arg("length_km") = 0.0,
        py::arg("convention") = "paper-literal",
        py::arg("e11_dark_factor") = "1-pd2");

    m.def(
        "cutoff_distance",
        [](const std::string& protocol, const pmqkd::SystemParams& p,
           const std::string& convention, double floor, bool optimize_mu,
           const std::string& dark_factor) {
            const pmqkd::CutoffResult r = pmqkd::cutoff_distance(
                pmqkd::protocol_from_token(protocol), p,
                pmqkd::convention_from_token(convention), floor,
                optimize_mu ? pmqkd::MuPolicy::OptimizedPerDistance
                            : pmqkd::MuPolicy::Fixed,
                pmqkd::e11_dark_factor_from_token(dark_factor));
            py::dict d;
            d["cutoff_km"] = r.distance_km;
            d["lower_bound_only"] = r.lower_bound_only;
            return d;
        },
        py::arg("protocol"), py::arg("params"),
        py::arg("convention") = "paper-literal", py::arg("floor") = 1e-15,
        py::arg("optimize_mu") = false, py::arg("e11_dark_factor") = "1-pd2");

    m.def(
        "sweep",
        [](const pmqkd::SystemParams& p, double l_start, double l_end,
           double l_step, const std::vector<std::string>& protocols,
           const std::string& convention, bool optimize_mu,
           const std::string& dark_factor) {
            pmqkd::SweepSpec spec;
            spec.l_start = l_start;
            spec.l_end = l_end;
            spec.l_step = l_step;
            spec.protocols.clear();
            for (const std::string& token : protocols) {
                spec.protocols.push_back(pmqkd::protocol_from_token(token));
            }
            spec.convention = pmqkd::convention_from_token(convention);
            spec.mu_policy = optimize_mu ? pmqkd::MuPolicy::OptimizedPerDistance
                                         : pmqkd::MuPolicy::Fixed;
            spec.dark_factor = pmqkd::e11_dark_factor_from_token(dark_factor);
            py::list rows;
            for (const pmqkd::SweepRow& row : pmqkd::run_sweep(spec, p)) {
                rows.append(row_dict(row));
            }
            return rows;
        },
        py::arg("params"), py::arg("l_start") = 0.0, py::arg("l_end") = 400.0,
        py::arg("l_step") = 5.0,
        py::arg("protocols") = std::vector<std::string>{"bb84", "polarization"},
        py::arg("convention") = "paper-literal", py::arg("optimize_mu") = false,
        py::arg("e11_dark_factor") = "1-pd2");

    m.def(
        "simulate",
        [](const pmqkd::SystemParams& p, const std::string& mode,
           double length_km, const std::string& convention, double theta,
           double phi_1, double phi_2, std::uint32_t phase_slices,
           std::uint64_t n_rounds, std::uint64_t seed) {
            pmqkd::ProtocolConfig cfg;
            cfg.mode = mode == "phase" ? pmqkd::SimMode::Phase
                                       : pmqkd::SimMode::Polarization;
            cfg.params = p;
            cfg.channel = pmqkd::ChannelConfig{
                length_km, pmqkd::convention_from_token(convention)};
            cfg.theta = theta;
            cfg.phi_1 = phi_1;
            cfg.phi_2 = phi_2;
            cfg.phase_slices = phase_slices;
            cfg.n_rounds = n_rounds;
            cfg.seed = seed;
            const pmqkd::SimTally t = pmqkd::simulate(cfg);
            py::dict d;
            d["n_rounds"] = t.n_rounds;
            d["n_success"] = t.n_success;
            d["n_sifted"] = t.n_sifted;
            d["n_errors"] = t.n_errors;
            d["empirical_gain"] = t.empirical_gain;
            d["empirical_qber"] = t.empirical_qber;
            d["gain_stderr"] = t.gain_stderr;
            d["qber_stderr"] = t.qber_stderr;
            d["seed"] = t.seed;
            d["mode"] = pmqkd::to_token(t.mode);
            d["convention"] = pmqkd::to_token(t.convention);
            return d;
        },
        py::arg("params"), py::arg("mode") = "polarization",
        py::arg("length_km") = 0.0, py::arg("convention") = "paper-literal",
        py::arg("theta") = 1.5707963267948966,
        py::arg("phi_1") = 0.5235987755982988,
        py::arg("phi_2") = 0.7853981633974483, py::arg("phase_slices") = 16,
        py::arg("n_rounds") = 100000, py::arg("seed") = 0);
}
