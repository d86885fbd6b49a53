// scenario.hpp — JSON scenario schema (version 1), frequency grids, tabulated
// model functions, and the deterministic CSV/JSON tables produced by the
// simulation and budget drivers.

#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "homodyne/gw.hpp"
#include "homodyne/moments.hpp"
#include "homodyne/network.hpp"
#include "homodyne/readout.hpp"
#include "homodyne/states.hpp"

namespace homodyne {

// Scenario-file shape violations; distinguished from numerical guards at the
// CLI surface (exit 2 vs exit 3).
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// ------------------------------- grid ---------------------------------------

struct GridSpec {
    double omega_min = 1.0;
    double omega_max = 1.0;
    int points = 1;
    bool log_spacing = false;

    std::vector<double> make() const {
        if (points < 1) throw SchemaError("grid: points must be >= 1");
        if (!(omega_min > 0.0)) throw SchemaError("grid: omega_min must be > 0");
        if (points > 1 && !(omega_max > omega_min)) {
            throw SchemaError("grid: omega_max must exceed omega_min");
        }
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(points));
        if (points == 1) {
            out.push_back(omega_min);
            return out;
        }
        for (int k = 0; k < points; ++k) {
            const double t = static_cast<double>(k) / (points - 1);
            out.push_back(log_spacing
                              ? omega_min * std::pow(omega_max / omega_min, t)
                              : omega_min + (omega_max - omega_min) * t);
        }
        return out;
    }
};

// ----------------------- tabulated / closed-form functions -------------------

// Piecewise-linear table keyed by omega; evaluation outside the covered range
// is a numerical guard violation.
class Table1D {
  public:
    Table1D() = default;
    explicit Table1D(std::vector<std::pair<double, double>> rows) : rows_(std::move(rows)) {
        if (rows_.empty()) throw SchemaError("table: empty");
        for (std::size_t k = 1; k < rows_.size(); ++k) {
            if (!(rows_[k].first > rows_[k - 1].first)) {
                throw SchemaError("table: omega column must be strictly increasing");
            }
        }
    }

    double operator()(double omega) const {
        if (omega < rows_.front().first - 1e-12 || omega > rows_.back().first + 1e-12) {
            throw std::runtime_error("table: omega outside tabulated range");
        }
        if (rows_.size() == 1) return rows_.front().second;
        std::size_t hi = 1;
        while (hi + 1 < rows_.size() && rows_[hi].first < omega) ++hi;
        const auto& [x0, y0] = rows_[hi - 1];
        const auto& [x1, y1] = rows_[hi];
        const double t = std::clamp((omega - x0) / (x1 - x0), 0.0, 1.0);
        return y0 + (y1 - y0) * t;
    }

  private:
    std::vector<std::pair<double, double>> rows_;
};

// Real function of omega: {"const": v}, {"table": [[omega, v], ...]}, or the
// non-normative demo form {"rational_demo": {"k0":, "omega_c":}} giving
// k0 omega_c^4 / (omega^2 (omega^2 + omega_c^2)).
inline std::function<double(double)> scalar_fn_from_json(const nlohmann::json& j,
                                                         const std::string& what) {
    if (j.is_number()) {
        const double v = j.get<double>();
        return [v](double) { return v; };
    }
    if (j.is_object() && j.contains("const")) {
        const double v = j.at("const").get<double>();
        return [v](double) { return v; };
    }
    if (j.is_object() && j.contains("table")) {
        std::vector<std::pair<double, double>> rows;
        for (const auto& r : j.at("table")) {
            if (!r.is_array() || r.size() != 2) throw SchemaError(what + ": table rows must be [omega, value]");
            rows.emplace_back(r[0].get<double>(), r[1].get<double>());
        }
        Table1D table(std::move(rows));
        return [table](double omega) { return table(omega); };
    }
    if (j.is_object() && j.contains("rational_demo")) {
        const auto& d = j.at("rational_demo");
        const double k0 = d.at("k0").get<double>();
        const double oc = d.at("omega_c").get<double>();
        return [k0, oc](double omega) {
            return k0 * oc * oc * oc * oc / (omega * omega * (omega * omega + oc * oc));
        };
    }
    throw SchemaError(what + ": expected const, table, or rational_demo");
}

// Complex function of omega: {"re":, "im":} or {"table": [[omega, re, im], ...]}.
inline std::function<Complex(double)> complex_fn_from_json(const nlohmann::json& j,
                                                           const std::string& what) {
    if (j.is_number()) {
        const Complex v(j.get<double>(), 0.0);
        return [v](double) { return v; };
    }
    if (j.is_object() && (j.contains("re") || j.contains("im"))) {
        const Complex v(j.value("re", 0.0), j.value("im", 0.0));
        return [v](double) { return v; };
    }
    if (j.is_object() && j.contains("table")) {
        std::vector<std::pair<double, double>> re_rows, im_rows;
        for (const auto& r : j.at("table")) {
            if (!r.is_array() || r.size() != 3) {
                throw SchemaError(what + ": table rows must be [omega, re, im]");
            }
            re_rows.emplace_back(r[0].get<double>(), r[1].get<double>());
            im_rows.emplace_back(r[0].get<double>(), r[2].get<double>());
        }
        Table1D re_t(std::move(re_rows)), im_t(std::move(im_rows));
        return [re_t, im_t](double omega) { return Complex(re_t(omega), im_t(omega)); };
    }
    throw SchemaError(what + ": expected re/im or table");
}

// --------------------------------- scenario ----------------------------------

struct LoScenario {
    // closed-form parameters (moduli + phases) or per-omega tabulated values
    bool tabulated = false;
    double abs_plus = 1.0;
    double abs_minus = 1.0;
    double theta_plus = 0.0;
    double theta_minus = 0.0;
    std::function<Complex(double)> gamma_plus_fn;   // tabulated form
    std::function<Complex(double)> gamma_minus_fn;

    LoSpec at(double omega) const {
        if (tabulated) return {gamma_plus_fn(omega), gamma_minus_fn(omega)};
        return {std::polar(abs_plus, theta_plus), std::polar(abs_minus, theta_minus)};
    }
};

struct ReadoutSpec {
    double eta = 0.5;
    bool use_policy = false;  // cot(theta) = K/2
    double theta = M_PI / 2.0;
    double gamma_abs = 1e4;
    bool large_gamma = false;
    bool exclude_signal_power = false;
};

struct Scenario {
    int schema_version = 1;
    std::string network_name = "eight-port";  // empty when an inline topology is given
    NetworkTopology inline_network;
    LoScenario lo;
    double lo_abs_override = 0.0;  // > 0 replaces both LO moduli (CLI --gamma-abs)
    GwModel model;
    GridSpec grid;
    ReadoutSpec readout;
    std::string out_path;       // empty -> stdout
    std::string format = "csv"; // csv | json
};

// Named networks pick up the effective detection transmittance; inline
// topologies carry their own.
inline NetworkTopology scenario_network(const Scenario& sc) {
    if (sc.network_name.empty()) return sc.inline_network;
    return build_network(sc.network_name, sc.readout.eta);
}

inline GwModel gw_model_from_json(const nlohmann::json& j) {
    const std::string variant = j.value("variant", "kimble");
    std::function<Complex(double)> signal = [](double) { return Complex(0.0, 0.0); };
    if (j.contains("h")) signal = complex_fn_from_json(j.at("h"), "model.h");
    if (variant == "kimble") {
        if (!j.contains("kappa") || !j.contains("h_sql")) {
            throw SchemaError("model: kimble variant needs kappa and h_sql");
        }
        auto beta = j.contains("beta_fp") ? scalar_fn_from_json(j.at("beta_fp"), "model.beta_fp")
                                          : std::function<double(double)>([](double) { return 0.0; });
        return GwModel::kimble(scalar_fn_from_json(j.at("kappa"), "model.kappa"), beta,
                               scalar_fn_from_json(j.at("h_sql"), "model.h_sql"), signal);
    }
    if (variant == "pass_through") {
        auto response = j.contains("response")
                            ? complex_fn_from_json(j.at("response"), "model.response")
                            : std::function<Complex(double)>([](double) { return Complex(1.0, 0.0); });
        return GwModel::pass_through(response, signal);
    }
    throw SchemaError("model: unknown variant '" + variant + "'");
}

inline LoScenario lo_from_json(const nlohmann::json& j) {
    LoScenario lo;
    if (j.contains("table")) {
        std::vector<std::pair<double, double>> rp, ip, rm, im;
        for (const auto& r : j.at("table")) {
            if (!r.is_array() || r.size() != 5) {
                throw SchemaError("lo.table rows must be [omega, re+, im+, re-, im-]");
            }
            rp.emplace_back(r[0].get<double>(), r[1].get<double>());
            ip.emplace_back(r[0].get<double>(), r[2].get<double>());
            rm.emplace_back(r[0].get<double>(), r[3].get<double>());
            im.emplace_back(r[0].get<double>(), r[4].get<double>());
        }
        Table1D trp(std::move(rp)), tip(std::move(ip)), trm(std::move(rm)), tim(std::move(im));
        lo.tabulated = true;
        lo.gamma_plus_fn = [trp, tip](double w) { return Complex(trp(w), tip(w)); };
        lo.gamma_minus_fn = [trm, tim](double w) { return Complex(trm(w), tim(w)); };
        return lo;
    }
    lo.abs_plus = j.value("abs_plus", 1.0);
    lo.abs_minus = j.value("abs_minus", 1.0);
    lo.theta_plus = j.value("theta_plus", 0.0);
    lo.theta_minus = j.value("theta_minus", 0.0);
    if (!(lo.abs_plus > 0.0) || !(lo.abs_minus > 0.0)) {
        throw SchemaError("lo: abs_plus and abs_minus must be positive");
    }
    return lo;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
    Scenario sc;
    sc.schema_version = j.value("schema_version", 1);
    if (sc.schema_version != 1) throw SchemaError("unsupported schema_version");

    if (!j.contains("network")) {
        sc.network_name = "eight-port";
    } else if (j.at("network").is_string()) {
        sc.network_name = j.at("network").get<std::string>();
        try {
            (void)build_network(sc.network_name);
        } catch (const std::invalid_argument& e) {
            throw SchemaError(e.what());
        }
    } else {
        sc.network_name.clear();
        sc.inline_network = network_from_json(j.at("network"));
    }

    if (j.contains("lo")) sc.lo = lo_from_json(j.at("lo"));
    if (j.contains("model")) {
        sc.model = gw_model_from_json(j.at("model"));
    } else {
        sc.model = GwModel::pass_through([](double) { return Complex(1.0, 0.0); },
                                         [](double) { return Complex(0.0, 0.0); });
    }

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        sc.grid.omega_min = g.at("omega_min").get<double>();
        sc.grid.omega_max = g.value("omega_max", sc.grid.omega_min);
        sc.grid.points = g.value("points", 1);
        const std::string spacing = g.value("spacing", "linear");
        if (spacing == "log") {
            sc.grid.log_spacing = true;
        } else if (spacing != "linear") {
            throw SchemaError("grid.spacing must be linear or log");
        }
    }

    if (j.contains("readout")) {
        const auto& r = j.at("readout");
        sc.readout.eta = r.value("eta", 0.5);
        if (r.contains("policy")) {
            const std::string p = r.at("policy").get<std::string>();
            if (p != "cot_half_K") throw SchemaError("readout.policy must be cot_half_K");
            sc.readout.use_policy = true;
        }
        if (r.contains("theta")) sc.readout.theta = r.at("theta").get<double>();
        sc.readout.gamma_abs = r.value("gamma_abs", sc.readout.gamma_abs);
        sc.readout.large_gamma = r.value("large_gamma", false);
        sc.readout.exclude_signal_power = r.value("exclude_signal_power", false);
        if (!(sc.readout.eta > 0.0 && sc.readout.eta < 1.0)) {
            throw SchemaError("readout.eta must lie in (0,1)");
        }
        if (!(sc.readout.gamma_abs > 0.0)) throw SchemaError("readout.gamma_abs must be positive");
    }

    if (j.contains("outputs")) {
        sc.out_path = j.at("outputs").value("path", "");
        sc.format = j.at("outputs").value("format", "csv");
        if (sc.format != "csv" && sc.format != "json") {
            throw SchemaError("outputs.format must be csv or json");
        }
    }
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open scenario file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("scenario JSON parse error: ") + e.what());
    }
    try {
        return scenario_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("scenario schema error: ") + e.what());
    }
}

// ------------------------------ simulation rows ------------------------------

struct SimulationRow {
    double omega = 0.0;
    double theta = 0.0;
    double n_det_up[4] = {0, 0, 0, 0};  // <n_D1..D4> upper sideband
    double n_det_lo[4] = {0, 0, 0, 0};  // lower sideband
    double s_d1d2_up = 0.0;             // self-adjoint -> real
    double s_d1d2_lo = 0.0;
    double im_s_d3d4_up = 0.0;          // anti-self-adjoint -> imaginary
    double im_s_d3d4_lo = 0.0;
    Complex t_theta{0.0, 0.0};
    double psd_t_theta = 0.0;
    double psd_t_b_plus = 0.0;
};

inline double scenario_theta(const Scenario& sc, double omega) {
    if (!sc.readout.use_policy) return sc.readout.theta;
    return policy_theta(ThetaPolicy::cot_half_k(), sc.model, omega);
}

// The simulation table is defined for eight-port-shaped topologies (four
// detectors fed through BS2/BS4).
inline void require_eight_port_shape(const NetworkTopology& net) {
    try {
        (void)net.element("BS2");
        (void)net.element("BS4");
    } catch (const std::invalid_argument&) {
        throw SchemaError("simulate: network must be an eight-port topology (BS2/BS4 + D1..D4)");
    }
    if (net.detectors.size() != 4) {
        throw SchemaError("simulate: network must expose detectors D1..D4");
    }
}

inline SimulationRow simulate_row(const Scenario& sc, const NetworkTopology& net, double omega) {
    SimulationRow row;
    row.omega = omega;
    row.theta = scenario_theta(sc, omega);

    auto [b_plus, b_minus] = model_output(sc.model, omega, row.theta);
    LoSpec base = sc.lo.at(omega);
    if (sc.lo_abs_override > 0.0) {
        base = LoSpec{Complex(sc.lo_abs_override, 0.0), Complex(sc.lo_abs_override, 0.0)};
    }
    // the angle readout fixes the LO phases to theta+/- = theta
    const LoSpec lo = lo_for_scheme(base, LoScheme::dbhd_theta, row.theta);
    EightPortRig rig(net, b_plus, b_minus, lo);
    const InputStateSpec state = rig.lo_state();

    const char* names[4] = {"D1", "D2", "D3", "D4"};
    for (int k = 0; k < 4; ++k) {
        row.n_det_up[k] =
            expect(QuadObservable::photon_number(rig.ports(Sideband::upper).at(names[k])), state).real();
        row.n_det_lo[k] =
            expect(QuadObservable::photon_number(rig.ports(Sideband::lower).at(names[k])), state).real();
    }
    const auto up = rig.readouts(Sideband::upper);
    const auto down = rig.readouts(Sideband::lower);
    row.s_d1d2_up = expect(up.d1d2, state).real();
    row.s_d1d2_lo = expect(down.d1d2, state).real();
    row.im_s_d3d4_up = expect(up.d3d4, state).imag();
    row.im_s_d3d4_lo = expect(down.d3d4, state).imag();

    const QuadObservable t_theta = rig.angle_readout();
    row.t_theta = expect(t_theta, state);
    row.psd_t_theta = noise_psd(t_theta, state);
    row.psd_t_b_plus = noise_psd(rig.estimators(Sideband::upper).annihilation, state);
    return row;
}

inline std::vector<SimulationRow> simulate(const Scenario& sc) {
    const NetworkTopology net = scenario_network(sc);
    std::vector<SimulationRow> rows;
    for (const double omega : sc.grid.make()) rows.push_back(simulate_row(sc, net, omega));
    return rows;
}

inline std::vector<NoiseBudgetRow> gw_budget(const Scenario& sc) {
    EightPortReadoutParams params;
    params.eta = sc.readout.eta;
    params.abs_gamma = sc.readout.gamma_abs;
    params.large_gamma = sc.readout.large_gamma;
    params.exclude_signal_power = sc.readout.exclude_signal_power;
    const ThetaPolicy policy = sc.readout.use_policy ? ThetaPolicy::cot_half_k()
                                                     : ThetaPolicy::fixed(sc.readout.theta);
    return signal_referred_budget(sc.model, params, policy, sc.grid.make());
}

// ------------------------------ formatting -----------------------------------

namespace detail {
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}
}  // namespace detail

inline const char* simulation_csv_header() {
    return "omega,theta,n_d1_up,n_d2_up,n_d3_up,n_d4_up,n_d1_lo,n_d2_lo,n_d3_lo,n_d4_lo,"
           "s_d1d2_up,s_d1d2_lo,im_s_d3d4_up,im_s_d3d4_lo,re_t_theta,im_t_theta,"
           "psd_t_theta,psd_t_b_plus";
}

inline std::string to_csv(const std::vector<SimulationRow>& rows) {
    std::ostringstream out;
    out << simulation_csv_header() << "\n";
    using detail::fmt;
    for (const auto& r : rows) {
        out << fmt(r.omega) << ',' << fmt(r.theta);
        for (int k = 0; k < 4; ++k) out << ',' << fmt(r.n_det_up[k]);
        for (int k = 0; k < 4; ++k) out << ',' << fmt(r.n_det_lo[k]);
        out << ',' << fmt(r.s_d1d2_up) << ',' << fmt(r.s_d1d2_lo) << ',' << fmt(r.im_s_d3d4_up)
            << ',' << fmt(r.im_s_d3d4_lo) << ',' << fmt(r.t_theta.real()) << ','
            << fmt(r.t_theta.imag()) << ',' << fmt(r.psd_t_theta) << ',' << fmt(r.psd_t_b_plus)
            << "\n";
    }
    return out.str();
}

inline nlohmann::json to_json(const std::vector<SimulationRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"omega", r.omega},
                       {"theta", r.theta},
                       {"n_det_up", {r.n_det_up[0], r.n_det_up[1], r.n_det_up[2], r.n_det_up[3]}},
                       {"n_det_lo", {r.n_det_lo[0], r.n_det_lo[1], r.n_det_lo[2], r.n_det_lo[3]}},
                       {"s_d1d2_up", r.s_d1d2_up},
                       {"s_d1d2_lo", r.s_d1d2_lo},
                       {"im_s_d3d4_up", r.im_s_d3d4_up},
                       {"im_s_d3d4_lo", r.im_s_d3d4_lo},
                       {"re_t_theta", r.t_theta.real()},
                       {"im_t_theta", r.t_theta.imag()},
                       {"psd_t_theta", r.psd_t_theta},
                       {"psd_t_b_plus", r.psd_t_b_plus}});
    }
    return arr;
}

inline const char* budget_csv_header() {
    return "omega,theta,s_hn,readout_penalty,s_total,re_h_est,im_h_est";
}

inline std::string to_csv(const std::vector<NoiseBudgetRow>& rows) {
    std::ostringstream out;
    out << budget_csv_header() << "\n";
    using detail::fmt;
    for (const auto& r : rows) {
        out << fmt(r.omega) << ',' << fmt(r.theta) << ',' << fmt(r.s_hn) << ','
            << fmt(r.readout_penalty) << ',' << fmt(r.s_total) << ',' << fmt(r.h_estimate.real())
            << ',' << fmt(r.h_estimate.imag()) << "\n";
    }
    return out.str();
}

inline nlohmann::json to_json(const std::vector<NoiseBudgetRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"omega", r.omega},
                       {"theta", r.theta},
                       {"s_hn", r.s_hn},
                       {"readout_penalty", r.readout_penalty},
                       {"s_total", r.s_total},
                       {"re_h_est", r.h_estimate.real()},
                       {"im_h_est", r.h_estimate.imag()}});
    }
    return arr;
}

}  // namespace homodyne
