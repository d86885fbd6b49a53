// homodyne_cli.cpp — command-line driver: run scenario simulations and noise
// budgets over a frequency grid, print the sideband-combination feasibility
// table, and run the built-in verification suite.
//
// Exit codes: 0 success, 2 scenario/schema violation, 3 numerical guard.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "homodyne/fock_oracle.hpp"
#include "homodyne/gw.hpp"
#include "homodyne/moments.hpp"
#include "homodyne/network.hpp"
#include "homodyne/readout.hpp"
#include "homodyne/scenario.hpp"

namespace {

constexpr int kExitSchema = 2;
constexpr int kExitNumerical = 3;

using namespace homodyne;

void apply_overrides(Scenario& sc, const CLI::App& cmd) {
    if (cmd.count("--eta")) sc.readout.eta = cmd.get_option("--eta")->as<double>();
    if (cmd.count("--theta")) {
        sc.readout.theta = cmd.get_option("--theta")->as<double>();
        sc.readout.use_policy = false;
    }
    if (cmd.count("--policy")) {
        const std::string p = cmd.get_option("--policy")->as<std::string>();
        if (p != "cot_half_K") throw SchemaError("--policy must be cot_half_K");
        sc.readout.use_policy = true;
    }
    if (cmd.count("--gamma-abs")) {
        sc.readout.gamma_abs = cmd.get_option("--gamma-abs")->as<double>();
        if (!(sc.readout.gamma_abs > 0.0)) throw SchemaError("--gamma-abs must be positive");
        sc.lo_abs_override = sc.readout.gamma_abs;
    }
    if (cmd.count("--large-gamma")) sc.readout.large_gamma = true;
    if (cmd.count("--format")) sc.format = cmd.get_option("--format")->as<std::string>();
    if (cmd.count("--out")) sc.out_path = cmd.get_option("--out")->as<std::string>();
    if (!(sc.readout.eta > 0.0 && sc.readout.eta < 1.0)) throw SchemaError("eta must lie in (0,1)");
    if (sc.format != "csv" && sc.format != "json") throw SchemaError("format must be csv or json");
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << text;
}

int run_simulate(const std::string& scenario_path, const CLI::App& cmd) {
    Scenario sc = load_scenario(scenario_path);
    apply_overrides(sc, cmd);
    require_eight_port_shape(scenario_network(sc));
    const auto rows = simulate(sc);
    emit(sc.format == "csv" ? to_csv(rows) : to_json(rows).dump(2) + "\n", sc.out_path);
    return 0;
}

int run_budget(const std::string& scenario_path, const CLI::App& cmd) {
    Scenario sc = load_scenario(scenario_path);
    apply_overrides(sc, cmd);
    const auto rows = gw_budget(sc);
    emit(sc.format == "csv" ? to_csv(rows) : to_json(rows).dump(2) + "\n", sc.out_path);
    return 0;
}

QuadTarget target_from_string(const std::string& s) {
    if (s == "b1") return QuadTarget::b1;
    if (s == "b2") return QuadTarget::b2;
    if (s == "b1dag") return QuadTarget::b1dag;
    if (s == "b2dag") return QuadTarget::b2dag;
    throw SchemaError("unknown quadrature target '" + s + "' (expected b1, b2, b1dag, b2dag)");
}

nlohmann::json feasibility_to_json(const FeasibilityReport& rep) {
    return {{"pair", {to_string(rep.first), to_string(rep.second)}},
            {"feasible", rep.feasible},
            {"gamma_constraint", rep.gamma_constraint},
            {"beta_over_alpha", {rep.beta_over_alpha.real(), rep.beta_over_alpha.imag()}},
            {"combination_formula", rep.combination_formula}};
}

void print_feasibility_text(const FeasibilityReport& rep) {
    std::printf("pair (%s, %s): %s\n", to_string(rep.first), to_string(rep.second),
                rep.feasible ? "possible" : "not possible");
    if (rep.feasible) {
        std::printf("  gamma pattern : %s\n", rep.gamma_constraint.c_str());
        std::printf("  beta/alpha    : %+.6g %+.6gi\n", rep.beta_over_alpha.real(),
                    rep.beta_over_alpha.imag());
        std::printf("  output        : %s\n", rep.combination_formula.c_str());
    } else {
        std::printf("  %s\n", rep.gamma_constraint.c_str());
    }
}

int run_feasibility(const std::string& pair, bool as_json, const std::string& out_path) {
    nlohmann::json arr = nlohmann::json::array();
    std::vector<FeasibilityReport> reports;
    if (pair == "all") {
        reports = feasibility_table();
    } else {
        const auto comma = pair.find(',');
        if (comma == std::string::npos) {
            throw SchemaError("pair must be 'a,b' with targets from b1, b2, b1dag, b2dag (or 'all')");
        }
        reports.push_back(combination_feasibility(target_from_string(pair.substr(0, comma)),
                                                  target_from_string(pair.substr(comma + 1))));
    }
    for (const auto& rep : reports) arr.push_back(feasibility_to_json(rep));
    if (as_json) {
        emit(arr.dump(2) + "\n", out_path);
    } else {
        for (const auto& rep : reports) print_feasibility_text(rep);
    }
    return 0;
}

// ------------------------------ verification --------------------------------

struct VerifyCounter {
    int passed = 0;
    int failed = 0;
    void check(const char* name, bool ok) {
        std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name);
        (ok ? passed : failed) += 1;
    }
};

int run_verify(const std::string& level) {
    if (level != "quick" && level != "full") throw SchemaError("--level must be quick or full");
    const bool full = level == "full";
    std::mt19937 rng(20240915);
    std::uniform_real_distribution<double> ueta(0.1, 0.9), uang(0.0, 2.0 * M_PI), ud(-0.5, 0.5),
        ug(0.3, 0.9);
    VerifyCounter counter;

    {  // balanced homodyne identity, engine vs closed expectation
        double worst = 0.0;
        const int trials = full ? 100 : 20;
        for (int k = 0; k < trials; ++k) {
            const double eta = ueta(rng);
            const Complex gamma = std::polar(ug(rng) + 1.0, uang(rng));
            const Complex mean_b(ud(rng), ud(rng));
            const auto net = build_balanced_homodyne(eta);
            const auto ports = net.propagate(
                {{"b", AffineMode::annihilator("b").with_displacement(mean_b)},
                 {"l_i", AffineMode::annihilator("l")}});
            const auto s = balanced_readout(eta, gamma, ports.at("D1"), ports.at("D2"));
            InputStateSpec state;
            state.set_coherent("l", gamma);
            worst = std::max(worst,
                             std::abs(expect(s, state) - 2.0 * (std::conj(gamma) * mean_b).real()));
        }
        counter.check("balanced homodyne identity <s> = 2 Re(gamma* <b>)", worst < 1e-12);
    }

    {  // eight-port estimator / angle-readout expectations
        double worst = 0.0;
        const int trials = full ? 100 : 20;
        for (int k = 0; k < trials; ++k) {
            const double eta = ueta(rng), theta = uang(rng);
            const Complex dp(ud(rng), ud(rng)), dm(ud(rng), ud(rng));
            const LoSpec lo = lo_for_scheme(LoSpec{Complex(2.0, 0.0), Complex(2.0, 0.0)},
                                            LoScheme::dbhd_theta, theta);
            EightPortRig rig(AffineMode::annihilator("b+").with_displacement(dp),
                             AffineMode::annihilator("b-").with_displacement(dm), lo, eta);
            const auto state = rig.lo_state();
            worst = std::max(worst, std::abs(expect(rig.estimators(Sideband::upper).annihilation,
                                                    state) - dp));
            const Complex b1 = (dp + std::conj(dm)) / std::sqrt(2.0);
            const Complex b2 = (dp - std::conj(dm)) / (std::sqrt(2.0) * Complex(0.0, 1.0));
            worst = std::max(worst, std::abs(expect(rig.angle_readout(), state) -
                                             (std::cos(theta) * b1 + std::sin(theta) * b2)));
        }
        counter.check("eight-port expectation theorems", worst < 1e-12);
    }

    {  // closed-form noise relations vs engine
        double worst = 0.0;
        const int trials = full ? 60 : 12;
        for (int k = 0; k < trials; ++k) {
            const double eta = ueta(rng), theta = uang(rng), ag = ug(rng) + 1.0;
            const Complex dp(ud(rng), ud(rng)), dm(ud(rng), ud(rng));
            const LoSpec lo = lo_for_scheme(LoSpec{Complex(ag, 0.0), Complex(ag, 0.0)},
                                            LoScheme::dbhd_theta, theta);
            EightPortRig rig(AffineMode::annihilator("b+").with_displacement(dp),
                             AffineMode::annihilator("b-").with_displacement(dm), lo, eta);
            const auto state = rig.lo_state();
            EstimatorNoiseInputs ein{1.0, std::norm(dp), dp, lo.gamma_plus, eta};
            worst = std::max(worst, std::abs(noise_psd(rig.estimators(Sideband::upper).annihilation,
                                                       state) - closed_form_estimator_psd(ein)));
            const Complex b1 = (dp + std::conj(dm)) / std::sqrt(2.0);
            const Complex b2 = (dp - std::conj(dm)) / (std::sqrt(2.0) * Complex(0.0, 1.0));
            AngleNoiseInputs ain;
            ain.s_b_theta = 1.0;
            ain.n_b_sum = std::norm(dp) + std::norm(dm);
            ain.b1_plus_dag = 2.0 * b1.real();
            ain.b2_plus_dag = 2.0 * b2.real();
            ain.abs_gamma = ag;
            ain.eta = eta;
            ain.theta = theta;
            worst = std::max(worst,
                             std::abs(noise_psd(rig.angle_readout(), state) - closed_form_angle_psd(ain)));
        }
        counter.check("closed-form noise relations match engine", worst < 1e-10);
    }

    {  // Fock-oracle equivalence
        double worst = 0.0;
        const int trials = full ? 12 : 3;
        const int cutoff = full ? 14 : 10;
        for (int k = 0; k < trials; ++k) {
            const double eta = ueta(rng), theta = uang(rng), ag = ug(rng);
            const Complex dp(0.5 * ud(rng), 0.5 * ud(rng)), dm(0.5 * ud(rng), 0.5 * ud(rng));
            const LoSpec lo = lo_for_scheme(LoSpec{Complex(ag, 0.0), Complex(ag, 0.0)},
                                            LoScheme::dbhd_theta, theta);
            EightPortRig rig(AffineMode::annihilator("b+").with_displacement(dp),
                             AffineMode::annihilator("b-").with_displacement(dm), lo, eta);
            const auto state = rig.lo_state();
            FockConfig up{cutoff, {"b+", "l+", "e+", "f+"}};
            FockConfig down{cutoff, {"b-", "l-", "e-", "f-"}};
            FockOracle oracle({up, down}, state);
            const auto t_theta = rig.angle_readout();
            const auto engine = symmetrized_correlator(t_theta, t_theta, state);
            const Complex oracle_full = oracle.symmetrized(t_theta, t_theta);
            worst = std::max(worst, std::abs(expect(t_theta, state) - oracle.expect(t_theta)));
            worst = std::max(worst,
                             std::abs(oracle_full - (engine.product_part + Complex(engine.psd, 0.0))));
        }
        counter.check("truncated-Fock oracle equivalence", worst < 1e-6);
    }

    std::printf("%d passed, %d failed\n", counter.passed, counter.failed);
    return counter.failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"homodyne readout simulation toolkit"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string pair = "all";
    std::string level = "quick";
    bool feas_json = false;
    std::string feas_out;

    auto add_common = [](CLI::App* cmd) {
        cmd->add_option("--eta", "beam-splitter transmittance override");
        cmd->add_option("--theta", "homodyne angle override (rad)");
        cmd->add_option("--policy", "frequency-dependent angle policy (cot_half_K)");
        cmd->add_option("--gamma-abs", "LO modulus override");
        cmd->add_flag("--large-gamma", "drop the <n_b>/|gamma|^2 penalty term");
        cmd->add_option("--format", "output format (csv|json)");
        cmd->add_option("--out", "output path (default stdout)");
    };

    CLI::App* sim = app.add_subcommand("simulate", "per-frequency readout expectation/PSD table");
    sim->add_option("scenario", scenario_path, "scenario JSON path")->required();
    add_common(sim);

    CLI::App* budget = app.add_subcommand("gw-budget", "signal-referred noise budget table");
    budget->add_option("scenario", scenario_path, "scenario JSON path")->required();
    add_common(budget);

    CLI::App* feas = app.add_subcommand("feasibility", "sideband-combination feasibility report");
    feas->add_option("pair", pair, "pair 'a,b' from b1,b2,b1dag,b2dag, or 'all'");
    feas->add_flag("--json", feas_json, "emit JSON instead of text");
    feas->add_option("--out", feas_out, "output path (default stdout)");

    CLI::App* verify = app.add_subcommand("verify", "run the oracle/closed-form verification suite");
    verify->add_option("--level", level, "quick or full");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return run_simulate(scenario_path, *sim);
        if (budget->parsed()) return run_budget(scenario_path, *budget);
        if (feas->parsed()) return run_feasibility(pair, feas_json, feas_out);
        if (verify->parsed()) return run_verify(level);
    } catch (const SchemaError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSchema;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    }
    return 0;
}
