// readout.hpp — readout observables built from detector photon numbers: the
// balanced-homodyne observable, its sideband combinations, the double
// balanced (eight-port) pair, the annihilation/creation estimators, the
// homodyne-angle readout, the sideband-combination feasibility table, and the
// closed-form noise-spectral-density relations.

#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "homodyne/modes.hpp"
#include "homodyne/moments.hpp"
#include "homodyne/network.hpp"
#include "homodyne/states.hpp"

namespace homodyne {

// Balanced-homodyne observable from the two detected photon numbers:
//   s = [(1-eta) n_c - eta n_d - (1-2 eta)|gamma|^2] / sqrt(eta(1-eta));
// <s> = <gamma^* b + gamma b^dag> independently of eta.
inline QuadObservable balanced_readout(double eta, Complex gamma, const AffineMode& c_port,
                                       const AffineMode& d_port) {
    require_eta(eta);
    if (!std::isfinite(gamma.real()) || !std::isfinite(gamma.imag())) {
        throw std::invalid_argument("balanced_readout: gamma must be finite");
    }
    const double root = std::sqrt(eta * (1.0 - eta));
    QuadObservable s;
    s.add_term(Complex((1.0 - eta) / root, 0.0), c_port);
    s.add_term(Complex(-eta / root, 0.0), d_port);
    s.add_scalar(Complex(-(1.0 - 2.0 * eta) / root * std::norm(gamma), 0.0));
    return s;
}

// ---------------------- two-photon balanced homodyne -------------------------

struct SidebandReadouts {
    QuadObservable upper;  // s_+
    QuadObservable lower;  // s_-
};

struct SidebandCombination {
    QuadObservable sum;         // (s_+ + s_-)/(sqrt(2)|gamma|), self-adjoint
    QuadObservable difference;  // (s_+ - s_-)/(sqrt(2) i |gamma|), anti-self-adjoint
};

// (s_+ + s_-)/(sqrt(2)|gamma|) and (s_+ - s_-)/(sqrt(2) i |gamma|); with the
// LO phases theta_+/- = theta these read out <b_theta + b_theta^dag> and
// <b_{theta'} - b_{theta'}^dag>.
inline SidebandCombination sideband_combination(const QuadObservable& s_upper,
                                                const QuadObservable& s_lower, double abs_gamma) {
    if (!(abs_gamma > 0.0)) {
        throw std::invalid_argument("sideband_combination: |gamma| must be positive");
    }
    const Complex ws(1.0 / (std::sqrt(2.0) * abs_gamma), 0.0);
    const Complex wd = Complex(0.0, -1.0) * ws;  // 1/(sqrt(2) i |gamma|)
    return {ws * (s_upper + s_lower), wd * (s_upper - s_lower)};
}

// Balanced homodyne detection applied per sideband: propagates the balanced
// network at each sideband frequency and exposes the readout observables.
// The local-oscillator modes are rig-owned pure modes labeled "l+"/"l-".
class BalancedSidebandRig {
  public:
    BalancedSidebandRig(const AffineMode& b_plus, const AffineMode& b_minus, const LoSpec& lo,
                        double eta)
        : lo_(lo), eta_(eta) {
        lo_.require_nonvanishing();
        const NetworkTopology net = build_balanced_homodyne(eta);
        ports_upper_ = net.propagate({{"b", b_plus}, {"l_i", AffineMode::annihilator("l+")}});
        ports_lower_ = net.propagate({{"b", b_minus}, {"l_i", AffineMode::annihilator("l-")}});
    }

    SidebandReadouts readouts() const {
        return {balanced_readout(eta_, lo_.gamma_plus, ports_upper_.at("D1"), ports_upper_.at("D2")),
                balanced_readout(eta_, lo_.gamma_minus, ports_lower_.at("D1"), ports_lower_.at("D2"))};
    }

    SidebandCombination combination() const {
        require_equal_moduli(lo_, "BalancedSidebandRig::combination");
        const auto s = readouts();
        return sideband_combination(s.upper, s.lower, lo_.abs_plus());
    }

    InputStateSpec lo_state() const {
        InputStateSpec state;
        state.set_coherent("l+", lo_.gamma_plus);
        state.set_coherent("l-", lo_.gamma_minus);
        return state;
    }

    static void require_equal_moduli(const LoSpec& lo, const char* where) {
        if (std::abs(lo.abs_plus() - lo.abs_minus()) > 1e-12 * (1.0 + lo.abs_plus())) {
            throw std::invalid_argument(std::string(where) + ": |gamma+| must equal |gamma-|");
        }
    }

  private:
    LoSpec lo_;
    double eta_;
    std::map<std::string, AffineMode> ports_upper_;
    std::map<std::string, AffineMode> ports_lower_;
};

// -------------------- sideband-combination feasibility -----------------------

enum class QuadTarget { b1, b2, b1dag, b2dag };

inline const char* to_string(QuadTarget t) {
    switch (t) {
        case QuadTarget::b1: return "b1";
        case QuadTarget::b2: return "b2";
        case QuadTarget::b1dag: return "b1dag";
        case QuadTarget::b2dag: return "b2dag";
    }
    return "?";
}

struct FeasibilityReport {
    QuadTarget first = QuadTarget::b1;
    QuadTarget second = QuadTarget::b2;
    bool feasible = false;
    std::string gamma_constraint;     // required (gamma+, gamma-) phase pattern
    Complex beta_over_alpha{0.0, 0.0};  // for the stated pattern, at the given moduli
    std::string combination_formula;  // resulting expectation value
};

// Coefficients of (b1, b2, b1^dag, b2^dag) in alpha <s_+> + beta <s_->.
struct CombinationCoefficients {
    Complex b1, b2, b1dag, b2dag;
};

inline CombinationCoefficients combination_coefficients(Complex alpha, Complex beta, Complex gp,
                                                        Complex gm) {
    const double s2 = 1.0 / std::sqrt(2.0);
    const Complex i(0.0, 1.0);
    return {s2 * (alpha * std::conj(gp) + beta * gm), s2 * i * (alpha * std::conj(gp) - beta * gm),
            s2 * (alpha * gp + beta * std::conj(gm)), s2 * i * (-alpha * gp + beta * std::conj(gm))};
}

// Determinant of the 2x2 condition system that must vanish for the
// combination to reduce onto the given unordered pair.
inline Complex feasibility_determinant(QuadTarget a, QuadTarget b, Complex gp, Complex gm) {
    auto is = [&](QuadTarget x, QuadTarget y) {
        return (a == x && b == y) || (a == y && b == x);
    };
    if (is(QuadTarget::b1, QuadTarget::b2)) return 2.0 * gp * std::conj(gm);
    if (is(QuadTarget::b1, QuadTarget::b1dag)) return std::conj(gp * gm) - gp * gm;
    if (is(QuadTarget::b1, QuadTarget::b2dag)) return std::conj(gp * gm) + gp * gm;
    if (is(QuadTarget::b1dag, QuadTarget::b2)) return std::conj(gp * gm) + gp * gm;
    if (is(QuadTarget::b1dag, QuadTarget::b2dag)) return -2.0 * std::conj(gp) * gm;
    if (is(QuadTarget::b2, QuadTarget::b2dag)) return std::conj(gp * gm) - gp * gm;
    throw std::invalid_argument("feasibility_determinant: pair must be two distinct targets");
}

inline FeasibilityReport combination_feasibility(QuadTarget a, QuadTarget b, double abs_gp = 1.0,
                                                 double abs_gm = 1.0) {
    if (a == b) throw std::invalid_argument("combination_feasibility: pair must be distinct");
    if (!(abs_gp > 0.0 && abs_gm > 0.0)) {
        throw std::invalid_argument("combination_feasibility: |gamma+-| must be positive");
    }
    auto is = [&](QuadTarget x, QuadTarget y) {
        return (a == x && b == y) || (a == y && b == x);
    };
    FeasibilityReport rep;
    rep.first = a;
    rep.second = b;
    const double ratio = abs_gp / abs_gm;
    const Complex i(0.0, 1.0);
    if (is(QuadTarget::b1, QuadTarget::b2) || is(QuadTarget::b1dag, QuadTarget::b2dag)) {
        rep.feasible = false;
        rep.gamma_constraint = "requires gamma+ = 0 or gamma- = 0 (no valid local oscillator)";
        rep.combination_formula = "none";
        return rep;
    }
    rep.feasible = true;
    if (is(QuadTarget::b1, QuadTarget::b1dag)) {
        rep.gamma_constraint = "gamma+ = |gamma+| e^{+i theta}, gamma- = |gamma-| e^{-i theta}";
        rep.beta_over_alpha = Complex(ratio, 0.0);
        rep.combination_formula =
            "<s+>/|gamma+| + <s->/|gamma-| = sqrt(2) < b1 e^{-i theta} + b1dag e^{+i theta} >";
    } else if (is(QuadTarget::b1, QuadTarget::b2dag)) {
        rep.gamma_constraint = "gamma+ = |gamma+| e^{+i theta}, gamma- = i |gamma-| e^{-i theta}";
        rep.beta_over_alpha = -i * ratio;
        rep.combination_formula =
            "<s+>/|gamma+| - i <s->/|gamma-| = sqrt(2) < e^{-i theta} b1 - i e^{+i theta} b2dag >";
    } else if (is(QuadTarget::b1dag, QuadTarget::b2)) {
        rep.gamma_constraint = "gamma+ = |gamma+| e^{+i theta}, gamma- = i |gamma-| e^{-i theta}";
        rep.beta_over_alpha = i * ratio;
        rep.combination_formula =
            "<s+>/|gamma+| + i <s->/|gamma-| = sqrt(2) < i e^{-i theta} b2 + e^{+i theta} b1dag >";
    } else {  // (b2, b2dag)
        rep.gamma_constraint = "gamma+ = |gamma+| e^{+i theta}, gamma- = |gamma-| e^{-i theta}";
        rep.beta_over_alpha = Complex(-ratio, 0.0);
        rep.combination_formula =
            "<s+>/|gamma+| - <s->/|gamma-| = sqrt(2) i < e^{-i theta} b2 - e^{+i theta} b2dag >";
    }
    return rep;
}

inline std::vector<FeasibilityReport> feasibility_table(double abs_gp = 1.0, double abs_gm = 1.0) {
    using T = QuadTarget;
    const std::vector<std::pair<T, T>> pairs = {{T::b1, T::b2},    {T::b1, T::b1dag},
                                                {T::b1, T::b2dag}, {T::b1dag, T::b2},
                                                {T::b1dag, T::b2dag}, {T::b2, T::b2dag}};
    std::vector<FeasibilityReport> out;
    out.reserve(pairs.size());
    for (const auto& [a, b] : pairs) out.push_back(combination_feasibility(a, b, abs_gp, abs_gm));
    return out;
}

// ---------------- general-moduli phase-matched combination ------------------

enum class PhaseCase { zero, half_pi };

struct PhaseMatchedSolution {
    double beta = 0.0;  // coefficient paired with alpha
    Complex kappa{0.0, 0.0};
    Complex lambda{0.0, 0.0};
};

// Real-coefficient combination alpha s_+ + beta s_- written as
// (kappa b1 + lambda b2 + h.c.-of-coefficients)/sqrt(2); the `zero` case
// makes both combination phases vanish, the `half_pi` case puts both at pi/2.
// Requires tan(theta+) = tan(theta-) with theta+ = theta- as the chosen branch.
inline PhaseMatchedSolution solve_phase_matched(PhaseCase pc, Complex gamma_plus, Complex gamma_minus,
                                                double alpha) {
    const double abs_gp = std::abs(gamma_plus);
    const double abs_gm = std::abs(gamma_minus);
    if (!(abs_gp > 0.0 && abs_gm > 0.0) || alpha == 0.0) {
        throw std::invalid_argument("solve_phase_matched: need |gamma+-| > 0 and alpha != 0");
    }
    const double tp = std::arg(gamma_plus);
    const double tm = std::arg(gamma_minus);
    // tan(theta+) = tan(theta-) and same branch
    if (std::abs(std::sin(tp - tm)) > 1e-12 || std::cos(tp - tm) <= 0.0) {
        throw std::invalid_argument("solve_phase_matched: infeasible phase (theta+ != theta-)");
    }
    PhaseMatchedSolution sol;
    if (pc == PhaseCase::zero) {
        sol.beta = alpha * abs_gp / abs_gm;
        sol.kappa = Complex(2.0 * alpha * abs_gp * std::abs(std::cos(tp)), 0.0);
        sol.lambda = Complex(2.0 * alpha * abs_gp * std::abs(std::sin(tp)), 0.0);
    } else {
        sol.beta = -alpha * abs_gp / abs_gm;
        sol.kappa = Complex(0.0, 2.0 * alpha * abs_gp * std::abs(std::sin(tp)));
        sol.lambda = Complex(0.0, 2.0 * alpha * abs_gp * std::abs(std::cos(tp)));
    }
    return sol;
}

// --------------------- eight-port double balanced homodyne -------------------

struct DoubleBalancedReadouts {
    QuadObservable d1d2;  // self-adjoint; <d1d2> = <gamma^* b + gamma b^dag>
    QuadObservable d3d4;  // anti-self-adjoint; <d3d4> = <gamma^* b - gamma b^dag>
};

namespace detail {
inline void require_dbhd_ports(const std::map<std::string, AffineMode>& ports, Complex gamma) {
    if (gamma == Complex(0.0, 0.0)) {
        throw std::invalid_argument("double_balanced_readouts: gamma must be nonzero");
    }
    for (const char* p : {"D1", "D2", "D3", "D4"}) {
        if (ports.find(p) == ports.end()) {
            throw std::invalid_argument(std::string("double_balanced_readouts: missing port ") + p);
        }
    }
}
}  // namespace detail

// s_D1D2 = (2/sqrt(eta(1-eta))) [(1-eta) n_D1 - eta n_D2 - (1-2eta)/2 |gamma|^2]
inline QuadObservable double_balanced_d1d2(const std::map<std::string, AffineMode>& ports, double eta,
                                           Complex gamma) {
    require_eta(eta);
    detail::require_dbhd_ports(ports, gamma);
    const Complex two_over(2.0 / std::sqrt(eta * (1.0 - eta)), 0.0);
    QuadObservable d1d2;
    d1d2.add_term(two_over * (1.0 - eta), ports.at("D1"));
    d1d2.add_term(two_over * (-eta), ports.at("D2"));
    d1d2.add_scalar(two_over * (-(1.0 - 2.0 * eta) / 2.0 * std::norm(gamma)));
    return d1d2;
}

// s_D3D4 = (2i/sqrt(eta(1-eta))) [(1-eta) n_D4 - eta n_D3 - (1-2eta)/2 |gamma|^2]
inline QuadObservable double_balanced_d3d4(const std::map<std::string, AffineMode>& ports, double eta,
                                           Complex gamma) {
    require_eta(eta);
    detail::require_dbhd_ports(ports, gamma);
    const Complex two_i_over(0.0, 2.0 / std::sqrt(eta * (1.0 - eta)));
    QuadObservable d3d4;
    d3d4.add_term(two_i_over * (1.0 - eta), ports.at("D4"));
    d3d4.add_term(two_i_over * (-eta), ports.at("D3"));
    d3d4.add_scalar(two_i_over * (-(1.0 - 2.0 * eta) / 2.0 * std::norm(gamma)));
    return d3d4;
}

inline DoubleBalancedReadouts double_balanced_readouts(const std::map<std::string, AffineMode>& ports,
                                                       double eta, Complex gamma) {
    return {double_balanced_d1d2(ports, eta, gamma), double_balanced_d3d4(ports, eta, gamma)};
}

struct FieldEstimators {
    QuadObservable annihilation;  // expectation <b>
    QuadObservable creation;      // expectation <b^dag>; equals adjoint(annihilation)
};

inline FieldEstimators field_estimators(const QuadObservable& d1d2, const QuadObservable& d3d4,
                                        Complex gamma) {
    if (gamma == Complex(0.0, 0.0)) {
        throw std::invalid_argument("field_estimators: gamma must be nonzero");
    }
    const Complex half_conj = 1.0 / (2.0 * std::conj(gamma));
    const Complex half = 1.0 / (2.0 * gamma);
    return {half_conj * (d1d2 + d3d4), half * (d1d2 - d3d4)};
}

// Two-photon eight-port rig: propagates the eight-port network at both
// sideband frequencies and exposes all readout observables.  LO and vacuum
// sources are rig-owned pure modes "l+/-", "e+/-", "f+/-".
class EightPortRig {
  public:
    EightPortRig(const NetworkTopology& net, const AffineMode& b_plus, const AffineMode& b_minus,
                 const LoSpec& lo)
        : lo_(lo), eta2_(net.element("BS2").eta), eta4_(net.element("BS4").eta) {
        lo_.require_nonvanishing();
        ports_upper_ = net.propagate({{"b", b_plus},
                                      {"e_i", AffineMode::annihilator("e+")},
                                      {"l_i", AffineMode::annihilator("l+")},
                                      {"f_i", AffineMode::annihilator("f+")}});
        ports_lower_ = net.propagate({{"b", b_minus},
                                      {"e_i", AffineMode::annihilator("e-")},
                                      {"l_i", AffineMode::annihilator("l-")},
                                      {"f_i", AffineMode::annihilator("f-")}});
    }

    EightPortRig(const AffineMode& b_plus, const AffineMode& b_minus, const LoSpec& lo, double eta)
        : EightPortRig(build_eight_port(eta), b_plus, b_minus, lo) {}

    const std::map<std::string, AffineMode>& ports(Sideband sb) const {
        return sb == Sideband::upper ? ports_upper_ : ports_lower_;
    }

    Complex gamma(Sideband sb) const {
        return sb == Sideband::upper ? lo_.gamma_plus : lo_.gamma_minus;
    }

    // n_D1..n_D4 photon-number observables of one sideband.
    std::map<std::string, QuadObservable> detector_numbers(Sideband sb) const {
        std::map<std::string, QuadObservable> out;
        for (const auto& [port, mode] : ports(sb)) out[port] = QuadObservable::photon_number(mode);
        return out;
    }

    DoubleBalancedReadouts readouts(Sideband sb) const {
        const auto& p = ports(sb);
        const Complex g = gamma(sb);
        DoubleBalancedReadouts out = double_balanced_readouts(p, eta2_, g);
        if (eta4_ != eta2_) {
            // extended mode with independent BS4 transmittance
            out.d3d4 = double_balanced_d3d4(p, eta4_, g);
        }
        return out;
    }

    FieldEstimators estimators(Sideband sb) const {
        const auto r = readouts(sb);
        return field_estimators(r.d1d2, r.d3d4, gamma(sb));
    }

    // t_theta = (s_D1D2+/|g+| + s_D1D2-/|g-| + s_D3D4+/|g+| - s_D3D4-/|g-|)/(2 sqrt(2));
    // <t_theta> = <cos(theta) b1 + sin(theta) b2> for theta+ = theta- = theta.
    QuadObservable angle_readout() const {
        BalancedSidebandRig::require_equal_moduli(lo_, "EightPortRig::angle_readout");
        const double phase_gap = std::arg(lo_.gamma_plus * std::conj(lo_.gamma_minus));
        if (std::abs(phase_gap) > 1e-12) {
            throw std::invalid_argument("EightPortRig::angle_readout: requires theta+ = theta-");
        }
        const auto up = readouts(Sideband::upper);
        const auto lo = readouts(Sideband::lower);
        const Complex wp(1.0 / (2.0 * std::sqrt(2.0) * lo_.abs_plus()), 0.0);
        const Complex wm(1.0 / (2.0 * std::sqrt(2.0) * lo_.abs_minus()), 0.0);
        return wp * up.d1d2 + wm * lo.d1d2 + wp * up.d3d4 - wm * lo.d3d4;
    }

    double theta() const { return std::arg(lo_.gamma_plus); }

    InputStateSpec lo_state() const {
        InputStateSpec state;
        state.set_coherent("l+", lo_.gamma_plus);
        state.set_coherent("l-", lo_.gamma_minus);
        return state;
    }

  private:
    LoSpec lo_;
    double eta2_;
    double eta4_;
    std::map<std::string, AffineMode> ports_upper_;
    std::map<std::string, AffineMode> ports_lower_;
};

// ----------------------- closed-form noise relations -------------------------

struct EstimatorNoiseInputs {
    double s_b = 1.0;          // S of the b fluctuation
    double n_b = 0.0;          // <n_b>
    Complex mean_b{0.0, 0.0};  // <b>
    Complex gamma{1.0, 0.0};   // LO amplitude
    double eta = 0.5;
};

// S of the annihilation-estimator fluctuation, all beam-splitter imperfection
// terms included:
//
//   S = S_b + 2<n_b>/|g|^2 + 1
//     + ((1-2eta)/(sqrt(eta(1-eta)) |g|^2)) [<g^* b + g b^dag> - i <g^* b - g b^dag>]
//     + 2 (1-2eta)^2 / (eta(1-eta)).
//
// The two eta=1/2-vanishing terms are derived from the defining detector
// combinations; they are validated against both the moment engine and the
// truncated-Fock oracle, and reduce to the textbook S_b + 2<n_b>/|g|^2 + 1
// at eta = 1/2.
inline double closed_form_estimator_psd(const EstimatorNoiseInputs& in) {
    require_eta(in.eta);
    const double g2 = std::norm(in.gamma);
    const double root = std::sqrt(in.eta * (1.0 - in.eta));
    const double mism = 1.0 - 2.0 * in.eta;
    const Complex z = in.mean_b * std::conj(in.gamma);
    double s = in.s_b + 2.0 * in.n_b / g2 + 1.0;
    s += mism / (root * g2) * 2.0 * (z.real() + z.imag());
    s += 2.0 * mism * mism / (in.eta * (1.0 - in.eta));
    return s;
}

struct AngleNoiseInputs {
    double s_b_theta = 1.0;   // S of the b_theta fluctuation
    double n_b_sum = 0.0;     // <n_b+ + n_b->
    double b1_plus_dag = 0.0; // <b1 + b1^dag>
    double b2_plus_dag = 0.0; // <b2 + b2^dag>
    double abs_gamma = 1.0;
    double eta = 0.5;
    double theta = 0.0;
};

// S of the angle-readout fluctuation:
//
//   S = S_btheta + <n_b+ + n_b->/|g|^2 + 1
//     + ((1-2eta)/(sqrt(2 eta(1-eta)) |g|)) [(cos th - sin th)<b1+b1^dag>
//                                            + (cos th + sin th)<b2+b2^dag>]
//     + 2 (1-2eta)^2 / (eta(1-eta)).
//
// Constant term derived as for closed_form_estimator_psd; the mean-dependent
// term is unchanged from the detector-combination derivation.
inline double closed_form_angle_psd(const AngleNoiseInputs& in) {
    require_eta(in.eta);
    const double g2 = in.abs_gamma * in.abs_gamma;
    const double mism = 1.0 - 2.0 * in.eta;
    const double root2 = std::sqrt(2.0 * in.eta * (1.0 - in.eta));
    double s = in.s_b_theta + in.n_b_sum / g2 + 1.0;
    s += mism / (root2 * in.abs_gamma) *
         ((std::cos(in.theta) - std::sin(in.theta)) * in.b1_plus_dag +
          (std::cos(in.theta) + std::sin(in.theta)) * in.b2_plus_dag);
    s += 2.0 * mism * mism / (in.eta * (1.0 - in.eta));
    return s;
}

}  // namespace homodyne
