// gw.hpp — main-interferometer models and signal-referred noise budgets
// through the eight-port readout.
//
// Two model variants: a pass-through channel with unit vacuum quadrature
// noise and a frequency-dependent response, and the Fabry-Perot input-output
// relation b1 = a1 e^{2i beta}, b2 = (a2 - K a1) e^{2i beta}
// + sqrt(2K) (h/h_SQL) e^{i beta}.  K, beta, h_SQL and the signal h are
// user-supplied functions of the sideband frequency.

#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "homodyne/modes.hpp"
#include "homodyne/moments.hpp"
#include "homodyne/readout.hpp"
#include "homodyne/states.hpp"

namespace homodyne {

enum class GwVariant { pass_through, kimble };

struct GwModel {
    GwVariant variant = GwVariant::kimble;
    std::function<double(double)> kappa;        // K(Omega) > 0          (kimble)
    std::function<double(double)> beta_fp;      // Fabry-Perot phase     (kimble)
    std::function<double(double)> h_sql;        // h_SQL(Omega) > 0      (kimble)
    std::function<Complex(double)> response;    // R(Omega)              (pass_through)
    std::function<Complex(double)> signal;      // h(Omega)

    static GwModel kimble(std::function<double(double)> kappa, std::function<double(double)> beta_fp,
                          std::function<double(double)> h_sql, std::function<Complex(double)> signal) {
        GwModel m;
        m.variant = GwVariant::kimble;
        m.kappa = std::move(kappa);
        m.beta_fp = std::move(beta_fp);
        m.h_sql = std::move(h_sql);
        m.signal = std::move(signal);
        return m;
    }

    static GwModel pass_through(std::function<Complex(double)> response,
                                std::function<Complex(double)> signal) {
        GwModel m;
        m.variant = GwVariant::pass_through;
        m.response = std::move(response);
        m.signal = std::move(signal);
        return m;
    }
};

namespace detail {
// kappa = 0 is allowed for the output map (it degenerates to the identity);
// the response needs kappa > 0.
inline void require_kimble_params(double kappa, double h_sql, bool strict_kappa) {
    if (kappa < 0.0 || (strict_kappa && kappa == 0.0)) {
        throw std::invalid_argument("gw model: K(Omega) must be positive");
    }
    if (!(h_sql > 0.0)) throw std::invalid_argument("gw model: h_SQL(Omega) must be > 0");
}
}  // namespace detail

// Quadratures of the main-interferometer output for the kimble variant, over
// the vacuum input modes a+/a-.  The signal enters as a displacement of the
// phase quadrature; the K term is a symplectic shear, so the output pair
// keeps canonical commutators.
inline std::pair<AffineMode, AffineMode> kimble_quadratures(const GwModel& model, double omega) {
    if (model.variant != GwVariant::kimble) {
        throw std::invalid_argument("kimble_quadratures: model is not the kimble variant");
    }
    const double kappa = model.kappa(omega);
    const double beta = model.beta_fp(omega);
    const double h_sql = model.h_sql(omega);
    detail::require_kimble_params(kappa, h_sql, /*strict_kappa=*/false);
    const Complex h = model.signal ? model.signal(omega) : Complex(0.0, 0.0);

    const auto a_plus = AffineMode::annihilator("a+");
    const auto a_minus = AffineMode::annihilator("a-");
    auto [a1, a2] = to_quadratures(a_plus, a_minus);
    const Complex e2(std::polar(1.0, 2.0 * beta));
    const Complex e1(std::polar(1.0, beta));
    AffineMode b1 = e2 * a1;
    AffineMode b2 = e2 * (a2 - Complex(kappa, 0.0) * a1) +
                    AffineMode::constant(std::sqrt(2.0 * kappa) * (h / h_sql) * e1);
    return {b1, b2};
}

inline std::pair<AffineMode, AffineMode> kimble_output(const GwModel& model, double omega) {
    auto [b1, b2] = kimble_quadratures(model, omega);
    return from_quadratures(b1, b2);
}

// Pass-through variant: b1 = a1, b2 = a2 with the signal R(Omega) h(Omega)
// displacing the theta-quadrature.
inline std::pair<AffineMode, AffineMode> pass_through_output(const GwModel& model, double omega,
                                                             double theta) {
    if (model.variant != GwVariant::pass_through) {
        throw std::invalid_argument("pass_through_output: model is not the pass_through variant");
    }
    const Complex r = model.response(omega);
    if (r == Complex(0.0, 0.0)) throw std::invalid_argument("gw model: response must be nonzero");
    const Complex h = model.signal ? model.signal(omega) : Complex(0.0, 0.0);
    const auto a_plus = AffineMode::annihilator("a+");
    const auto a_minus = AffineMode::annihilator("a-");
    auto [b1, b2] = to_quadratures(a_plus, a_minus);
    b1 = b1 + AffineMode::constant(std::cos(theta) * r * h);
    b2 = b2 + AffineMode::constant(std::sin(theta) * r * h);
    return from_quadratures(b1, b2);
}

inline std::pair<AffineMode, AffineMode> model_output(const GwModel& model, double omega,
                                                      double theta) {
    return model.variant == GwVariant::kimble ? kimble_output(model, omega)
                                              : pass_through_output(model, omega, theta);
}

struct ResponseAndNoise {
    Complex response{0.0, 0.0};
    AffineMode noise_field;  // h_n over the a+/a- input modes; zero mean
};

// R(Omega) = e^{i beta} sin(theta) sqrt(2K)/h_SQL and
// h_n = (e^{i beta} h_SQL/sqrt(2K)) ((cot(theta) - K) a1 + a2).
inline ResponseAndNoise response_and_noise(const GwModel& model, double omega, double theta) {
    const double sin_theta = std::sin(theta);
    if (std::abs(sin_theta) < 1e-12) {
        throw std::invalid_argument("response_and_noise: response vanishes at theta in {0, pi}");
    }
    const auto a_plus = AffineMode::annihilator("a+");
    const auto a_minus = AffineMode::annihilator("a-");
    auto [a1, a2] = to_quadratures(a_plus, a_minus);
    ResponseAndNoise out;
    if (model.variant == GwVariant::kimble) {
        const double kappa = model.kappa(omega);
        const double beta = model.beta_fp(omega);
        const double h_sql = model.h_sql(omega);
        detail::require_kimble_params(kappa, h_sql, /*strict_kappa=*/true);
        const Complex e1(std::polar(1.0, beta));
        out.response = e1 * sin_theta * std::sqrt(2.0 * kappa) / h_sql;
        const Complex front = e1 * h_sql / std::sqrt(2.0 * kappa);
        const double cot_theta = std::cos(theta) / sin_theta;
        out.noise_field = front * (Complex(cot_theta - kappa, 0.0) * a1 + a2);
    } else {
        out.response = model.response(omega);
        if (out.response == Complex(0.0, 0.0)) {
            throw std::invalid_argument("gw model: response must be nonzero");
        }
        const Complex inv = 1.0 / out.response;
        out.noise_field = inv * (Complex(std::cos(theta), 0.0) * a1 + Complex(sin_theta, 0.0) * a2);
    }
    return out;
}

// ------------------------------ theta policy ---------------------------------

struct ThetaPolicy {
    enum class Kind { fixed, cot_half_k };
    Kind kind = Kind::fixed;
    double theta = M_PI / 2.0;

    static ThetaPolicy fixed(double theta) { return {Kind::fixed, theta}; }
    static ThetaPolicy cot_half_k() { return {Kind::cot_half_k, 0.0}; }
};

// fixed -> constant; cot_half_k -> arccot(K(Omega)/2) in (0, pi).
inline double policy_theta(const ThetaPolicy& policy, const GwModel& model, double omega) {
    if (policy.kind == ThetaPolicy::Kind::fixed) return policy.theta;
    if (model.variant != GwVariant::kimble) {
        throw std::invalid_argument("policy_theta: cot_half_k policy needs the kimble variant");
    }
    return std::atan2(1.0, model.kappa(omega) / 2.0);
}

// ------------------------------ noise budget ---------------------------------

struct EightPortReadoutParams {
    double eta = 0.5;
    double abs_gamma = 1e4;
    bool large_gamma = false;          // drop the <n_b>/|gamma|^2 penalty term
    bool exclude_signal_power = false; // drop |<b+->|^2 from <n_b+->
};

struct NoiseBudgetRow {
    double omega = 0.0;
    double theta = 0.0;
    double s_hn = 0.0;             // signal-referred main-interferometer noise
    double readout_penalty = 0.0;  // (1/|R|^2)(1 + <n_b+ + n_b->/|gamma|^2)
    double s_total = 0.0;
    Complex h_estimate{0.0, 0.0};  // expect(t_theta)/R
};

// One budget row: at eta = 1/2 the total follows the closed relation
// S_t/|R|^2 = S_hn + (1/|R|^2)(1 + <n_b>/|gamma|^2); off 1/2 the total is the
// engine-computed noise_psd(t_theta)/|R|^2 and the penalty is reported as the
// difference from S_hn.
inline NoiseBudgetRow budget_row(const GwModel& model, const EightPortReadoutParams& readout,
                                 double omega, double theta) {
    NoiseBudgetRow row;
    row.omega = omega;
    row.theta = theta;

    const auto rn = response_and_noise(model, omega, theta);
    const double abs_r2 = std::norm(rn.response);
    row.s_hn = field_noise_psd(rn.noise_field);

    auto [b_plus, b_minus] = model_output(model, omega, theta);
    const LoSpec lo = lo_for_scheme(LoSpec{Complex(readout.abs_gamma, 0.0),
                                           Complex(readout.abs_gamma, 0.0)},
                                    LoScheme::dbhd_theta, theta);
    EightPortRig rig(b_plus, b_minus, lo, readout.eta);
    const InputStateSpec state = rig.lo_state();

    const QuadObservable t_theta = rig.angle_readout();
    row.h_estimate = expect(t_theta, state) / rn.response;

    double n_sum = 0.0;
    for (const AffineMode* b : {&b_plus, &b_minus}) {
        n_sum += b->v_norm2();
        if (!readout.exclude_signal_power) n_sum += std::norm(mean_field(*b, state));
    }
    const double gamma2 = readout.abs_gamma * readout.abs_gamma;
    const double penalty_term = readout.large_gamma ? 0.0 : n_sum / gamma2;

    if (std::abs(readout.eta - 0.5) < 1e-12) {
        row.readout_penalty = (1.0 + penalty_term) / abs_r2;
        row.s_total = row.s_hn + row.readout_penalty;
    } else {
        row.s_total = noise_psd(t_theta, state) / abs_r2;
        row.readout_penalty = row.s_total - row.s_hn;
    }
    return row;
}

inline std::vector<NoiseBudgetRow> signal_referred_budget(const GwModel& model,
                                                          const EightPortReadoutParams& readout,
                                                          const ThetaPolicy& policy,
                                                          const std::vector<double>& grid) {
    std::vector<NoiseBudgetRow> rows;
    rows.reserve(grid.size());
    for (const double omega : grid) {
        rows.push_back(budget_row(model, readout, omega, policy_theta(policy, model, omega)));
    }
    return rows;
}

}  // namespace homodyne
