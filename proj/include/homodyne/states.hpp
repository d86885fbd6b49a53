// states.hpp — input-state specification: product of per-mode vacuum and
// coherent states, plus the local-oscillator sideband amplitudes.

#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "homodyne/modes.hpp"

namespace homodyne {

// Product state over modes: a mode absent from the map is in vacuum, a mode
// present is in a coherent state with the stored complex amplitude.  No
// cross-mode or cross-frequency correlations.
class InputStateSpec {
  public:
    InputStateSpec() = default;

    InputStateSpec& set_coherent(const std::string& label, Complex amplitude) {
        if (!std::isfinite(amplitude.real()) || !std::isfinite(amplitude.imag())) {
            throw std::invalid_argument("InputStateSpec: coherent amplitude must be finite");
        }
        amplitudes_[label] = amplitude;
        return *this;
    }

    InputStateSpec& set_vacuum(const std::string& label) {
        amplitudes_.erase(label);
        return *this;
    }

    Complex amplitude(const std::string& label) const {
        auto it = amplitudes_.find(label);
        return it == amplitudes_.end() ? Complex(0.0, 0.0) : it->second;
    }

    bool is_vacuum(const std::string& label) const {
        return amplitudes_.find(label) == amplitudes_.end();
    }

    const std::map<std::string, Complex>& amplitudes() const { return amplitudes_; }

  private:
    std::map<std::string, Complex> amplitudes_;
};

// Local-oscillator amplitudes at one sector: gamma_plus drives the upper
// sideband, gamma_minus the lower.
struct LoSpec {
    Complex gamma_plus{1.0, 0.0};
    Complex gamma_minus{1.0, 0.0};

    double abs_plus() const { return std::abs(gamma_plus); }
    double abs_minus() const { return std::abs(gamma_minus); }

    void require_nonvanishing() const {
        if (abs_plus() <= 0.0 || abs_minus() <= 0.0) {
            throw std::invalid_argument(
                "LoSpec: |gamma+| and |gamma-| must be nonzero (eta in {0,1} analogue: "
                "a vanishing local oscillator is meaningless as a balanced homodyne detection)");
        }
    }
};

// Sideband-combination schemes and the gamma+/gamma- phase pattern each one
// requires.  `theta` is the homodyne angle.
enum class LoScheme { b1_b1dag, b1_b2dag, b1dag_b2, b2_b2dag, dbhd_theta };

inline LoSpec lo_for_scheme(const LoSpec& spec, LoScheme scheme, double theta) {
    const Complex ei = std::polar(1.0, theta);
    const Complex emi = std::polar(1.0, -theta);
    const Complex i(0.0, 1.0);
    const double ap = spec.abs_plus();
    const double am = spec.abs_minus();
    switch (scheme) {
        case LoScheme::b1_b1dag:
            return {ap * ei, am * emi};
        case LoScheme::b1_b2dag:
        case LoScheme::b1dag_b2:
            return {ap * ei, i * am * emi};
        case LoScheme::b2_b2dag:
            return {ap * ei, am * emi};
        case LoScheme::dbhd_theta:
            // theta+ = theta- = theta
            return {ap * ei, am * ei};
    }
    throw std::invalid_argument("lo_for_scheme: unknown scheme");
}

}  // namespace homodyne
