// modes.hpp — sideband mode registry and the affine algebra of field operators.
//
// Every operator handled here has the form
//
//     x = sum_m u_m a_m  +  sum_m v_m a_m^dag  +  d * 1,
//
// with a_m the annihilation operator of a discrete mode m and d a classical
// displacement in dimensionless quadrature units.  Modes obey per-sector
// canonical commutators [a_m, a_n^dag] = delta_mn; the continuum 2*pi*delta
// factors of frequency-resolved treatments are divided out at this
// representation level, so downstream spectral densities are finite
// coefficients of the sector-diagonal part.

#pragma once

#include <cmath>
#include <complex>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace homodyne {

using Complex = std::complex<double>;

// Coefficients below this magnitude are dropped after arithmetic so that
// structural comparisons stay exact.
inline constexpr double kCoeffEpsilon = 1e-15;

enum class Sideband { upper, lower };
enum class SourceKind { main_input, lo, aux_vacuum };

struct ModeId {
    std::string label;
    Sideband sideband = Sideband::upper;
    SourceKind kind = SourceKind::aux_vacuum;
};

// One sideband pair at fixed offset frequency Omega > 0.  Sectors at
// different Omega are independent; an AffineMode must reference modes of a
// single sector only.
class SidebandSector {
  public:
    explicit SidebandSector(double omega) : omega_(omega) {
        if (!(omega > 0.0)) {
            throw std::invalid_argument("SidebandSector: omega must be > 0");
        }
    }

    const ModeId& add_mode(const std::string& label, Sideband sb, SourceKind kind) {
        auto [it, inserted] = modes_.emplace(label, ModeId{label, sb, kind});
        if (!inserted) {
            throw std::invalid_argument("SidebandSector: duplicate mode label '" + label + "'");
        }
        return it->second;
    }

    bool contains(const std::string& label) const { return modes_.count(label) != 0; }

    const ModeId& mode(const std::string& label) const {
        auto it = modes_.find(label);
        if (it == modes_.end()) {
            throw std::invalid_argument("SidebandSector: unknown mode '" + label + "'");
        }
        return it->second;
    }

    double omega() const { return omega_; }

    std::vector<std::string> labels() const {
        std::vector<std::string> out;
        out.reserve(modes_.size());
        for (const auto& [label, id] : modes_) out.push_back(label);
        return out;
    }

  private:
    double omega_;
    std::map<std::string, ModeId> modes_;
};

// Affine field operator; immutable value type.  Coefficient maps are keyed by
// mode label and never hold explicit zeros.
class AffineMode {
  public:
    using CoeffMap = std::map<std::string, Complex>;

    AffineMode() = default;
    AffineMode(CoeffMap u, CoeffMap v, Complex d)
        : u_(std::move(u)), v_(std::move(v)), d_(d) {
        prune(u_);
        prune(v_);
        if (std::abs(d_) < kCoeffEpsilon) d_ = Complex(0.0, 0.0);
    }

    static AffineMode annihilator(const std::string& label) {
        return AffineMode({{label, Complex(1.0, 0.0)}}, {}, Complex(0.0, 0.0));
    }

    static AffineMode creator(const std::string& label) {
        return AffineMode({}, {{label, Complex(1.0, 0.0)}}, Complex(0.0, 0.0));
    }

    static AffineMode constant(Complex d) { return AffineMode({}, {}, d); }

    const CoeffMap& u() const { return u_; }
    const CoeffMap& v() const { return v_; }
    Complex displacement() const { return d_; }

    Complex u_coeff(const std::string& label) const { return lookup(u_, label); }
    Complex v_coeff(const std::string& label) const { return lookup(v_, label); }

    bool is_zero() const { return u_.empty() && v_.empty() && d_ == Complex(0.0, 0.0); }

    AffineMode with_displacement(Complex d) const { return AffineMode(u_, v_, d); }

    // sum_m |u_m|^2 and sum_m |v_m|^2
    double u_norm2() const { return norm2(u_); }
    double v_norm2() const { return norm2(v_); }

    std::vector<std::string> mode_labels() const {
        std::vector<std::string> out;
        for (const auto& [label, c] : u_) out.push_back(label);
        for (const auto& [label, c] : v_) {
            if (u_.find(label) == u_.end()) out.push_back(label);
        }
        return out;
    }

    bool references_only(const SidebandSector& sector) const {
        for (const auto& [label, c] : u_) {
            if (!sector.contains(label)) return false;
        }
        for (const auto& [label, c] : v_) {
            if (!sector.contains(label)) return false;
        }
        return true;
    }

    friend AffineMode operator*(Complex w, const AffineMode& x) {
        CoeffMap u = x.u_, v = x.v_;
        for (auto& [label, c] : u) c *= w;
        for (auto& [label, c] : v) c *= w;
        return AffineMode(std::move(u), std::move(v), w * x.d_);
    }

    friend AffineMode operator+(const AffineMode& a, const AffineMode& b) {
        CoeffMap u = a.u_, v = a.v_;
        for (const auto& [label, c] : b.u_) u[label] += c;
        for (const auto& [label, c] : b.v_) v[label] += c;
        return AffineMode(std::move(u), std::move(v), a.d_ + b.d_);
    }

    friend AffineMode operator-(const AffineMode& a, const AffineMode& b) {
        return a + Complex(-1.0, 0.0) * b;
    }

    friend bool operator==(const AffineMode& a, const AffineMode& b) {
        return a.u_ == b.u_ && a.v_ == b.v_ && a.d_ == b.d_;
    }

    // x^dag: u <-> conj(v), d -> conj(d).
    AffineMode adjoint() const {
        CoeffMap u, v;
        for (const auto& [label, c] : v_) u[label] = std::conj(c);
        for (const auto& [label, c] : u_) v[label] = std::conj(c);
        return AffineMode(std::move(u), std::move(v), std::conj(d_));
    }

  private:
    static void prune(CoeffMap& m) {
        for (auto it = m.begin(); it != m.end();) {
            if (std::abs(it->second) < kCoeffEpsilon) {
                it = m.erase(it);
            } else {
                ++it;
            }
        }
    }

    static Complex lookup(const CoeffMap& m, const std::string& label) {
        auto it = m.find(label);
        return it == m.end() ? Complex(0.0, 0.0) : it->second;
    }

    static double norm2(const CoeffMap& m) {
        double s = 0.0;
        for (const auto& [label, c] : m) s += std::norm(c);
        return s;
    }

    CoeffMap u_;
    CoeffMap v_;
    Complex d_{0.0, 0.0};
};

inline AffineMode adjoint(const AffineMode& x) { return x.adjoint(); }

inline AffineMode linear_combine(const std::vector<std::pair<Complex, AffineMode>>& terms) {
    AffineMode acc;
    for (const auto& [w, x] : terms) acc = acc + w * x;
    return acc;
}

// [x, y^dag] = sum_m u_x conj(u_y) - sum_m v_x conj(v_y).
inline Complex commutator_pair(const AffineMode& x, const AffineMode& y) {
    Complex acc(0.0, 0.0);
    for (const auto& [label, ux] : x.u()) acc += ux * std::conj(y.u_coeff(label));
    for (const auto& [label, vx] : x.v()) acc -= vx * std::conj(y.v_coeff(label));
    return acc;
}

namespace detail {
inline void require_in_sector(const AffineMode& x, const SidebandSector& sector,
                              const char* where) {
    if (!x.references_only(sector)) {
        throw std::invalid_argument(std::string(where) + ": operand references modes outside the sector");
    }
}
}  // namespace detail

// Amplitude/phase quadratures of a sideband pair:
//   b1 = (b+ + b-^dag)/sqrt(2),   b2 = (b+ - b-^dag)/(sqrt(2) i).
inline std::pair<AffineMode, AffineMode> to_quadratures(const AffineMode& b_plus,
                                                        const AffineMode& b_minus) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const Complex inv_sqrt2_i = Complex(0.0, -1.0) * inv_sqrt2;  // 1/(sqrt(2) i)
    AffineMode bm_dag = b_minus.adjoint();
    AffineMode b1 = Complex(inv_sqrt2, 0.0) * (b_plus + bm_dag);
    AffineMode b2 = inv_sqrt2_i * (b_plus - bm_dag);
    return {b1, b2};
}

inline std::pair<AffineMode, AffineMode> to_quadratures(const AffineMode& b_plus,
                                                        const AffineMode& b_minus,
                                                        const SidebandSector& sector) {
    detail::require_in_sector(b_plus, sector, "to_quadratures");
    detail::require_in_sector(b_minus, sector, "to_quadratures");
    return to_quadratures(b_plus, b_minus);
}

// Inverse map:  b+ = (b1 + i b2)/sqrt(2),   b- = (b1^dag + i b2^dag)/sqrt(2).
inline std::pair<AffineMode, AffineMode> from_quadratures(const AffineMode& b1,
                                                          const AffineMode& b2) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const Complex i(0.0, 1.0);
    AffineMode b_plus = Complex(inv_sqrt2, 0.0) * (b1 + i * b2);
    AffineMode b_minus = Complex(inv_sqrt2, 0.0) * (b1.adjoint() + i * b2.adjoint());
    return {b_plus, b_minus};
}

inline std::pair<AffineMode, AffineMode> from_quadratures(const AffineMode& b1,
                                                          const AffineMode& b2,
                                                          const SidebandSector& sector) {
    detail::require_in_sector(b1, sector, "from_quadratures");
    detail::require_in_sector(b2, sector, "from_quadratures");
    return from_quadratures(b1, b2);
}

}  // namespace homodyne
