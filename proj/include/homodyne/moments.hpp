// moments.hpp — exact Gaussian moments of detector observables under product
// coherent/vacuum states.
//
// A QuadObservable is Q = sum_k w_k x_k^dag x_k + c with AffineModes x_k.
// Writing each mode as its mean plus vacuum fluctuation, Q splits into a
// scalar, a part linear in fluctuations and a normal-ordered quadratic part;
// vacuum Wick contractions of those give every first and second moment in
// closed form.  Spectral densities follow the convention
//
//     (1/2) S_Q(Omega) 2*pi*delta(Omega-Omega')
//         = <(Q^(n)(Omega) Q^(n)dag(Omega') + Q^(n)dag(Omega') Q^(n)(Omega))/2>,
//
// with the 2*pi*delta divided out per sector, so S_Q is twice the
// sector-diagonal coefficient of the symmetrized noise correlator.

#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "homodyne/modes.hpp"
#include "homodyne/states.hpp"

namespace homodyne {

struct WeightedNumberTerm {
    Complex weight;
    AffineMode mode;
};

// Weighted sum of photon numbers of affine modes plus a scalar.
class QuadObservable {
  public:
    QuadObservable() = default;
    explicit QuadObservable(Complex scalar) : scalar_(scalar) {}

    static QuadObservable photon_number(const AffineMode& x) {
        QuadObservable q;
        q.add_term(Complex(1.0, 0.0), x);
        return q;
    }

    QuadObservable& add_term(Complex weight, const AffineMode& mode) {
        if (std::abs(weight) >= kCoeffEpsilon && !mode.is_zero()) {
            terms_.push_back({weight, mode});
        }
        return *this;
    }

    QuadObservable& add_scalar(Complex c) {
        scalar_ += c;
        return *this;
    }

    const std::vector<WeightedNumberTerm>& terms() const { return terms_; }
    Complex scalar() const { return scalar_; }

    QuadObservable adjoint() const {
        QuadObservable q(std::conj(scalar_));
        for (const auto& t : terms_) q.add_term(std::conj(t.weight), t.mode);
        return q;
    }

    // Merge terms with structurally identical modes; drop vanished ones.
    QuadObservable normalized() const {
        QuadObservable out(scalar_);
        std::vector<WeightedNumberTerm> merged;
        merged.reserve(terms_.size());
        for (const auto& t : terms_) {
            bool found = false;
            for (auto& m : merged) {
                if (m.mode == t.mode) {
                    m.weight += t.weight;
                    found = true;
                    break;
                }
            }
            if (!found) merged.push_back(t);
        }
        for (const auto& m : merged) out.add_term(m.weight, m.mode);
        return out;
    }

    bool is_self_adjoint(double tol = 1e-12) const {
        if (std::abs(scalar_.imag()) > tol) return false;
        const QuadObservable merged = normalized();
        for (const auto& t : merged.terms()) {
            if (std::abs(t.weight.imag()) > tol) return false;
        }
        return true;
    }

    bool is_anti_self_adjoint(double tol = 1e-12) const {
        if (std::abs(scalar_.real()) > tol) return false;
        const QuadObservable merged = normalized();
        for (const auto& t : merged.terms()) {
            if (std::abs(t.weight.real()) > tol) return false;
        }
        return true;
    }

    std::vector<std::string> mode_labels() const {
        std::map<std::string, bool> seen;
        for (const auto& t : terms_) {
            for (const auto& label : t.mode.mode_labels()) seen[label] = true;
        }
        std::vector<std::string> out;
        for (const auto& [label, b] : seen) out.push_back(label);
        return out;
    }

    friend QuadObservable operator*(Complex w, const QuadObservable& q) {
        QuadObservable out(w * q.scalar_);
        for (const auto& t : q.terms_) out.add_term(w * t.weight, t.mode);
        return out;
    }

    friend QuadObservable operator+(const QuadObservable& a, const QuadObservable& b) {
        QuadObservable out(a.scalar_ + b.scalar_);
        for (const auto& t : a.terms_) out.add_term(t.weight, t.mode);
        for (const auto& t : b.terms_) out.add_term(t.weight, t.mode);
        return out;
    }

    friend QuadObservable operator-(const QuadObservable& a, const QuadObservable& b) {
        return a + Complex(-1.0, 0.0) * b;
    }

  private:
    std::vector<WeightedNumberTerm> terms_;
    Complex scalar_{0.0, 0.0};
};

// <x> = sum u_m mu_m + sum v_m conj(mu_m) + d.
inline Complex mean_field(const AffineMode& x, const InputStateSpec& state) {
    Complex acc = x.displacement();
    for (const auto& [label, u] : x.u()) acc += u * state.amplitude(label);
    for (const auto& [label, v] : x.v()) acc += v * std::conj(state.amplitude(label));
    return acc;
}

// <x^dag x> = |<x>|^2 + sum_m |v_m|^2.
inline Complex expect(const QuadObservable& q, const InputStateSpec& state) {
    Complex acc = q.scalar();
    for (const auto& t : q.terms()) {
        const Complex mean = mean_field(t.mode, state);
        acc += t.weight * (std::norm(mean) + t.mode.v_norm2());
    }
    return acc;
}

// Spectral density of the fluctuation of an affine field x:
// S_{x^(n)} = sum |u|^2 + sum |v|^2 under any product coherent/vacuum state.
inline double field_noise_psd(const AffineMode& x) { return x.u_norm2() + x.v_norm2(); }

struct SpectralResult {
    Complex expectation{0.0, 0.0};   // <Q>
    double psd = 0.0;                // Re of noise_part; for Qp == Q the imaginary part vanishes identically
    Complex product_part{0.0, 0.0};  // <Q> conj(<Qp>)
    Complex noise_part{0.0, 0.0};    // sector-diagonal coefficient of <(Q Qp^dag + Qp^dag Q)/2> - product_part
};

namespace detail {

// Fluctuation decomposition of Q: linear coefficients (P on delta, R on
// delta^dag) and normal-ordered quadratic coefficients (C on
// delta^dag delta^dag, D on delta delta).  The particle-conserving quadratic
// block does not contribute to vacuum second moments and is not stored.
struct FluctuationParts {
    std::map<std::string, Complex> P;                          // delta_m coefficient
    std::map<std::string, Complex> R;                          // delta_m^dag coefficient
    std::map<std::pair<std::string, std::string>, Complex> C;  // delta_m^dag delta_n^dag
    std::map<std::pair<std::string, std::string>, Complex> D;  // delta_m delta_n
};

inline FluctuationParts fluctuation_parts(const QuadObservable& q, const InputStateSpec& state) {
    FluctuationParts f;
    for (const auto& t : q.terms()) {
        const Complex w = t.weight;
        const Complex mean = mean_field(t.mode, state);
        const auto& u = t.mode.u();
        const auto& v = t.mode.v();
        for (const auto& [m, um] : u) {
            f.P[m] += w * std::conj(mean) * um;
            f.R[m] += w * mean * std::conj(um);
        }
        for (const auto& [m, vm] : v) {
            f.P[m] += w * mean * std::conj(vm);
            f.R[m] += w * std::conj(mean) * vm;
        }
        for (const auto& [m, um] : u) {
            for (const auto& [n, vn] : v) {
                f.C[{m, n}] += w * std::conj(um) * vn;  // conj(u_m) v_n
                f.D[{n, m}] += w * std::conj(vn) * um;  // conj(v_n) u_m
            }
        }
    }
    return f;
}

inline Complex map_get(const std::map<std::pair<std::string, std::string>, Complex>& m,
                       const std::string& a, const std::string& b) {
    auto it = m.find({a, b});
    return it == m.end() ? Complex(0.0, 0.0) : it->second;
}

}  // namespace detail

// Symmetrized correlator <(Q Qp^dag + Qp^dag Q)/2> decomposed into the
// expectation product and the sector-diagonal noise coefficient.  Observables
// at different sectors share no modes, so their psd comes out zero.
inline SpectralResult symmetrized_correlator(const QuadObservable& q, const QuadObservable& qp,
                                             const InputStateSpec& state) {
    SpectralResult res;
    res.expectation = expect(q, state);
    res.product_part = res.expectation * std::conj(expect(qp, state));

    const auto f = detail::fluctuation_parts(q, state);
    const auto g = detail::fluctuation_parts(qp, state);

    // Linear part: (1/2) sum_m (P conj(P') + R conj(R')).
    Complex acc(0.0, 0.0);
    for (const auto& [m, pm] : f.P) {
        auto it = g.P.find(m);
        if (it != g.P.end()) acc += 0.5 * pm * std::conj(it->second);
    }
    for (const auto& [m, rm] : f.R) {
        auto it = g.R.find(m);
        if (it != g.R.end()) acc += 0.5 * rm * std::conj(it->second);
    }
    // Quadratic part: (1/2) sum_mn D_mn (conj(D'_mn) + conj(D'_nm))
    //               + (1/2) sum_mn C_mn (conj(C'_mn) + conj(C'_nm)).
    for (const auto& [mn, dmn] : f.D) {
        acc += 0.5 * dmn *
               std::conj(detail::map_get(g.D, mn.first, mn.second) +
                         detail::map_get(g.D, mn.second, mn.first));
    }
    for (const auto& [mn, cmn] : f.C) {
        acc += 0.5 * cmn *
               std::conj(detail::map_get(g.C, mn.first, mn.second) +
                         detail::map_get(g.C, mn.second, mn.first));
    }
    res.noise_part = acc;
    res.psd = acc.real();
    return res;
}

// Noise spectral density S of Q^(n) = Q - <Q> in the convention of the header
// comment: twice the sector-diagonal symmetrized noise coefficient.
inline double noise_psd(const QuadObservable& q, const InputStateSpec& state) {
    return 2.0 * symmetrized_correlator(q, q, state).psd;
}

// Sector-checked variants: every mode of each observable must belong to its
// stated sector.
inline void require_in_sector(const QuadObservable& q, const SidebandSector& sector,
                              const char* where) {
    for (const auto& t : q.terms()) {
        if (!t.mode.references_only(sector)) {
            throw std::invalid_argument(std::string(where) +
                                        ": observable references modes outside its sector");
        }
    }
}

inline SpectralResult symmetrized_correlator(const QuadObservable& q, const SidebandSector& sector_q,
                                             const QuadObservable& qp,
                                             const SidebandSector& sector_qp,
                                             const InputStateSpec& state) {
    require_in_sector(q, sector_q, "symmetrized_correlator");
    require_in_sector(qp, sector_qp, "symmetrized_correlator");
    return symmetrized_correlator(q, qp, state);
}

inline double noise_psd(const QuadObservable& q, const InputStateSpec& state,
                        const SidebandSector& sector) {
    require_in_sector(q, sector, "noise_psd");
    return noise_psd(q, state);
}

}  // namespace homodyne
