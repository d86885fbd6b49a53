// fock_oracle.hpp — brute-force verifier on truncated Fock spaces.
//
// Operators are applied matrix-free to state vectors (per-mode ladder action
// on the tensor index), so expectations and symmetrized correlators stay
// cheap even at cutoff^4 dimensions.  Dense matrices are available for small
// spaces where explicit Hermiticity checks are wanted.  Observables spanning
// several independent sectors are evaluated per sector factor and recombined
// through the product-state structure.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "homodyne/modes.hpp"
#include "homodyne/moments.hpp"
#include "homodyne/states.hpp"

namespace homodyne {

struct FockConfig {
    int cutoff = 14;
    std::vector<std::string> modes;
    double min_truncated_norm = 1.0 - 1e-8;
    std::size_t max_dimension = 1000000;
};

// One truncated product space with its prepared state vector.
class FockSpace {
  public:
    FockSpace(const FockConfig& cfg, const InputStateSpec& state) : cfg_(cfg) {
        if (cfg.cutoff < 2) throw std::invalid_argument("FockSpace: cutoff must be >= 2");
        if (cfg.modes.empty()) throw std::invalid_argument("FockSpace: no modes");
        dim_ = 1;
        for (std::size_t k = 0; k < cfg.modes.size(); ++k) {
            if (dim_ > cfg.max_dimension / static_cast<std::size_t>(cfg.cutoff)) {
                throw std::runtime_error("FockSpace: dimension guard exceeded");
            }
            dim_ *= static_cast<std::size_t>(cfg.cutoff);
        }
        strides_.resize(cfg.modes.size());
        std::size_t s = dim_;
        for (std::size_t k = 0; k < cfg.modes.size(); ++k) {
            s /= static_cast<std::size_t>(cfg.cutoff);
            strides_[k] = s;
            mode_index_[cfg.modes[k]] = k;
        }
        psi_ = build_product_state(state);
    }

    std::size_t dimension() const { return dim_; }
    const Eigen::VectorXcd& state() const { return psi_; }
    const FockConfig& config() const { return cfg_; }

    bool covers(const std::string& label) const { return mode_index_.count(label) != 0; }

    Eigen::VectorXcd apply(const AffineMode& x, const Eigen::VectorXcd& psi) const {
        Eigen::VectorXcd out = x.displacement() * psi;
        for (const auto& [label, u] : x.u()) accumulate_annihilation(label, u, psi, out);
        for (const auto& [label, v] : x.v()) accumulate_creation(label, v, psi, out);
        return out;
    }

    Eigen::VectorXcd apply(const QuadObservable& q, const Eigen::VectorXcd& psi) const {
        Eigen::VectorXcd out = q.scalar() * psi;
        for (const auto& t : q.terms()) {
            out += t.weight * apply(t.mode.adjoint(), apply(t.mode, psi));
        }
        return out;
    }

    Complex expect(const QuadObservable& q) const { return psi_.dot(apply(q, psi_)); }

    Complex mean_field(const AffineMode& x) const { return psi_.dot(apply(x, psi_)); }

    // <(q qp^dag + qp^dag q)/2>
    Complex symmetrized(const QuadObservable& q, const QuadObservable& qp) const {
        const Eigen::VectorXcd q_dag_psi = apply(q.adjoint(), psi_);
        const Eigen::VectorXcd qp_dag_psi = apply(qp.adjoint(), psi_);
        const Eigen::VectorXcd q_psi = apply(q, psi_);
        const Eigen::VectorXcd qp_psi = apply(qp, psi_);
        const Complex first = q_dag_psi.dot(qp_dag_psi);  // <q qp^dag>
        const Complex second = qp_psi.dot(q_psi);         // <qp^dag q>
        return 0.5 * (first + second);
    }

    Complex field_symmetrized(const AffineMode& x, const AffineMode& y) const {
        const Eigen::VectorXcd x_dag_psi = apply(x.adjoint(), psi_);
        const Eigen::VectorXcd y_dag_psi = apply(y.adjoint(), psi_);
        const Eigen::VectorXcd x_psi = apply(x, psi_);
        const Eigen::VectorXcd y_psi = apply(y, psi_);
        return 0.5 * (x_dag_psi.dot(y_dag_psi) + y_psi.dot(x_psi));
    }

    Eigen::MatrixXcd dense_matrix(const QuadObservable& q) const {
        require_dense_ok();
        Eigen::MatrixXcd m(dim_, dim_);
        Eigen::VectorXcd basis = Eigen::VectorXcd::Zero(dim_);
        for (std::size_t j = 0; j < dim_; ++j) {
            basis.setZero();
            basis[static_cast<Eigen::Index>(j)] = 1.0;
            m.col(static_cast<Eigen::Index>(j)) = apply(q, basis);
        }
        return m;
    }

    Eigen::MatrixXcd dense_matrix(const AffineMode& x) const {
        require_dense_ok();
        Eigen::MatrixXcd m(dim_, dim_);
        Eigen::VectorXcd basis = Eigen::VectorXcd::Zero(dim_);
        for (std::size_t j = 0; j < dim_; ++j) {
            basis.setZero();
            basis[static_cast<Eigen::Index>(j)] = 1.0;
            m.col(static_cast<Eigen::Index>(j)) = apply(x, basis);
        }
        return m;
    }

  private:
    void require_dense_ok() const {
        if (dim_ > 4096) throw std::runtime_error("FockSpace: dense matrix too large");
    }

    std::size_t mode_slot(const std::string& label) const {
        auto it = mode_index_.find(label);
        if (it == mode_index_.end()) {
            throw std::invalid_argument("FockSpace: operator references mode '" + label +
                                        "' outside this space");
        }
        return it->second;
    }

    void accumulate_annihilation(const std::string& label, Complex coeff,
                                 const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const {
        const std::size_t stride = strides_[mode_slot(label)];
        const std::size_t n_levels = static_cast<std::size_t>(cfg_.cutoff);
        for (std::size_t idx = 0; idx < dim_; ++idx) {
            const std::size_t n = (idx / stride) % n_levels;
            if (n + 1 < n_levels) {
                out[static_cast<Eigen::Index>(idx)] +=
                    coeff * std::sqrt(static_cast<double>(n + 1)) *
                    psi[static_cast<Eigen::Index>(idx + stride)];
            }
        }
    }

    void accumulate_creation(const std::string& label, Complex coeff,
                             const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const {
        const std::size_t stride = strides_[mode_slot(label)];
        const std::size_t n_levels = static_cast<std::size_t>(cfg_.cutoff);
        for (std::size_t idx = 0; idx < dim_; ++idx) {
            const std::size_t n = (idx / stride) % n_levels;
            if (n >= 1) {
                out[static_cast<Eigen::Index>(idx)] +=
                    coeff * std::sqrt(static_cast<double>(n)) *
                    psi[static_cast<Eigen::Index>(idx - stride)];
            }
        }
    }

    Eigen::VectorXcd build_product_state(const InputStateSpec& state) const {
        const std::size_t n_levels = static_cast<std::size_t>(cfg_.cutoff);
        std::vector<Eigen::VectorXcd> factors;
        factors.reserve(cfg_.modes.size());
        for (const auto& label : cfg_.modes) {
            Eigen::VectorXcd f = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n_levels));
            const Complex gamma = state.amplitude(label);
            if (gamma == Complex(0.0, 0.0)) {
                f[0] = 1.0;
            } else {
                Complex c(1.0, 0.0);  // gamma^n / sqrt(n!)
                double norm2 = 0.0;
                for (std::size_t n = 0; n < n_levels; ++n) {
                    if (n > 0) c *= gamma / std::sqrt(static_cast<double>(n));
                    f[static_cast<Eigen::Index>(n)] = c;
                    norm2 += std::norm(c);
                }
                const double full = std::exp(std::norm(gamma));
                if (norm2 / full < cfg_.min_truncated_norm) {
                    throw std::runtime_error("FockSpace: coherent amplitude too large for cutoff (mode '" +
                                             label + "')");
                }
                f /= std::sqrt(norm2);
            }
            factors.push_back(std::move(f));
        }
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim_));
        for (std::size_t idx = 0; idx < dim_; ++idx) {
            Complex amp(1.0, 0.0);
            for (std::size_t k = 0; k < cfg_.modes.size(); ++k) {
                const std::size_t n = (idx / strides_[k]) % n_levels;
                amp *= factors[k][static_cast<Eigen::Index>(n)];
            }
            psi[static_cast<Eigen::Index>(idx)] = amp;
        }
        return psi;
    }

    FockConfig cfg_;
    std::size_t dim_ = 0;
    std::vector<std::size_t> strides_;
    std::map<std::string, std::size_t> mode_index_;
    Eigen::VectorXcd psi_;
};

// Product of independent FockSpaces; evaluates observables whose terms each
// fall inside one factor.
class FockOracle {
  public:
    FockOracle(const std::vector<FockConfig>& groups, const InputStateSpec& state) {
        spaces_.reserve(groups.size());
        for (const auto& g : groups) spaces_.emplace_back(g, state);
    }

    Complex expect(const QuadObservable& q) const {
        Complex acc = q.scalar() + constant_terms(q);
        for (const auto& part : split(q)) acc += spaces_[part.group].expect(part.observable);
        return acc;
    }

    // <(q qp^dag + qp^dag q)/2> across the product structure.
    Complex symmetrized(const QuadObservable& q, const QuadObservable& qp) const {
        const auto parts_q = split(q);
        const auto parts_qp = split(qp);
        const Complex eq = expect(q);
        const Complex eqp = expect(qp);
        Complex acc = eq * std::conj(eqp);
        for (std::size_t g = 0; g < spaces_.size(); ++g) {
            const QuadObservable* a = find_group(parts_q, g);
            const QuadObservable* b = find_group(parts_qp, g);
            if (a == nullptr || b == nullptr) continue;
            const Complex ea = spaces_[g].expect(*a);
            const Complex eb = spaces_[g].expect(*b);
            acc += spaces_[g].symmetrized(*a, *b) - ea * std::conj(eb);
        }
        return acc;
    }

    const FockSpace& space(std::size_t g) const { return spaces_.at(g); }

  private:
    struct GroupPart {
        std::size_t group;
        QuadObservable observable;
    };

    static const QuadObservable* find_group(const std::vector<GroupPart>& parts, std::size_t g) {
        for (const auto& p : parts) {
            if (p.group == g) return &p.observable;
        }
        return nullptr;
    }

    static Complex constant_terms(const QuadObservable& q) {
        Complex acc(0.0, 0.0);
        for (const auto& t : q.terms()) {
            if (t.mode.mode_labels().empty()) acc += t.weight * std::norm(t.mode.displacement());
        }
        return acc;
    }

    std::size_t group_of(const AffineMode& x) const {
        const auto labels = x.mode_labels();
        if (labels.empty()) {
            throw std::invalid_argument("FockOracle: term without mode support");
        }
        for (std::size_t g = 0; g < spaces_.size(); ++g) {
            if (spaces_[g].covers(labels.front())) {
                for (const auto& label : labels) {
                    if (!spaces_[g].covers(label)) {
                        throw std::invalid_argument(
                            "FockOracle: term straddles independent mode groups");
                    }
                }
                return g;
            }
        }
        throw std::invalid_argument("FockOracle: mode '" + labels.front() + "' not covered");
    }

    std::vector<GroupPart> split(const QuadObservable& q) const {
        std::vector<GroupPart> parts;
        for (const auto& t : q.terms()) {
            if (t.mode.mode_labels().empty()) continue;  // pure displacement, handled as scalar
            const std::size_t g = group_of(t.mode);
            QuadObservable* slot = nullptr;
            for (auto& p : parts) {
                if (p.group == g) slot = &p.observable;
            }
            if (slot == nullptr) {
                parts.push_back({g, QuadObservable{}});
                slot = &parts.back().observable;
            }
            slot->add_term(t.weight, t.mode);
        }
        return parts;
    }

    std::vector<FockSpace> spaces_;
};

inline Complex oracle_expect(const QuadObservable& q, const InputStateSpec& state,
                             const FockConfig& cfg) {
    return FockSpace(cfg, state).expect(q);
}

inline Complex oracle_symmetrized(const QuadObservable& q, const QuadObservable& qp,
                                  const InputStateSpec& state, const FockConfig& cfg) {
    return FockSpace(cfg, state).symmetrized(q, qp);
}

}  // namespace homodyne
