// network.hpp — beam-splitter / phase-rotator elements, the three canonical
// interferometer topologies, and Heisenberg-picture propagation of affine
// modes to the detector ports.
//
// Two beam-splitter sign conventions appear in the canonical networks:
//
//   mix    out1 = sqrt(eta) in1 + sqrt(1-eta) in2
//          out2 = sqrt(eta) in2 - sqrt(1-eta) in1     (homodyne mixers)
//
//   split  out1 = sqrt(eta) in1 - sqrt(1-eta) in2
//          out2 = sqrt(1-eta) in1 + sqrt(eta) in2     (signal/LO splitters)
//
// Both are unitary; they differ only in unobservable intermediate signs, but
// the canonical builders hard-code the placement used by their sources so the
// detector-port expressions can be compared coefficient-for-coefficient.

#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "homodyne/modes.hpp"

namespace homodyne {

enum class BsConvention { mix, split };

inline double require_eta(double eta) {
    if (!(eta > 0.0 && eta < 1.0)) {
        throw std::invalid_argument(
            "beam splitter: eta must lie strictly in (0,1); eta in {0,1} is meaningless as a "
            "balanced homodyne detection");
    }
    return eta;
}

inline std::pair<AffineMode, AffineMode> beam_splitter_map(double eta, const AffineMode& in1,
                                                           const AffineMode& in2,
                                                           BsConvention convention = BsConvention::mix) {
    require_eta(eta);
    const Complex t(std::sqrt(eta), 0.0);
    const Complex r(std::sqrt(1.0 - eta), 0.0);
    if (convention == BsConvention::mix) {
        return {t * in1 + r * in2, t * in2 - r * in1};
    }
    return {t * in1 - r * in2, r * in1 + t * in2};
}

// Heisenberg action of the rotation operator: u and d pick up e^{i phi},
// v picks up e^{-i phi}.
inline AffineMode phase_rotate(const AffineMode& x, double phi) {
    const Complex f = std::polar(1.0, phi);
    AffineMode::CoeffMap u = x.u(), v = x.v();
    for (auto& [label, c] : u) c *= f;
    for (auto& [label, c] : v) c *= std::conj(f);
    return AffineMode(std::move(u), std::move(v), f * x.displacement());
}

struct Element {
    enum class Kind { beam_splitter, phase_rotator };

    Kind kind = Kind::beam_splitter;
    std::string label;
    double eta = 0.5;                               // beam splitter only
    BsConvention convention = BsConvention::mix;    // beam splitter only
    double phi = 0.0;                               // phase rotator only
    std::vector<std::string> in;                    // wire names
    std::vector<std::string> out;                   // wire names
};

struct DetectorPort {
    std::string port;  // e.g. "D1"
    std::string wire;
};

struct SourcePort {
    std::string label;  // source mode / wire name, e.g. "b"
    SourceKind kind = SourceKind::aux_vacuum;
};

// Acyclic wired graph of elements between source wires and detector ports.
class NetworkTopology {
  public:
    std::string name;
    std::vector<SourcePort> sources;
    std::vector<Element> elements;
    std::vector<DetectorPort> detectors;

    void validate() const {
        std::set<std::string> wires;
        for (const auto& s : sources) {
            if (!wires.insert(s.label).second) {
                throw std::invalid_argument("network: duplicate source '" + s.label + "'");
            }
        }
        std::set<std::string> consumed;
        for (const auto& e : elements) {
            const std::size_t n_in = e.kind == Element::Kind::beam_splitter ? 2 : 1;
            if (e.in.size() != n_in || e.out.size() != n_in) {
                throw std::invalid_argument("network: element '" + e.label + "' has wrong port count");
            }
            if (e.kind == Element::Kind::beam_splitter) require_eta(e.eta);
            for (const auto& o : e.out) {
                if (!wires.insert(o).second) {
                    throw std::invalid_argument("network: wire '" + o + "' produced twice");
                }
            }
        }
        // Each element input must be an already-declared wire, used at most once.
        for (const auto& e : elements) {
            for (const auto& i : e.in) {
                if (wires.find(i) == wires.end()) {
                    throw std::invalid_argument("network: element '" + e.label + "' input wire '" + i +
                                                "' is not produced anywhere");
                }
                if (!consumed.insert(i).second) {
                    throw std::invalid_argument("network: wire '" + i + "' consumed twice");
                }
            }
        }
        for (const auto& d : detectors) {
            if (wires.find(d.wire) == wires.end()) {
                throw std::invalid_argument("network: detector '" + d.port + "' wire '" + d.wire +
                                            "' is not produced anywhere");
            }
        }
        // Acyclicity + reachability fall out of propagation; run it on dummies.
        std::map<std::string, AffineMode> inputs;
        for (const auto& s : sources) inputs[s.label] = AffineMode::annihilator(s.label);
        (void)propagate_impl(inputs);
    }

    // Propagate explicit source AffineModes (keyed by source label) to the
    // detector ports.
    std::map<std::string, AffineMode> propagate(const std::map<std::string, AffineMode>& inputs) const {
        for (const auto& s : sources) {
            if (inputs.find(s.label) == inputs.end()) {
                throw std::invalid_argument("network: source '" + s.label + "' not supplied");
            }
        }
        return propagate_impl(inputs);
    }

    const Element& element(const std::string& label) const {
        for (const auto& e : elements) {
            if (e.label == label) return e;
        }
        throw std::invalid_argument("network: no element labeled '" + label + "'");
    }

  private:
    std::map<std::string, AffineMode> propagate_impl(
        const std::map<std::string, AffineMode>& inputs) const {
        std::map<std::string, AffineMode> wires = inputs;
        std::vector<bool> done(elements.size(), false);
        std::size_t remaining = elements.size();
        while (remaining > 0) {
            bool progressed = false;
            for (std::size_t k = 0; k < elements.size(); ++k) {
                if (done[k]) continue;
                const Element& e = elements[k];
                bool ready = true;
                for (const auto& i : e.in) {
                    if (wires.find(i) == wires.end()) ready = false;
                }
                if (!ready) continue;
                if (e.kind == Element::Kind::beam_splitter) {
                    auto [o1, o2] = beam_splitter_map(e.eta, wires.at(e.in[0]), wires.at(e.in[1]),
                                                      e.convention);
                    wires[e.out[0]] = o1;
                    wires[e.out[1]] = o2;
                } else {
                    wires[e.out[0]] = phase_rotate(wires.at(e.in[0]), e.phi);
                }
                done[k] = true;
                --remaining;
                progressed = true;
            }
            if (!progressed) {
                throw std::invalid_argument("network: unwired input or cycle detected");
            }
        }
        std::map<std::string, AffineMode> ports;
        for (const auto& d : detectors) {
            auto it = wires.find(d.wire);
            if (it == wires.end()) {
                throw std::invalid_argument("network: detector wire '" + d.wire + "' unresolved");
            }
            ports[d.port] = it->second;
        }
        return ports;
    }
};

// --------------------------- canonical networks -----------------------------

// Single mixing beam splitter, photodetector on the transmitted port.
inline NetworkTopology build_simple_homodyne(double eta = 0.5) {
    require_eta(eta);
    NetworkTopology net;
    net.name = "simple";
    net.sources = {{"b", SourceKind::main_input}, {"l_i", SourceKind::lo}};
    net.elements = {{Element::Kind::beam_splitter, "BS", eta, BsConvention::mix, 0.0,
                     {"b", "l_i"}, {"c_o", "d_o"}}};
    net.detectors = {{"PD", "c_o"}};
    net.validate();
    return net;
}

// Both beam-splitter outputs detected.
inline NetworkTopology build_balanced_homodyne(double eta = 0.5) {
    require_eta(eta);
    NetworkTopology net;
    net.name = "balanced";
    net.sources = {{"b", SourceKind::main_input}, {"l_i", SourceKind::lo}};
    net.elements = {{Element::Kind::beam_splitter, "BS", eta, BsConvention::mix, 0.0,
                     {"b", "l_i"}, {"c_o", "d_o"}}};
    net.detectors = {{"D1", "c_o"}, {"D2", "d_o"}};
    net.validate();
    return net;
}

// Eight-port double balanced homodyne: BS1 splits the signal (vacuum e_i at
// the dark port), BS3 splits the local oscillator (vacuum f_i), a pi/2 phase
// rotator acts on the BS3->BS4 path, and BS2/BS4 feed detectors D1/D2 and
// D3/D4.  BS2 and BS4 share one transmittance eta unless eta4 is given.
inline NetworkTopology build_eight_port(double eta = 0.5, double eta4 = -1.0) {
    require_eta(eta);
    if (eta4 < 0.0) eta4 = eta;
    require_eta(eta4);
    NetworkTopology net;
    net.name = "eight-port";
    net.sources = {{"b", SourceKind::main_input},
                   {"e_i", SourceKind::aux_vacuum},
                   {"l_i", SourceKind::lo},
                   {"f_i", SourceKind::aux_vacuum}};
    net.elements = {
        {Element::Kind::beam_splitter, "BS1", 0.5, BsConvention::split, 0.0, {"b", "e_i"}, {"b_1", "b_2"}},
        {Element::Kind::beam_splitter, "BS3", 0.5, BsConvention::split, 0.0, {"l_i", "f_i"}, {"l_0", "l_1"}},
        {Element::Kind::phase_rotator, "PR", 0.5, BsConvention::mix, M_PI / 2.0, {"l_1"}, {"l_q"}},
        {Element::Kind::beam_splitter, "BS2", eta, BsConvention::mix, 0.0, {"b_1", "l_0"}, {"c_1o", "d_1o"}},
        {Element::Kind::beam_splitter, "BS4", eta4, BsConvention::mix, 0.0, {"b_2", "l_q"}, {"d_2o", "c_2o"}},
    };
    net.detectors = {{"D1", "c_1o"}, {"D2", "d_1o"}, {"D3", "c_2o"}, {"D4", "d_2o"}};
    net.validate();
    return net;
}

inline NetworkTopology build_network(const std::string& name, double eta = 0.5) {
    if (name == "simple") return build_simple_homodyne(eta);
    if (name == "balanced") return build_balanced_homodyne(eta);
    if (name == "eight-port") return build_eight_port(eta);
    throw std::invalid_argument("build_network: unknown network '" + name + "'");
}

// Propagate the network with each source fed by its pure mode; source label
// doubles as the mode label.
inline std::map<std::string, AffineMode> propagate_pure(const NetworkTopology& net) {
    std::map<std::string, AffineMode> inputs;
    for (const auto& s : net.sources) inputs[s.label] = AffineMode::annihilator(s.label);
    return net.propagate(inputs);
}

// Sideband-resolved propagation: sources are registered in the sector under
// suffixed labels ("b+"/"b-" etc.) and fed as pure modes of that sideband.
inline std::map<std::string, AffineMode> propagate_pure(const NetworkTopology& net,
                                                        SidebandSector& sector, Sideband sb) {
    const char* suffix = sb == Sideband::upper ? "+" : "-";
    std::map<std::string, AffineMode> inputs;
    for (const auto& s : net.sources) {
        const std::string label = s.label + suffix;
        if (!sector.contains(label)) sector.add_mode(label, sb, s.kind);
        inputs[s.label] = AffineMode::annihilator(label);
    }
    return net.propagate(inputs);
}

// Main-interferometer input expressed over the four detector-side
// back-propagating vacuum modes (labels c_1i, d_1i, c_2i, d_2i).  Valid for
// the eight-port topology only.
inline AffineMode input_mode_decomposition(const NetworkTopology& net) {
    if (net.detectors.size() != 4) {
        throw std::invalid_argument("input_mode_decomposition: topology lacks back-propagation ports");
    }
    const double eta2 = net.element("BS2").eta;
    const double eta4 = net.element("BS4").eta;
    const double s2 = 1.0 / std::sqrt(2.0);
    // a_(1) = sqrt(eta) c_1i - sqrt(1-eta) d_1i,  a_(2) = sqrt(eta) d_2i - sqrt(1-eta) c_2i,
    // a = (a_(1) + a_(2))/sqrt(2).
    AffineMode a1 = Complex(std::sqrt(eta2), 0.0) * AffineMode::annihilator("c_1i") -
                    Complex(std::sqrt(1.0 - eta2), 0.0) * AffineMode::annihilator("d_1i");
    AffineMode a2 = Complex(std::sqrt(eta4), 0.0) * AffineMode::annihilator("d_2i") -
                    Complex(std::sqrt(1.0 - eta4), 0.0) * AffineMode::annihilator("c_2i");
    return Complex(s2, 0.0) * (a1 + a2);
}

// ------------------------------- JSON form ----------------------------------

inline const char* to_string(BsConvention c) { return c == BsConvention::mix ? "mix" : "split"; }

inline BsConvention bs_convention_from_string(const std::string& s) {
    if (s == "mix") return BsConvention::mix;
    if (s == "split") return BsConvention::split;
    throw std::invalid_argument("unknown beam-splitter convention '" + s + "'");
}

inline const char* to_string(SourceKind k) {
    switch (k) {
        case SourceKind::main_input: return "main_input";
        case SourceKind::lo: return "lo";
        case SourceKind::aux_vacuum: return "aux_vacuum";
    }
    return "aux_vacuum";
}

inline SourceKind source_kind_from_string(const std::string& s) {
    if (s == "main_input") return SourceKind::main_input;
    if (s == "lo") return SourceKind::lo;
    if (s == "aux_vacuum") return SourceKind::aux_vacuum;
    throw std::invalid_argument("unknown source kind '" + s + "'");
}

inline nlohmann::json to_json(const NetworkTopology& net) {
    nlohmann::json j;
    j["name"] = net.name;
    j["sources"] = nlohmann::json::array();
    for (const auto& s : net.sources) {
        j["sources"].push_back({{"label", s.label}, {"kind", to_string(s.kind)}});
    }
    j["elements"] = nlohmann::json::array();
    for (const auto& e : net.elements) {
        nlohmann::json je;
        je["label"] = e.label;
        je["in"] = e.in;
        je["out"] = e.out;
        if (e.kind == Element::Kind::beam_splitter) {
            je["kind"] = "beam_splitter";
            je["eta"] = e.eta;
            je["convention"] = to_string(e.convention);
        } else {
            je["kind"] = "phase_rotator";
            je["phi"] = e.phi;
        }
        j["elements"].push_back(je);
    }
    j["detectors"] = nlohmann::json::array();
    for (const auto& d : net.detectors) {
        j["detectors"].push_back({{"port", d.port}, {"wire", d.wire}});
    }
    return j;
}

inline NetworkTopology network_from_json(const nlohmann::json& j) {
    NetworkTopology net;
    net.name = j.value("name", "");
    for (const auto& js : j.at("sources")) {
        net.sources.push_back({js.at("label").get<std::string>(),
                               source_kind_from_string(js.value("kind", "aux_vacuum"))});
    }
    for (const auto& je : j.at("elements")) {
        Element e;
        e.label = je.value("label", "");
        e.in = je.at("in").get<std::vector<std::string>>();
        e.out = je.at("out").get<std::vector<std::string>>();
        const std::string kind = je.at("kind").get<std::string>();
        if (kind == "beam_splitter") {
            e.kind = Element::Kind::beam_splitter;
            e.eta = je.at("eta").get<double>();
            e.convention = bs_convention_from_string(je.value("convention", "mix"));
        } else if (kind == "phase_rotator") {
            e.kind = Element::Kind::phase_rotator;
            e.phi = je.at("phi").get<double>();
        } else {
            throw std::invalid_argument("network_from_json: unknown element kind '" + kind + "'");
        }
        net.elements.push_back(e);
    }
    for (const auto& jd : j.at("detectors")) {
        net.detectors.push_back({jd.at("port").get<std::string>(), jd.at("wire").get<std::string>()});
    }
    net.validate();
    return net;
}

}  // namespace homodyne
