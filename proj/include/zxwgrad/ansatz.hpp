#pragma once

// Benchmark ansatz families: hardware-efficient layered circuits and IQP
// circuits built from phase gadgets. Layers repeat with fresh parameters.

#include <stdexcept>
#include <string>

#include "zxwgrad/param.hpp"

namespace zxwgrad {

enum class Family {
    Sim1,
    Sim2,
    Sim9,
    Sim10,
    Sim11,
    Sim12,
    Sim15,
    IQP1,
    IQP2,
    IQP3,
    IQP4,
    Intro,
};

struct AnsatzSpec {
    Family family;
    int n = 0;
    int layers = 1;
};

inline std::string family_name(Family f) {
    switch (f) {
        case Family::Sim1: return "sim1";
        case Family::Sim2: return "sim2";
        case Family::Sim9: return "sim9";
        case Family::Sim10: return "sim10";
        case Family::Sim11: return "sim11";
        case Family::Sim12: return "sim12";
        case Family::Sim15: return "sim15";
        case Family::IQP1: return "iqp1";
        case Family::IQP2: return "iqp2";
        case Family::IQP3: return "iqp3";
        case Family::IQP4: return "iqp4";
        case Family::Intro: return "intro";
    }
    throw std::logic_error("family_name: bad enum");
}

inline Family family_from_name(const std::string& name) {
    std::string s;
    for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    for (Family f : {Family::Sim1, Family::Sim2, Family::Sim9, Family::Sim10, Family::Sim11,
                     Family::Sim12, Family::Sim15, Family::IQP1, Family::IQP2, Family::IQP3,
                     Family::IQP4, Family::Intro}) {
        if (family_name(f) == s) return f;
    }
    throw std::invalid_argument("unknown ansatz family: " + name);
}

inline int params_per_layer(Family f, int n) {
    switch (f) {
        case Family::Sim1:
        case Family::Sim2: return 2 * n;
        case Family::Sim9:
        case Family::Sim10:
        case Family::Sim15: return n;
        case Family::Sim11:
        case Family::Sim12: return 2 * n + (n > 2 ? 2 * (n - 2) : 0);
        case Family::IQP1: return 1;
        case Family::IQP2: return n / 2;
        case Family::IQP3: return 2 * n - 1;
        case Family::IQP4: return n - 1;
        case Family::Intro: return 2;
    }
    throw std::logic_error("params_per_layer: bad enum");
}

namespace ansatz_detail {

// One layer of alternating single-qubit rotation columns: RX then RZ on every
// qubit. Parameter ids run qubit-major: qubit q owns base+2q (RX) and
// base+2q+1 (RZ).
inline void sim1_layer(ParamCircuit& c, int n, int base) {
    for (int q = 0; q < n; ++q) c.gates.push_back(g_rx(q, {base + 2 * q, 1.0, 0.0}));
    for (int q = 0; q < n; ++q) c.gates.push_back(g_rz(q, {base + 2 * q + 1, 1.0, 0.0}));
}

// Brick layer shared by the two block-structured families: rotation columns on
// all wires, entanglers on pairs (0,1),(2,3),..., inner rotation columns on
// wires 1..n-2, entanglers on pairs (1,2),(3,4),.... Entanglers point upward
// (control below target), matching the chain convention used elsewhere.
inline void brick_layer(ParamCircuit& c, int n, int base, bool use_cz) {
    // Qubit-major parameter ids: edge wires own 2 rotations, inner wires 4.
    auto first_id = [&](int q) {
        int id = 0;
        for (int p = 0; p < q; ++p) id += (p >= 1 && p <= n - 2) ? 4 : 2;
        return base + id;
    };
    for (int q = 0; q < n; ++q) c.gates.push_back(g_ry(q, {first_id(q), 1.0, 0.0}));
    for (int q = 0; q < n; ++q) c.gates.push_back(g_rz(q, {first_id(q) + 1, 1.0, 0.0}));
    for (int q = 0; q + 1 < n; q += 2) {
        if (use_cz) c.gates.push_back(g_cz(q, q + 1));
        else c.gates.push_back(g_cnot(q + 1, q));
    }
    for (int q = 1; q <= n - 2; ++q) c.gates.push_back(g_ry(q, {first_id(q) + 2, 1.0, 0.0}));
    for (int q = 1; q <= n - 2; ++q) c.gates.push_back(g_rz(q, {first_id(q) + 3, 1.0, 0.0}));
    for (int q = 1; q + 1 < n; q += 2) {
        if (use_cz) c.gates.push_back(g_cz(q, q + 1));
        else c.gates.push_back(g_cnot(q + 1, q));
    }
}

inline void h_column(ParamCircuit& c, int n) {
    for (int q = 0; q < n; ++q) c.gates.push_back(g_h(q));
}

}  // namespace ansatz_detail

// The two-parameter warm-up circuit: a full-width X rotation followed by a
// full-width Z rotation on |0...0>.
inline ParamCircuit intro_circuit(int n) {
    if (n < 1) throw std::invalid_argument("intro_circuit: need at least one qubit");
    ParamCircuit c;
    c.qubits = n;
    c.n_params = 2;
    std::vector<int> all;
    for (int q = 0; q < n; ++q) all.push_back(q);
    c.gates.push_back(g_pauli_exp(all, std::string(n, 'X'), {0, 1.0, 0.0}));
    c.gates.push_back(g_pauli_exp(all, std::string(n, 'Z'), {1, 1.0, 0.0}));
    return c;
}

inline ParamCircuit build(const AnsatzSpec& spec) {
    using namespace ansatz_detail;
    const int n = spec.n, L = spec.layers;
    if (n < 1) throw std::invalid_argument("build: need at least one qubit");
    if (L < 1) throw std::invalid_argument("build: need at least one layer");
    if (spec.family == Family::IQP2 && n % 2 != 0)
        throw std::invalid_argument("build: iqp2 is only defined for an even number of qubits");
    if ((spec.family == Family::Sim10 || spec.family == Family::Sim15 ||
         spec.family == Family::IQP2 || spec.family == Family::IQP3 ||
         spec.family == Family::IQP4) &&
        n < 2)
        throw std::invalid_argument("build: family needs at least two qubits");
    if (spec.family == Family::Intro) {
        if (L != 1) throw std::invalid_argument("build: intro circuit has a single layer");
        return intro_circuit(n);
    }

    ParamCircuit c;
    c.qubits = n;
    const int ppl = params_per_layer(spec.family, n);
    c.n_params = ppl * L;
    for (int layer = 0; layer < L; ++layer) {
        const int base = layer * ppl;
        switch (spec.family) {
            case Family::Sim1:
                sim1_layer(c, n, base);
                break;
            case Family::Sim2:
                sim1_layer(c, n, base);
                for (int q = 0; q + 1 < n; ++q) c.gates.push_back(g_cnot(q + 1, q));
                break;
            case Family::Sim9:
                h_column(c, n);
                for (int q = 0; q + 1 < n; ++q) c.gates.push_back(g_cz(q, q + 1));
                for (int q = 0; q < n; ++q) c.gates.push_back(g_rx(q, {base + q, 1.0, 0.0}));
                break;
            case Family::Sim10:
                for (int q = 0; q < n; ++q) c.gates.push_back(g_ry(q, {base + q, 1.0, 0.0}));
                // Ring of CZ edges; on two qubits the ring degenerates to one edge.
                for (int q = 0; q + 1 < n; ++q) c.gates.push_back(g_cz(q, q + 1));
                if (n > 2) c.gates.push_back(g_cz(n - 1, 0));
                break;
            case Family::Sim11:
                brick_layer(c, n, base, false);
                break;
            case Family::Sim12:
                brick_layer(c, n, base, true);
                break;
            case Family::Sim15:
                for (int q = 0; q < n; ++q) c.gates.push_back(g_ry(q, {base + q, 1.0, 0.0}));
                for (int q = 0; q + 1 < n; ++q) c.gates.push_back(g_cnot(q + 1, q));
                if (n > 2) c.gates.push_back(g_cnot(0, n - 1));
                break;
            case Family::IQP1: {
                h_column(c, n);
                std::vector<int> all;
                for (int q = 0; q < n; ++q) all.push_back(q);
                c.gates.push_back(g_phase_gadget(all, {base, 1.0, 0.0}));
                break;
            }
            case Family::IQP2:
                h_column(c, n);
                for (int q = 0; q + 1 < n; q += 2)
                    c.gates.push_back(g_phase_gadget({q, q + 1}, {base + q / 2, 1.0, 0.0}));
                break;
            case Family::IQP3:
                h_column(c, n);
                for (int q = 0; q < n; ++q) {
                    c.gates.push_back(g_phase_gadget({q}, {base + 2 * q, 1.0, 0.0}));
                    if (q + 1 < n)
                        c.gates.push_back(g_phase_gadget({q, q + 1}, {base + 2 * q + 1, 1.0, 0.0}));
                }
                break;
            case Family::IQP4:
                h_column(c, n);
                // Each parameter drives one controlled-phase block: a single-wire
                // gadget at +theta and a two-wire gadget at -theta.
                for (int q = 0; q + 1 < n; ++q) {
                    c.gates.push_back(g_phase_gadget({q + 1}, {base + q, 1.0, 0.0}));
                    c.gates.push_back(g_phase_gadget({q, q + 1}, {base + q, -1.0, 0.0}));
                }
                break;
            default:
                throw std::logic_error("build: unhandled family");
        }
    }
    switch (spec.family) {
        case Family::IQP1:
        case Family::IQP2:
        case Family::IQP3:
        case Family::IQP4:
            h_column(c, n);
            break;
        default:
            break;
    }
    return c;
}

}  // namespace zxwgrad
