#pragma once

// JSON circuit description used by the command line tool:
//   {"qubits": 2, "params": 1,
//    "gates": [{"name": "h", "targets": [0]},
//              {"name": "rz", "targets": [1],
//               "bind": {"param": 0, "mult": 1.0, "offset": 0.0}}]}
// pauli_exp gates carry an extra "paulis" string. Custom-generator gates have
// no serialised form.

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include <zxwgrad/param.hpp>

namespace zxwgrad {

inline const char* gate_name(GateKind k) {
    switch (k) {
        case GateKind::RZ: return "rz";
        case GateKind::RX: return "rx";
        case GateKind::RY: return "ry";
        case GateKind::H: return "h";
        case GateKind::CNOT: return "cnot";
        case GateKind::CZ: return "cz";
        case GateKind::SwapGate: return "swap";
        case GateKind::CRZ: return "crz";
        case GateKind::CU1: return "cu1";
        case GateKind::PauliExp: return "pauli_exp";
        case GateKind::PhaseGadget: return "phase_gadget";
        case GateKind::Custom: break;
    }
    throw std::invalid_argument("circuit json: custom gates cannot be serialised");
}

inline GateKind gate_kind_from_name(const std::string& name) {
    if (name == "rz") return GateKind::RZ;
    if (name == "rx") return GateKind::RX;
    if (name == "ry") return GateKind::RY;
    if (name == "h") return GateKind::H;
    if (name == "cnot") return GateKind::CNOT;
    if (name == "cz") return GateKind::CZ;
    if (name == "swap") return GateKind::SwapGate;
    if (name == "crz") return GateKind::CRZ;
    if (name == "cu1") return GateKind::CU1;
    if (name == "pauli_exp") return GateKind::PauliExp;
    if (name == "phase_gadget") return GateKind::PhaseGadget;
    throw std::invalid_argument("circuit json: unknown gate name '" + name + "'");
}

inline bool gate_takes_bind(GateKind k) {
    switch (k) {
        case GateKind::RZ:
        case GateKind::RX:
        case GateKind::RY:
        case GateKind::CRZ:
        case GateKind::CU1:
        case GateKind::PauliExp:
        case GateKind::PhaseGadget:
            return true;
        default:
            return false;
    }
}

inline int gate_arity(GateKind k) {
    switch (k) {
        case GateKind::RZ:
        case GateKind::RX:
        case GateKind::RY:
        case GateKind::H:
            return 1;
        case GateKind::CNOT:
        case GateKind::CZ:
        case GateKind::SwapGate:
        case GateKind::CRZ:
        case GateKind::CU1:
            return 2;
        default:
            return -1;  // variable width
    }
}

inline nlohmann::ordered_json circuit_to_json(const ParamCircuit& c) {
    nlohmann::ordered_json j;
    j["qubits"] = c.qubits;
    j["params"] = c.n_params;
    j["gates"] = nlohmann::ordered_json::array();
    for (const Gate& g : c.gates) {
        nlohmann::ordered_json jg;
        jg["name"] = gate_name(g.kind);
        jg["targets"] = g.targets;
        if (g.kind == GateKind::PauliExp) jg["paulis"] = g.paulis;
        if (gate_takes_bind(g.kind)) {
            jg["bind"] = {{"param", g.bind.param},
                          {"mult", g.bind.mult},
                          {"offset", g.bind.offset}};
        }
        j["gates"].push_back(std::move(jg));
    }
    return j;
}

inline ParamCircuit circuit_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("qubits") || !j.contains("params") || !j.contains("gates"))
        throw std::invalid_argument("circuit json: need an object with qubits, params, gates");
    ParamCircuit c;
    c.qubits = j.at("qubits").get<int>();
    c.n_params = j.at("params").get<int>();
    if (c.qubits < 1) throw std::invalid_argument("circuit json: qubits must be positive");
    if (c.n_params < 0) throw std::invalid_argument("circuit json: params must be non-negative");
    if (!j.at("gates").is_array()) throw std::invalid_argument("circuit json: gates must be an array");

    for (const auto& jg : j.at("gates")) {
        Gate g;
        g.kind = gate_kind_from_name(jg.at("name").get<std::string>());
        g.targets = jg.at("targets").get<std::vector<int>>();
        for (int t : g.targets)
            if (t < 0 || t >= c.qubits)
                throw std::invalid_argument("circuit json: gate target out of range");
        for (size_t a = 0; a < g.targets.size(); ++a)
            for (size_t b = a + 1; b < g.targets.size(); ++b)
                if (g.targets[a] == g.targets[b])
                    throw std::invalid_argument("circuit json: repeated gate target");
        int arity = gate_arity(g.kind);
        if (arity > 0 && static_cast<int>(g.targets.size()) != arity)
            throw std::invalid_argument(std::string("circuit json: ") + gate_name(g.kind) +
                                        " takes " + std::to_string(arity) + " target(s)");
        if (g.targets.empty())
            throw std::invalid_argument("circuit json: gate needs at least one target");

        if (g.kind == GateKind::PauliExp) {
            g.paulis = jg.at("paulis").get<std::string>();
            if (g.paulis.size() != g.targets.size())
                throw std::invalid_argument("circuit json: paulis length must match targets");
            for (char p : g.paulis)
                if (p != 'I' && p != 'X' && p != 'Y' && p != 'Z')
                    throw std::invalid_argument("circuit json: bad Pauli letter");
        }

        if (jg.contains("bind")) {
            if (!gate_takes_bind(g.kind))
                throw std::invalid_argument(std::string("circuit json: ") + gate_name(g.kind) +
                                            " takes no bind");
            const auto& jb = jg.at("bind");
            g.bind.param = jb.value("param", -1);
            g.bind.mult = jb.value("mult", 1.0);
            g.bind.offset = jb.value("offset", 0.0);
            if (g.bind.param < -1 || g.bind.param >= c.n_params)
                throw std::invalid_argument("circuit json: bind.param out of range");
        }
        c.gates.push_back(std::move(g));
    }
    return c;
}

}  // namespace zxwgrad
