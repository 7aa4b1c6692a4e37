#pragma once

// Parametrised unitaries U(theta) = e^{i theta H}: eigenvalue decompositions,
// diagram representations with one spider per (non-zero) eigenvalue, named
// gates with affine parameter bindings, and derivative diagrams for doubled
// circuits. Global phases are never silently dropped: gate emitters carry them
// in the diagram scalar, so diagram and matrix forms agree entrywise.

#include <Eigen/Dense>

#include "diagram.hpp"
#include "hamiltonian.hpp"

namespace zxwgrad {

struct EigGroup {
    double value = 0.0;        // representative eigenvalue
    std::vector<int> indices;  // eigenbasis columns in this degeneracy group
};

struct HermitianGenerator {
    int qubits = 0;
    Mat matrix;                     // H itself
    Mat basis;                      // V, columns are eigenvectors, ascending order
    std::vector<double> eigenvalues;  // per column, ascending
    std::vector<EigGroup> groups;     // degeneracy groups, ascending values
};

inline HermitianGenerator eig_decompose(const Mat& h, double degeneracy_tol = 1e-8) {
    if (h.rows != h.cols) throw std::invalid_argument("eig_decompose: square matrix required");
    if (max_abs_diff(h, h.dagger()) > 1e-10) throw std::invalid_argument("eig_decompose: matrix is not Hermitian");
    int dim = h.rows, q = 0;
    while ((1 << q) < dim) ++q;
    if ((1 << q) != dim) throw std::invalid_argument("eig_decompose: dimension must be a power of two");

    Eigen::MatrixXcd em(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) em(i, j) = h(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(em);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eig_decompose: solver failed");

    HermitianGenerator g;
    g.qubits = q;
    g.matrix = h;
    g.basis = Mat(dim, dim);
    g.eigenvalues.resize(dim);
    for (int i = 0; i < dim; ++i) {
        g.eigenvalues[i] = solver.eigenvalues()(i);  // ascending
        for (int r = 0; r < dim; ++r) g.basis(r, i) = solver.eigenvectors()(r, i);
    }
    for (int i = 0; i < dim; ++i) {
        if (g.groups.empty() || g.eigenvalues[i] - g.groups.back().value > degeneracy_tol)
            g.groups.push_back(EigGroup{g.eigenvalues[i], {}});
        g.groups.back().indices.push_back(i);
    }
    return g;
}

// V diag(e^{i theta lambda}) V^dagger.
inline Mat exp_unitary(const HermitianGenerator& g, double theta) {
    int dim = g.basis.rows;
    Mat d(dim, dim);
    for (int i = 0; i < dim; ++i) d(i, i) = std::exp(Cplx(0.0, theta * g.eigenvalues[i]));
    return g.basis * d * g.basis.dagger();
}

// ---------- parametrised diagrams ----------

// A diagram whose green-spider phases and scalar phase depend affinely on a
// parameter vector. Bound spiders keep phase 0 in `base`; at() installs
// mult*theta[param] + offset.
struct SpiderBind {
    int node = -1;
    int param = -1;
    double mult = 1.0;
    double offset = 0.0;
};

struct ScalarBind {
    int param = -1;
    double mult = 0.0;  // scalar *= e^{i mult theta[param]}; offsets live in base.scalar
};

struct ParamDiagram {
    Diagram base;
    std::vector<SpiderBind> spiders;
    std::vector<ScalarBind> scalars;
    int n_params = 0;

    Diagram at(const std::vector<double>& theta) const {
        if (static_cast<int>(theta.size()) != n_params)
            throw std::invalid_argument("ParamDiagram::at: parameter count mismatch");
        Diagram d = base;
        for (const auto& b : spiders) {
            Node& n = d.nodes[b.node];
            if (n.kind != Gen::GreenSpider) throw std::logic_error("spider binding on non-spider node");
            n.phase = b.mult * theta[b.param] + b.offset;
        }
        double acc = 0.0;
        for (const auto& s : scalars) acc += s.mult * theta[s.param];
        if (acc != 0.0) d.scalar *= std::exp(Cplx(0.0, acc));
        return d;
    }
};

// Doubled parametrised diagram: base tensored with its conjugate, conjugate
// copy bindings negated.
inline ParamDiagram double_param(const ParamDiagram& pd) {
    ParamDiagram out;
    out.base = double_diagram(pd.base);
    out.n_params = pd.n_params;
    const int shift = static_cast<int>(pd.base.nodes.size());
    out.spiders = pd.spiders;
    for (const auto& b : pd.spiders) out.spiders.push_back(SpiderBind{b.node + shift, b.param, -b.mult, -b.offset});
    out.scalars = pd.scalars;
    for (const auto& s : pd.scalars) out.scalars.push_back(ScalarBind{s.param, -s.mult});
    return out;
}

namespace param_detail {

// Diagonal-in-eigenbasis block: per wire a copy spider feeding one FunctionBox
// per listed group; each box output ends in a bound phase spider. `mults` and
// `offsets` give the spider bindings per group (already scaled by eigenvalues).
inline void emit_eig_core(ParamDiagram& pd, std::vector<int>& frontier, const std::vector<int>& wires,
                          const std::vector<std::vector<int>>& group_indices, int param,
                          const std::vector<double>& mults, const std::vector<double>& offsets) {
    Diagram& d = pd.base;
    const int q = static_cast<int>(wires.size());
    const int L = static_cast<int>(group_indices.size());
    if (L == 0) return;
    std::vector<std::vector<int>> feed(L);
    for (int j = 0; j < q; ++j) {
        int through = d.fresh_edge();
        std::vector<int> outs = {through};
        for (int l = 0; l < L; ++l) {
            int e = d.fresh_edge();
            outs.push_back(e);
            feed[l].push_back(e);
        }
        d.add_node(green_spider(1, 1 + L, 0.0), {frontier[wires[j]]}, outs);
        frontier[wires[j]] = through;
    }
    for (int l = 0; l < L; ++l) {
        std::vector<int> table(size_t(1) << q, 0);
        for (int idx : group_indices[l]) table[idx] = 1;
        int z = d.fresh_edge();
        d.add_node(function_box(q, 1, table), feed[l], {z});
        int node = d.add_node(green_spider(1, 0, 0.0), {z}, {});
        if (param >= 0)
            pd.spiders.push_back(SpiderBind{node, param, mults[l], offsets[l]});
        else
            d.nodes[node].phase = offsets[l];
    }
}

// Copy spiders on the wires, a pink XOR collector and one bound phase spider:
// diag(e^{i phi parity(x)}) on the listed wires.
inline void emit_phase_gadget(ParamDiagram& pd, std::vector<int>& frontier, const std::vector<int>& wires,
                              int param, double mult, double offset) {
    Diagram& d = pd.base;
    const int k = static_cast<int>(wires.size());
    if (k == 1) {
        int out = d.fresh_edge();
        int node = d.add_node(green_spider(1, 1, 0.0), {frontier[wires[0]]}, {out});
        frontier[wires[0]] = out;
        if (param >= 0)
            pd.spiders.push_back(SpiderBind{node, param, mult, offset});
        else
            d.nodes[node].phase = offset;
        return;
    }
    std::vector<int> taps;
    for (int w : wires) {
        int through = d.fresh_edge(), tap = d.fresh_edge();
        d.add_node(green_spider(1, 2, 0.0), {frontier[w]}, {through, tap});
        frontier[w] = through;
        taps.push_back(tap);
    }
    int parity = d.fresh_edge();
    d.add_node(pink_spider(k, 1, 0.0), taps, {parity});
    int node = d.add_node(green_spider(1, 0, 0.0), {parity}, {});
    if (param >= 0)
        pd.spiders.push_back(SpiderBind{node, param, mult, offset});
    else
        d.nodes[node].phase = offset;
}

}  // namespace param_detail

// One parametrised spider per non-zero eigenvalue group, FunctionBox-selected,
// conjugated by the eigenbasis. Evaluates to exp_unitary(g, theta) exactly.
inline ParamDiagram repr_naive(const HermitianGenerator& g, double zero_tol = 1e-12) {
    ParamDiagram pd;
    pd.n_params = 1;
    Diagram& d = pd.base;
    const int q = g.qubits;
    std::vector<int> frontier;
    for (int j = 0; j < q; ++j) {
        int e = d.fresh_edge();
        frontier.push_back(e);
        d.boundary_in.push_back(e);
    }
    std::vector<std::vector<int>> groups;
    std::vector<double> mults, offsets;
    for (const auto& grp : g.groups) {
        if (std::abs(grp.value) <= zero_tol) continue;
        groups.push_back(grp.indices);
        mults.push_back(grp.value);
        offsets.push_back(0.0);
    }
    if (groups.empty()) {
        // H = 0 on the retained groups: the unitary is the identity.
        for (int j = 0; j < q; ++j) {
            int out = d.fresh_edge();
            d.add_node(wire_node(), {frontier[j]}, {out});
            frontier[j] = out;
        }
        d.boundary_out = frontier;
        return pd;
    }
    {
        std::vector<int> outs;
        for (int j = 0; j < q; ++j) outs.push_back(d.fresh_edge());
        d.add_node(dense_box(q, q, g.basis.dagger()), frontier, outs);
        frontier = outs;
    }
    std::vector<int> all_wires(q);
    for (int j = 0; j < q; ++j) all_wires[j] = j;
    param_detail::emit_eig_core(pd, frontier, all_wires, groups, 0, mults, offsets);
    {
        std::vector<int> outs;
        for (int j = 0; j < q; ++j) outs.push_back(d.fresh_edge());
        d.add_node(dense_box(q, q, g.basis), frontier, outs);
        frontier = outs;
    }
    d.boundary_out = frontier;
    return pd;
}

// Two-eigenvalue generators: a single spider with phase (lambda1-lambda2)*theta
// plus the global phase e^{i lambda2 theta} carried as a scalar binding.
inline ParamDiagram repr_two(const HermitianGenerator& g) {
    if (g.groups.size() != 2)
        throw std::invalid_argument("repr_two: generator must have exactly two distinct eigenvalues");
    const double l1 = g.groups[0].value, l2 = g.groups[1].value;
    ParamDiagram pd;
    pd.n_params = 1;
    Diagram& d = pd.base;
    const int q = g.qubits;
    std::vector<int> frontier;
    for (int j = 0; j < q; ++j) {
        int e = d.fresh_edge();
        frontier.push_back(e);
        d.boundary_in.push_back(e);
    }
    {
        std::vector<int> outs;
        for (int j = 0; j < q; ++j) outs.push_back(d.fresh_edge());
        d.add_node(dense_box(q, q, g.basis.dagger()), frontier, outs);
        frontier = outs;
    }
    std::vector<int> all_wires(q);
    for (int j = 0; j < q; ++j) all_wires[j] = j;
    param_detail::emit_eig_core(pd, frontier, all_wires, {g.groups[0].indices}, 0, {l1 - l2}, {0.0});
    {
        std::vector<int> outs;
        for (int j = 0; j < q; ++j) outs.push_back(d.fresh_edge());
        d.add_node(dense_box(q, q, g.basis), frontier, outs);
        frontier = outs;
    }
    d.boundary_out = frontier;
    pd.scalars.push_back(ScalarBind{0, l2});
    return pd;
}

// ---------- Pauli exponentials ----------

// e^{-i alpha/2 P} = cos(alpha/2) I - i sin(alpha/2) P.
inline Mat pauli_exp_matrix(const std::string& paulis, double alpha) {
    PauliTerm t{1.0, paulis};
    Mat p = term_matrix(t);
    Mat id = Mat::identity(p.rows);
    return id * Cplx(std::cos(alpha / 2), 0.0) + p * Cplx(0.0, -std::sin(alpha / 2));
}

namespace param_detail {

// Basis change bringing P to Z on each non-identity position: H for X, S then
// H... for Y the conjugator is V = S H (so V Z V^dagger = Y), applied as
// V^dagger = H S^dagger on the way in and V on the way out.
inline void emit_pauli_basis_in(ParamDiagram& pd, std::vector<int>& frontier, int wire, char p) {
    Diagram& d = pd.base;
    auto seq1 = [&](Node n) {
        int out = d.fresh_edge();
        d.add_node(std::move(n), {frontier[wire]}, {out});
        frontier[wire] = out;
    };
    if (p == 'X') {
        seq1(hadamard());
    } else if (p == 'Y') {
        seq1(green_spider(1, 1, -kPi / 2));
        seq1(hadamard());
    }
}

inline void emit_pauli_basis_out(ParamDiagram& pd, std::vector<int>& frontier, int wire, char p) {
    Diagram& d = pd.base;
    auto seq1 = [&](Node n) {
        int out = d.fresh_edge();
        d.add_node(std::move(n), {frontier[wire]}, {out});
        frontier[wire] = out;
    };
    if (p == 'X') {
        seq1(hadamard());
    } else if (p == 'Y') {
        seq1(hadamard());
        seq1(green_spider(1, 1, kPi / 2));
    }
}

}  // namespace param_detail

// Exact diagram of e^{-i alpha/2 P}, scalar e^{-i alpha/2} included.
inline Diagram pauli_exp_diagram(const std::string& paulis, double alpha) {
    ParamDiagram pd;
    pd.n_params = 0;
    Diagram& d = pd.base;
    const int q = static_cast<int>(paulis.size());
    std::vector<int> frontier;
    for (int j = 0; j < q; ++j) {
        int e = d.fresh_edge();
        frontier.push_back(e);
        d.boundary_in.push_back(e);
    }
    std::vector<int> active;
    for (int j = 0; j < q; ++j)
        if (paulis[j] != 'I') active.push_back(j);
    for (int j : active) param_detail::emit_pauli_basis_in(pd, frontier, j, paulis[j]);
    if (!active.empty()) param_detail::emit_phase_gadget(pd, frontier, active, -1, 0.0, alpha);
    for (int j : active) param_detail::emit_pauli_basis_out(pd, frontier, j, paulis[j]);
    // Untouched wires still need nodes so the boundary ids stay distinct.
    for (int j = 0; j < q; ++j)
        if (paulis[j] == 'I') {
            int out = d.fresh_edge();
            d.add_node(wire_node(), {frontier[j]}, {out});
            frontier[j] = out;
        }
    d.boundary_out = frontier;
    d.scalar *= std::exp(Cplx(0.0, -alpha / 2));
    return d;
}

// ---------- gates and circuits ----------

enum class GateKind {
    RZ, RX, RY,          // single-qubit rotations, angle phi, U = e^{i phi G}
    H, CNOT, CZ, SwapGate,
    CRZ, CU1,            // controlled phases, targets = {control, target}
    PauliExp,            // e^{-i phi/2 P} over `paulis`
    PhaseGadget,         // diag(e^{i phi parity(x)}) over targets
    Custom,              // exp_unitary(gen, phi)
};

// angle = mult * theta[param] + offset; param < 0 means a constant angle.
struct GateBinding {
    int param = -1;
    double mult = 1.0;
    double offset = 0.0;

    double angle(const std::vector<double>& theta) const {
        return (param >= 0 ? mult * theta[param] : 0.0) + offset;
    }
};

struct Gate {
    GateKind kind;
    std::vector<int> targets;
    GateBinding bind;
    std::string paulis;       // PauliExp only
    HermitianGenerator gen;   // Custom only
};

inline Gate g_rz(int q, GateBinding b) { return Gate{GateKind::RZ, {q}, b, "", {}}; }
inline Gate g_rx(int q, GateBinding b) { return Gate{GateKind::RX, {q}, b, "", {}}; }
inline Gate g_ry(int q, GateBinding b) { return Gate{GateKind::RY, {q}, b, "", {}}; }
inline Gate g_h(int q) { return Gate{GateKind::H, {q}, {}, "", {}}; }
inline Gate g_cnot(int c, int t) { return Gate{GateKind::CNOT, {c, t}, {}, "", {}}; }
inline Gate g_cz(int a, int b) { return Gate{GateKind::CZ, {a, b}, {}, "", {}}; }
inline Gate g_swap(int a, int b) { return Gate{GateKind::SwapGate, {a, b}, {}, "", {}}; }
inline Gate g_crz(int c, int t, GateBinding b) { return Gate{GateKind::CRZ, {c, t}, b, "", {}}; }
inline Gate g_cu1(int c, int t, GateBinding b) { return Gate{GateKind::CU1, {c, t}, b, "", {}}; }
inline Gate g_pauli_exp(std::vector<int> targets, std::string paulis, GateBinding b) {
    return Gate{GateKind::PauliExp, std::move(targets), b, std::move(paulis), {}};
}
inline Gate g_phase_gadget(std::vector<int> targets, GateBinding b) {
    return Gate{GateKind::PhaseGadget, std::move(targets), b, "", {}};
}
inline Gate g_custom(std::vector<int> targets, HermitianGenerator gen, GateBinding b) {
    return Gate{GateKind::Custom, std::move(targets), b, "", std::move(gen)};
}

struct ParamCircuit {
    int qubits = 0;
    int n_params = 0;
    std::vector<Gate> gates;
};

// Local matrix of a gate at a resolved angle, 2^k x 2^k over its targets.
inline Mat gate_local_matrix(const Gate& g, double angle) {
    const double c = std::cos(angle / 2), s = std::sin(angle / 2);
    switch (g.kind) {
        case GateKind::RZ: {
            Mat m(2, 2);
            m(0, 0) = std::exp(Cplx(0, -angle / 2));
            m(1, 1) = std::exp(Cplx(0, angle / 2));
            return m;
        }
        case GateKind::RX: {
            Mat m(2, 2);
            m(0, 0) = c; m(1, 1) = c;
            m(0, 1) = Cplx(0, -s); m(1, 0) = Cplx(0, -s);
            return m;
        }
        case GateKind::RY: {
            Mat m(2, 2);
            m(0, 0) = c; m(1, 1) = c;
            m(0, 1) = -s; m(1, 0) = s;
            return m;
        }
        case GateKind::H: return generator_matrix(hadamard());
        case GateKind::CNOT: {
            Mat m(4, 4);
            m(0, 0) = 1; m(1, 1) = 1; m(2, 3) = 1; m(3, 2) = 1;
            return m;
        }
        case GateKind::CZ: {
            Mat m = Mat::identity(4);
            m(3, 3) = -1;
            return m;
        }
        case GateKind::SwapGate: return generator_matrix(swap_node());
        case GateKind::CRZ: {
            Mat m = Mat::identity(4);
            m(2, 2) = std::exp(Cplx(0, -angle / 2));
            m(3, 3) = std::exp(Cplx(0, angle / 2));
            return m;
        }
        case GateKind::CU1: {
            Mat m = Mat::identity(4);
            m(3, 3) = std::exp(Cplx(0, angle));
            return m;
        }
        case GateKind::PauliExp: return pauli_exp_matrix(g.paulis, angle);
        case GateKind::PhaseGadget: {
            int k = static_cast<int>(g.targets.size());
            Mat m(1 << k, 1 << k);
            for (int x = 0; x < (1 << k); ++x)
                m(x, x) = (__builtin_popcount(static_cast<unsigned>(x)) % 2) ? std::exp(Cplx(0, angle)) : Cplx(1, 0);
            return m;
        }
        case GateKind::Custom: return exp_unitary(g.gen, angle);
    }
    throw std::logic_error("unreachable");
}

// Hermitian G with U(angle) = e^{i angle G}, local over the targets.
inline Mat gate_local_generator(const Gate& g) {
    switch (g.kind) {
        case GateKind::RZ: return pauli_matrix('Z') * Cplx(-0.5, 0);
        case GateKind::RX: return pauli_matrix('X') * Cplx(-0.5, 0);
        case GateKind::RY: return pauli_matrix('Y') * Cplx(-0.5, 0);
        case GateKind::CRZ: {
            Mat m(4, 4);
            m(2, 2) = -0.5; m(3, 3) = 0.5;
            return m;
        }
        case GateKind::CU1: {
            Mat m(4, 4);
            m(3, 3) = 1.0;
            return m;
        }
        case GateKind::PauliExp: return term_matrix(PauliTerm{1.0, g.paulis}) * Cplx(-0.5, 0);
        case GateKind::PhaseGadget: {
            int k = static_cast<int>(g.targets.size());
            Mat m(1 << k, 1 << k);
            for (int x = 0; x < (1 << k); ++x)
                if (__builtin_popcount(static_cast<unsigned>(x)) % 2) m(x, x) = 1.0;
            return m;
        }
        case GateKind::Custom: return g.gen.matrix;
        default: throw std::invalid_argument("gate has no parameter");
    }
}

// Embed a local 2^k x 2^k matrix on the listed wires of a q-wire register.
inline Mat embed_matrix(const Mat& local, const std::vector<int>& targets, int q) {
    const int k = static_cast<int>(targets.size());
    if (local.rows != (1 << k) || local.cols != (1 << k)) throw std::invalid_argument("embed_matrix: shape");
    Mat out(1 << q, 1 << q);
    const int dim = 1 << q;
    for (int col = 0; col < dim; ++col) {
        int lc = 0;
        for (int t = 0; t < k; ++t) lc = (lc << 1) | ((col >> (q - 1 - targets[t])) & 1);
        for (int lr = 0; lr < (1 << k); ++lr) {
            Cplx v = local(lr, lc);
            if (v == Cplx(0.0, 0.0)) continue;
            int row = col;
            for (int t = 0; t < k; ++t) {
                int bit = (lr >> (k - 1 - t)) & 1;
                int pos = q - 1 - targets[t];
                row = (row & ~(1 << pos)) | (bit << pos);
            }
            out(row, col) += v;
        }
    }
    return out;
}

inline Mat circuit_unitary(const ParamCircuit& c, const std::vector<double>& theta) {
    if (static_cast<int>(theta.size()) != c.n_params)
        throw std::invalid_argument("circuit_unitary: parameter count mismatch");
    Mat u = Mat::identity(1 << c.qubits);
    for (const auto& g : c.gates)
        u = embed_matrix(gate_local_matrix(g, g.bind.angle(theta)), g.targets, c.qubits) * u;
    return u;
}

namespace param_detail {

inline void emit_gate(ParamDiagram& pd, std::vector<int>& frontier, const Gate& g) {
    Diagram& d = pd.base;
    auto seq1 = [&](int wire, Node n) {
        int out = d.fresh_edge();
        d.add_node(std::move(n), {frontier[wire]}, {out});
        frontier[wire] = out;
    };
    // A parametrised green spider on one wire plus its binding.
    auto bound_spider1 = [&](int wire, double mscale) {
        int out = d.fresh_edge();
        int node = d.add_node(green_spider(1, 1, 0.0), {frontier[wire]}, {out});
        frontier[wire] = out;
        if (g.bind.param >= 0)
            pd.spiders.push_back(SpiderBind{node, g.bind.param, g.bind.mult * mscale, g.bind.offset * mscale});
        else
            d.nodes[node].phase = g.bind.offset * mscale;
    };
    auto scalar_phase = [&](double mscale) {
        if (g.bind.param >= 0) pd.scalars.push_back(ScalarBind{g.bind.param, g.bind.mult * mscale});
        d.scalar *= std::exp(Cplx(0.0, g.bind.offset * mscale));
    };
    auto gadget = [&](const std::vector<int>& wires, double mscale) {
        if (g.bind.param >= 0)
            emit_phase_gadget(pd, frontier, wires, g.bind.param, g.bind.mult * mscale, g.bind.offset * mscale);
        else
            emit_phase_gadget(pd, frontier, wires, -1, 0.0, g.bind.offset * mscale);
    };

    switch (g.kind) {
        case GateKind::RZ:
            bound_spider1(g.targets[0], 1.0);
            scalar_phase(-0.5);
            return;
        case GateKind::RX:
            seq1(g.targets[0], hadamard());
            bound_spider1(g.targets[0], 1.0);
            seq1(g.targets[0], hadamard());
            scalar_phase(-0.5);
            return;
        case GateKind::RY:
            seq1(g.targets[0], green_spider(1, 1, -kPi / 2));
            seq1(g.targets[0], hadamard());
            bound_spider1(g.targets[0], 1.0);
            seq1(g.targets[0], hadamard());
            seq1(g.targets[0], green_spider(1, 1, kPi / 2));
            scalar_phase(-0.5);
            return;
        case GateKind::H:
            seq1(g.targets[0], hadamard());
            return;
        case GateKind::CNOT: {
            int c = g.targets[0], t = g.targets[1];
            int cthrough = d.fresh_edge(), mid = d.fresh_edge(), tout = d.fresh_edge();
            d.add_node(green_spider(1, 2, 0.0), {frontier[c]}, {cthrough, mid});
            d.add_node(pink_spider(2, 1, 0.0), {frontier[t], mid}, {tout});
            frontier[c] = cthrough;
            frontier[t] = tout;
            return;
        }
        case GateKind::CZ: {
            int a = g.targets[0], b = g.targets[1];
            int athrough = d.fresh_edge(), am = d.fresh_edge(), hm = d.fresh_edge(), bthrough = d.fresh_edge();
            d.add_node(green_spider(1, 2, 0.0), {frontier[a]}, {athrough, am});
            d.add_node(hadamard(), {am}, {hm});
            d.add_node(green_spider(2, 1, 0.0), {frontier[b], hm}, {bthrough});
            frontier[a] = athrough;
            frontier[b] = bthrough;
            d.scalar *= std::sqrt(2.0);
            return;
        }
        case GateKind::SwapGate:
            std::swap(frontier[g.targets[0]], frontier[g.targets[1]]);
            return;
        case GateKind::CRZ: {
            // diag(1,1,e^{-i phi/2},e^{i phi/2}) = Z-gadget(target, phi/2) * ZZ-gadget(-phi/2)
            gadget({g.targets[1]}, 0.5);
            gadget({g.targets[0], g.targets[1]}, -0.5);
            return;
        }
        case GateKind::CU1: {
            // One spider selected by the AND box.
            int c = g.targets[0], t = g.targets[1];
            int cthrough = d.fresh_edge(), ctap = d.fresh_edge();
            int tthrough = d.fresh_edge(), ttap = d.fresh_edge();
            d.add_node(green_spider(1, 2, 0.0), {frontier[c]}, {cthrough, ctap});
            d.add_node(green_spider(1, 2, 0.0), {frontier[t]}, {tthrough, ttap});
            frontier[c] = cthrough;
            frontier[t] = tthrough;
            int z = d.fresh_edge();
            d.add_node(function_box(2, 1, {0, 0, 0, 1}), {ctap, ttap}, {z});
            int node = d.add_node(green_spider(1, 0, 0.0), {z}, {});
            if (g.bind.param >= 0)
                pd.spiders.push_back(SpiderBind{node, g.bind.param, g.bind.mult, g.bind.offset});
            else
                d.nodes[node].phase = g.bind.offset;
            return;
        }
        case GateKind::PauliExp: {
            std::vector<int> active;
            for (size_t j = 0; j < g.paulis.size(); ++j)
                if (g.paulis[j] != 'I') active.push_back(g.targets[j]);
            for (size_t j = 0; j < g.paulis.size(); ++j)
                if (g.paulis[j] != 'I') emit_pauli_basis_in(pd, frontier, g.targets[j], g.paulis[j]);
            if (!active.empty()) gadget(active, 1.0);
            for (size_t j = 0; j < g.paulis.size(); ++j)
                if (g.paulis[j] != 'I') emit_pauli_basis_out(pd, frontier, g.targets[j], g.paulis[j]);
            scalar_phase(-0.5);
            return;
        }
        case GateKind::PhaseGadget:
            gadget(g.targets, 1.0);
            return;
        case GateKind::Custom: {
            const auto& gen = g.gen;
            const int k = static_cast<int>(g.targets.size());
            if (gen.qubits != k) throw std::invalid_argument("custom gate arity mismatch");
            std::vector<std::vector<int>> groups;
            std::vector<double> mults, offsets;
            for (const auto& grp : gen.groups) {
                if (std::abs(grp.value) <= 1e-12) continue;
                groups.push_back(grp.indices);
                mults.push_back(grp.value * g.bind.mult);
                offsets.push_back(grp.value * g.bind.offset);
            }
            if (groups.empty()) return;
            {
                std::vector<int> ins, outs;
                for (int j = 0; j < k; ++j) ins.push_back(frontier[g.targets[j]]);
                for (int j = 0; j < k; ++j) outs.push_back(d.fresh_edge());
                d.add_node(dense_box(k, k, gen.basis.dagger()), ins, outs);
                for (int j = 0; j < k; ++j) frontier[g.targets[j]] = outs[j];
            }
            if (g.bind.param >= 0) {
                param_detail::emit_eig_core(pd, frontier, g.targets, groups, g.bind.param, mults, offsets);
            } else {
                param_detail::emit_eig_core(pd, frontier, g.targets, groups, -1, mults, offsets);
            }
            {
                std::vector<int> ins, outs;
                for (int j = 0; j < k; ++j) ins.push_back(frontier[g.targets[j]]);
                for (int j = 0; j < k; ++j) outs.push_back(d.fresh_edge());
                d.add_node(dense_box(k, k, gen.basis), ins, outs);
                for (int j = 0; j < k; ++j) frontier[g.targets[j]] = outs[j];
            }
            return;
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace param_detail

// The whole circuit as one parametrised diagram; evaluating at theta matches
// circuit_unitary entrywise (global phases included).
inline ParamDiagram circuit_diagram(const ParamCircuit& c) {
    ParamDiagram pd;
    pd.n_params = c.n_params;
    Diagram& d = pd.base;
    std::vector<int> frontier;
    for (int j = 0; j < c.qubits; ++j) {
        int e = d.fresh_edge();
        frontier.push_back(e);
        d.boundary_in.push_back(e);
    }
    for (const auto& g : c.gates) {
        for (int t : g.targets)
            if (t < 0 || t >= c.qubits) throw std::invalid_argument("gate target out of range");
        if (g.bind.param >= c.n_params) throw std::invalid_argument("gate binding out of range");
        param_detail::emit_gate(pd, frontier, g);
    }
    d.boundary_out = frontier;
    return pd;
}

// ---------- derivative diagrams ----------

// d/dtheta_p of the doubled circuit, as one diagram: every spider bound to the
// parameter gains an extra leg, all legs are fed from one W branch carrying a
// pink pi state, each through a multiplier box and a Hadamard.
struct DerivativeDiagram {
    ParamDiagram diag;
    Cplx scale = 1.0;
    int exposed = 0;
};

inline DerivativeDiagram derivative_diagram(const ParamCircuit& c, int param) {
    if (param < 0 || param >= c.n_params) throw std::invalid_argument("derivative_diagram: bad parameter index");
    ParamDiagram dd = double_param(circuit_diagram(c));
    Diagram& d = dd.base;

    std::vector<int> nodes;
    std::vector<double> mults;
    for (const auto& b : dd.spiders)
        if (b.param == param) {
            nodes.push_back(b.node);
            mults.push_back(b.mult);
        }
    const int K = static_cast<int>(nodes.size());
    if (K == 0) throw std::invalid_argument("derivative_diagram: parameter does not occur");

    int root = d.fresh_edge();
    d.add_node(pink_spider(0, 1, kPi), {}, {root});
    std::vector<int> legs;
    int cur = root;
    for (int k = 0; k + 1 < K; ++k) {
        int a = d.fresh_edge(), b = d.fresh_edge();
        d.add_node(w_branch(1, 2), {cur}, {a, b});
        legs.push_back(a);
        cur = b;
    }
    legs.push_back(cur);

    for (int k = 0; k < K; ++k) {
        int boxed = d.fresh_edge(), had = d.fresh_edge();
        d.add_node(green_box(1, 1, Cplx(mults[k], 0.0)), {legs[k]}, {boxed});
        d.add_node(hadamard(), {boxed}, {had});
        Node& target = d.nodes[nodes[k]];
        target.n_in += 1;
        d.in_edges[nodes[k]].push_back(had);
    }
    d.scalar *= std::pow(2.0, -0.5 * K);

    DerivativeDiagram out;
    out.diag = std::move(dd);
    out.scale = Cplx(0.0, -1.0) * std::pow(2.0, K - 1);
    out.exposed = K;
    return out;
}

inline Mat evaluate_derivative(const DerivativeDiagram& dd, const std::vector<double>& theta) {
    return evaluate(dd.diag.at(theta)) * dd.scale;
}

}  // namespace zxwgrad
