#pragma once

// Dense statevector simulation of parametrised circuits and the exact /
// finite-difference gradient paths.

#include "param.hpp"

namespace zxwgrad {

struct Statevector {
    int n = 0;
    std::vector<Cplx> a;
};

inline Statevector zero_state(int n) {
    Statevector s;
    s.n = n;
    s.a.assign(size_t(1) << n, Cplx(0.0, 0.0));
    s.a[0] = 1.0;
    return s;
}

inline double state_norm(const Statevector& s) {
    double t = 0.0;
    for (const auto& v : s.a) t += std::norm(v);
    return std::sqrt(t);
}

inline Cplx inner(const Statevector& x, const Statevector& y) {
    if (x.n != y.n) throw std::invalid_argument("inner: size mismatch");
    Cplx t = 0.0;
    for (size_t i = 0; i < x.a.size(); ++i) t += std::conj(x.a[i]) * y.a[i];
    return t;
}

// Apply a 2^k x 2^k matrix on the listed wires (wire 0 = most significant bit).
inline void apply_local(Statevector& s, const Mat& local, const std::vector<int>& targets) {
    const int n = s.n, k = static_cast<int>(targets.size());
    if (local.rows != (1 << k) || local.cols != (1 << k)) throw std::invalid_argument("apply_local: shape");
    std::vector<int> pos(k);
    size_t tmask = 0;
    for (int t = 0; t < k; ++t) {
        if (targets[t] < 0 || targets[t] >= n) throw std::invalid_argument("apply_local: target out of range");
        pos[t] = n - 1 - targets[t];
        tmask |= size_t(1) << pos[t];
    }
    const size_t lk = size_t(1) << k;
    std::vector<size_t> offs(lk, 0);
    for (size_t l = 0; l < lk; ++l)
        for (int t = 0; t < k; ++t)
            if ((l >> (k - 1 - t)) & 1) offs[l] |= size_t(1) << pos[t];
    std::vector<Cplx> buf(lk);
    const size_t full = size_t(1) << n;
    for (size_t base = 0; base < full; ++base) {
        if (base & tmask) continue;
        for (size_t l = 0; l < lk; ++l) buf[l] = s.a[base | offs[l]];
        for (size_t r = 0; r < lk; ++r) {
            Cplx acc = 0.0;
            for (size_t l = 0; l < lk; ++l) acc += local(static_cast<int>(r), static_cast<int>(l)) * buf[l];
            s.a[base | offs[r]] = acc;
        }
    }
}

inline void apply_gate(Statevector& s, const Gate& g, double angle) {
    const int n = s.n;
    auto bit = [&](size_t idx, int wire) { return (idx >> (n - 1 - wire)) & 1; };
    switch (g.kind) {
        case GateKind::RZ: {
            Cplx lo = std::exp(Cplx(0, -angle / 2)), hi = std::exp(Cplx(0, angle / 2));
            for (size_t i = 0; i < s.a.size(); ++i) s.a[i] *= bit(i, g.targets[0]) ? hi : lo;
            return;
        }
        case GateKind::CRZ: {
            Cplx lo = std::exp(Cplx(0, -angle / 2)), hi = std::exp(Cplx(0, angle / 2));
            for (size_t i = 0; i < s.a.size(); ++i)
                if (bit(i, g.targets[0])) s.a[i] *= bit(i, g.targets[1]) ? hi : lo;
            return;
        }
        case GateKind::CU1: {
            Cplx ph = std::exp(Cplx(0, angle));
            for (size_t i = 0; i < s.a.size(); ++i)
                if (bit(i, g.targets[0]) && bit(i, g.targets[1])) s.a[i] *= ph;
            return;
        }
        case GateKind::CZ: {
            for (size_t i = 0; i < s.a.size(); ++i)
                if (bit(i, g.targets[0]) && bit(i, g.targets[1])) s.a[i] = -s.a[i];
            return;
        }
        case GateKind::PhaseGadget: {
            size_t mask = 0;
            for (int t : g.targets) mask |= size_t(1) << (n - 1 - t);
            Cplx ph = std::exp(Cplx(0, angle));
            for (size_t i = 0; i < s.a.size(); ++i)
                if (__builtin_popcountll(i & mask) % 2) s.a[i] *= ph;
            return;
        }
        case GateKind::CNOT: {
            size_t cb = size_t(1) << (n - 1 - g.targets[0]);
            size_t tb = size_t(1) << (n - 1 - g.targets[1]);
            for (size_t i = 0; i < s.a.size(); ++i)
                if ((i & cb) && !(i & tb)) std::swap(s.a[i], s.a[i | tb]);
            return;
        }
        case GateKind::SwapGate: {
            size_t ab = size_t(1) << (n - 1 - g.targets[0]);
            size_t bb = size_t(1) << (n - 1 - g.targets[1]);
            for (size_t i = 0; i < s.a.size(); ++i)
                if ((i & ab) && !(i & bb)) std::swap(s.a[i], s.a[(i & ~ab) | bb]);
            return;
        }
        default:
            apply_local(s, gate_local_matrix(g, angle), g.targets);
            return;
    }
}

inline Statevector run_circuit(const ParamCircuit& c, const std::vector<double>& theta) {
    if (static_cast<int>(theta.size()) != c.n_params)
        throw std::invalid_argument("run_circuit: parameter count mismatch");
    Statevector s = zero_state(c.qubits);
    for (const auto& g : c.gates) apply_gate(s, g, g.bind.angle(theta));
    return s;
}

// P|x> for a Pauli string: bit flips on X/Y positions, phases from Y/Z.
inline Statevector apply_pauli_string(const std::string& paulis, const Statevector& s) {
    const int n = s.n;
    if (static_cast<int>(paulis.size()) != n) throw std::invalid_argument("apply_pauli_string: length mismatch");
    size_t xmask = 0, ymask = 0, zmask = 0;
    for (int j = 0; j < n; ++j) {
        size_t b = size_t(1) << (n - 1 - j);
        switch (paulis[j]) {
            case 'I': break;
            case 'X': xmask |= b; break;
            case 'Y': xmask |= b; ymask |= b; break;
            case 'Z': zmask |= b; break;
            default: throw std::invalid_argument("bad Pauli letter");
        }
    }
    int ycount = __builtin_popcountll(ymask);
    Cplx yphase = 1.0;
    for (int k = 0; k < ycount % 4; ++k) yphase *= Cplx(0, 1);
    Statevector out;
    out.n = n;
    out.a.assign(s.a.size(), Cplx(0.0, 0.0));
    for (size_t x = 0; x < s.a.size(); ++x) {
        Cplx v = s.a[x];
        if (v == Cplx(0.0, 0.0)) continue;
        int signbits = __builtin_popcountll(x & (ymask | zmask));
        out.a[x ^ xmask] = v * yphase * ((signbits % 2) ? -1.0 : 1.0);
    }
    return out;
}

inline Statevector apply_hamiltonian(const PauliHamiltonian& h, const Statevector& s) {
    if (h.n != s.n) throw std::invalid_argument("apply_hamiltonian: size mismatch");
    Statevector out;
    out.n = s.n;
    out.a.assign(s.a.size(), Cplx(0.0, 0.0));
    for (const auto& t : h.terms) {
        Statevector part = apply_pauli_string(t.paulis, s);
        for (size_t i = 0; i < out.a.size(); ++i) out.a[i] += Cplx(t.coeff, 0.0) * part.a[i];
    }
    return out;
}

// <0| U(theta)^dagger H U(theta) |0>, which must come out real.
inline double expectation(const ParamCircuit& c, const std::vector<double>& theta, const PauliHamiltonian& h) {
    if (h.n != c.qubits) throw std::invalid_argument("expectation: Hamiltonian size mismatch");
    Statevector psi = run_circuit(c, theta);
    Cplx v = inner(psi, apply_hamiltonian(h, psi));
    if (std::abs(v.imag()) > 1e-10) throw std::runtime_error("expectation: non-real value");
    return v.real();
}

// Identity strings contribute a constant to <H>; dropping them keeps gradients
// of constant Hamiltonians at an exact 0.0 instead of roundoff noise.
inline PauliHamiltonian nonconstant_part(const PauliHamiltonian& h) {
    PauliHamiltonian out;
    out.n = h.n;
    for (const auto& t : h.terms)
        if (t.paulis.find_first_not_of('I') != std::string::npos) out.terms.push_back(t);
    return out;
}

// Exact gradient: d<H>/dtheta_i = sum over occurrences g of theta_i of
// 2 Re <psi| H U_{>g} (i c_g G_g) U_{<=g} |0>.
inline std::vector<double> grad_exact(const ParamCircuit& c, const std::vector<double>& theta,
                                      const PauliHamiltonian& h) {
    if (h.n != c.qubits) throw std::invalid_argument("grad_exact: Hamiltonian size mismatch");
    std::vector<double> grad(c.n_params, 0.0);
    PauliHamiltonian hg = nonconstant_part(h);
    if (hg.terms.empty()) return grad;
    Statevector psi = run_circuit(c, theta);
    Statevector hpsi = apply_hamiltonian(hg, psi);
    for (size_t gi = 0; gi < c.gates.size(); ++gi) {
        const Gate& g = c.gates[gi];
        if (g.bind.param < 0 || g.bind.mult == 0.0) continue;
        Statevector phi = zero_state(c.qubits);
        for (size_t j = 0; j < c.gates.size(); ++j) {
            apply_gate(phi, c.gates[j], c.gates[j].bind.angle(theta));
            if (j == gi) {
                apply_local(phi, gate_local_generator(g), g.targets);
                for (auto& v : phi.a) v *= Cplx(0.0, g.bind.mult);
            }
        }
        grad[g.bind.param] += 2.0 * inner(hpsi, phi).real();
    }
    return grad;
}

// Single-parameter variant; the variance quadrature calls this once per grid
// point, so it skips the passes for every other parameter.
inline double grad_exact(const ParamCircuit& c, const std::vector<double>& theta,
                         const PauliHamiltonian& h, int param) {
    if (h.n != c.qubits) throw std::invalid_argument("grad_exact: Hamiltonian size mismatch");
    if (param < 0 || param >= c.n_params) throw std::invalid_argument("grad_exact: bad parameter index");
    PauliHamiltonian hg = nonconstant_part(h);
    if (hg.terms.empty()) return 0.0;
    double grad = 0.0;
    bool have_state = false;
    Statevector hpsi;
    for (size_t gi = 0; gi < c.gates.size(); ++gi) {
        const Gate& g = c.gates[gi];
        if (g.bind.param != param || g.bind.mult == 0.0) continue;
        if (!have_state) {
            hpsi = apply_hamiltonian(hg, run_circuit(c, theta));
            have_state = true;
        }
        Statevector phi = zero_state(c.qubits);
        for (size_t j = 0; j < c.gates.size(); ++j) {
            apply_gate(phi, c.gates[j], c.gates[j].bind.angle(theta));
            if (j == gi) {
                apply_local(phi, gate_local_generator(g), g.targets);
                for (auto& v : phi.a) v *= Cplx(0.0, g.bind.mult);
            }
        }
        grad += 2.0 * inner(hpsi, phi).real();
    }
    return grad;
}

inline std::vector<double> grad_fd(const ParamCircuit& c, const std::vector<double>& theta,
                                   const PauliHamiltonian& h, double step = 1e-5) {
    std::vector<double> grad(c.n_params, 0.0);
    for (int i = 0; i < c.n_params; ++i) {
        auto tp = theta, tm = theta;
        tp[i] += step;
        tm[i] -= step;
        grad[i] = (expectation(c, tp, h) - expectation(c, tm, h)) / (2 * step);
    }
    return grad;
}

}  // namespace zxwgrad
