#pragma once

// Parameter-shift rules: synthesis from eigenvalue structure, the generalized
// equidistant rule, a generic sine-system solver, the complex-coefficient
// no-go certificate for one-sided three-term rules, and the ancilla /
// post-selection gradient estimator.

#include <functional>

#include "sim.hpp"

namespace zxwgrad {

struct ShiftTerm {
    double shift = 0.0;
    double coeff = 0.0;
};

// d<H>/dtheta = scale * sum_t coeff_t * <H>(theta with theta_p += shift_t).
struct ShiftRule {
    double scale = 1.0;
    std::vector<ShiftTerm> terms;
};

// Rule for a generator with two distinct eigenvalues l1, l2 (any order):
// derivative = c [f(x+alpha) - f(x-alpha)], c = (l1-l2)/(2 sin((l1-l2) alpha)).
inline ShiftRule two_term(double l1, double l2, double alpha = kPi / 2) {
    const double gap = l1 - l2;
    const double s = std::sin(gap * alpha);
    if (std::abs(s) <= 1e-12)
        throw std::invalid_argument("two_term: sin((l1-l2) alpha) vanishes");
    const double c = gap / (2.0 * s);
    ShiftRule r;
    r.terms = {{alpha, c}, {-alpha, -c}};
    return r;
}

// Solve sum_j xi_j sin(freq_k alpha_j) = freq_k / 2 for one xi per shift angle.
// The matrix must be square, well conditioned, and the solution must actually
// satisfy the system.
inline ShiftRule solve_system(const std::vector<double>& freqs, const std::vector<double>& alphas) {
    const int n = static_cast<int>(freqs.size());
    if (n == 0 || static_cast<int>(alphas.size()) != n)
        throw std::invalid_argument("solve_system: need as many shift angles as frequencies");
    Eigen::MatrixXd s(n, n);
    Eigen::VectorXd rhs(n);
    for (int k = 0; k < n; ++k) {
        rhs(k) = freqs[k] / 2.0;
        for (int j = 0; j < n; ++j) s(k, j) = std::sin(freqs[k] * alphas[j]);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues()(n - 1), smax = svd.singularValues()(0);
    if (smin <= 1e-14 || smax / smin > 1e12)
        throw std::invalid_argument("solve_system: sine system is singular or ill conditioned");
    Eigen::VectorXd xi = svd.solve(rhs);
    if (xi.cwiseAbs().maxCoeff() > 1e12)
        throw std::invalid_argument("solve_system: coefficients exceed 1e12, rule is numerically useless");
    if ((s * xi - rhs).cwiseAbs().maxCoeff() > 1e-9)
        throw std::runtime_error("solve_system: residual check failed");
    ShiftRule r;
    for (int j = 0; j < n; ++j) {
        r.terms.push_back({alphas[j], xi(j)});
        r.terms.push_back({-alphas[j], -xi(j)});
    }
    return r;
}

// Rule for generators with eigenvalues {-lambda, 0, lambda}: expectation
// frequencies lambda and 2 lambda, differentiated by four shifted terms.
inline ShiftRule four_term(double lambda, double a1 = kPi / 2, double a2 = kPi) {
    if (std::abs(lambda) <= 1e-12) throw std::invalid_argument("four_term: lambda must be non-zero");
    ShiftRule base = solve_system({1.0, 2.0}, {lambda * a1, lambda * a2});
    ShiftRule r;
    r.scale = lambda;
    // base shifts are lambda*a_j in the rescaled variable; report them in theta.
    r.terms = {{a1, base.terms[0].coeff},
               {-a1, base.terms[1].coeff},
               {a2, base.terms[2].coeff},
               {-a2, base.terms[3].coeff}};
    return r;
}

// 2n-term rule with equidistant shifts alpha_j = j pi / (n+1) differentiating
// integer-frequency trigonometric polynomials up to frequency n.
inline ShiftRule general_equidistant(int n) {
    if (n < 1) throw std::invalid_argument("general_equidistant: n >= 1");
    ShiftRule r;
    for (int j = 1; j <= n; ++j) {
        const double alpha = j * kPi / (n + 1);
        double xi = 0.0;
        for (int k = 1; k <= n; ++k) xi += k * std::sin(k * j * kPi / (n + 1));
        xi /= (n + 1);
        r.terms.push_back({alpha, xi});
        r.terms.push_back({-alpha, -xi});
    }
    return r;
}

// All distinct positive pairwise eigenvalue differences: the frequency content
// of the induced expectation function.
inline std::vector<double> frequencies_from_eigs(const std::vector<double>& eigs, double tol = 1e-9) {
    std::vector<double> out;
    for (size_t i = 0; i < eigs.size(); ++i)
        for (size_t j = 0; j < eigs.size(); ++j) {
            double d = eigs[i] - eigs[j];
            if (d <= tol) continue;
            bool seen = false;
            for (double v : out)
                if (std::abs(v - d) <= tol) { seen = true; break; }
            if (!seen) out.push_back(d);
        }
    std::sort(out.begin(), out.end());
    return out;
}

inline double apply_rule_fn(const ShiftRule& r, const std::function<double(double)>& f, double x) {
    double acc = 0.0;
    for (const auto& t : r.terms) acc += t.coeff * f(x + t.shift);
    return r.scale * acc;
}

inline double apply_rule(const ShiftRule& r, const ParamCircuit& c, const std::vector<double>& theta,
                         int param, const PauliHamiltonian& h) {
    if (param < 0 || param >= c.n_params) throw std::invalid_argument("apply_rule: bad parameter index");
    double acc = 0.0;
    for (const auto& t : r.terms) {
        auto shifted = theta;
        shifted[param] += t.shift;
        acc += t.coeff * expectation(c, shifted, h);
    }
    return r.scale * acc;
}

// ---------- no-go certificate ----------

// Coefficients of the unique one-sided three-point rule
// f'(0) = sum_j xi_j f(delta_j) exact for frequencies {0, 1, 2}, with
// evaluation nodes x_j = e^{i delta_j}. A valid sampling rule needs real
// coefficients; these are provably complex away from degenerate node choices.
inline std::vector<Cplx> nogo_coefficients(double alpha, double beta, double gamma) {
    const Cplx a = std::exp(Cplx(0, alpha)), b = std::exp(Cplx(0, beta)), c = std::exp(Cplx(0, gamma));
    if (std::abs(a - b) < 1e-12 || std::abs(a - c) < 1e-12 || std::abs(b - c) < 1e-12)
        throw std::invalid_argument("nogo_coefficients: shift angles must be distinct mod 2 pi");
    const Cplx mi(0, -1);
    Cplx xi1 = mi * (b + c - 2.0) / ((a - b) * (a - c));
    Cplx xi2 = mi * (a + c - 2.0) / ((b - a) * (b - c));
    Cplx xi3 = mi * (a + b - 2.0) / ((c - a) * (c - b));
    return {xi1, xi2, xi3};
}

inline double nogo_residual(double alpha, double beta, double gamma) {
    double r = 0.0;
    for (const Cplx& xi : nogo_coefficients(alpha, beta, gamma)) r = std::max(r, std::abs(xi.imag()));
    return r;
}

// ---------- ancilla / post-selection estimator ----------

// (1/sqrt(m+1)) (|0^m> + sum_k |e_k>), prepared by a ladder of anti-controlled
// R_Y gates D(p_j) = R_Y(2 arccos sqrt(p_j)), p_j = (m+1-j)/(m+2-j).
inline Statevector ancilla_w_state(int m) {
    if (m < 1) throw std::invalid_argument("ancilla_w_state: m >= 1");
    Statevector s = zero_state(m);
    for (int j = 1; j <= m; ++j) {
        const double p = double(m + 1 - j) / double(m + 2 - j);
        const double t = std::acos(std::sqrt(p));
        // R_Y(2t) on wire j-1, anti-controlled on wires 0..j-2.
        const int dim = 1 << j;
        Mat gate = Mat::identity(dim);
        gate(0, 0) = std::cos(t); gate(0, 1) = -std::sin(t);
        gate(1, 0) = std::sin(t); gate(1, 1) = std::cos(t);
        std::vector<int> wires(j);
        for (int w = 0; w < j; ++w) wires[w] = w;
        apply_local(s, gate, wires);
    }
    return s;
}

namespace shift_detail {

// The Pauli string inserted by a controlled pi-shift of one parametrised gate.
inline std::pair<std::vector<int>, std::string> insertion_pauli(const Gate& g) {
    switch (g.kind) {
        case GateKind::RZ: return {{g.targets[0]}, "Z"};
        case GateKind::RX: return {{g.targets[0]}, "X"};
        case GateKind::RY: return {{g.targets[0]}, "Y"};
        case GateKind::PhaseGadget: return {g.targets, std::string(g.targets.size(), 'Z')};
        case GateKind::PauliExp: {
            std::vector<int> wires;
            std::string p;
            for (size_t j = 0; j < g.paulis.size(); ++j)
                if (g.paulis[j] != 'I') {
                    wires.push_back(g.targets[j]);
                    p += g.paulis[j];
                }
            if (wires.empty()) throw std::invalid_argument("ancilla_gradient: identity Pauli exponential");
            return {wires, p};
        }
        default:
            throw std::invalid_argument("ancilla_gradient: occurrence is not a single-spider gate");
    }
}

// Controlled insertion of sign * P (the sign absorbs a negative multiplier, so
// the ancilla phases can stay uniform for any alpha).
inline Mat controlled_pauli(const std::string& paulis, double sign) {
    Mat p = term_matrix(PauliTerm{sign, paulis});
    Mat out = Mat::identity(2 * p.rows);
    for (int r = 0; r < p.rows; ++r)
        for (int c = 0; c < p.cols; ++c) out(p.rows + r, p.rows + c) = p(r, c);
    return out;
}

}  // namespace shift_detail

// Gradient of <H> in theta[param] via one ancilla per occurrence: a W-type
// register coherently controls a Pauli insertion at each parametrised spider,
// relative phases e^{+-i alpha} are placed on the ancillas, and both runs are
// post-selected on <+|^m without normalization:
//   d<H>/dtheta = c (E_- - E_+) / (4 kappa^2 sin alpha),  kappa^2 = 2^{-m}/(m+1),
// where c is the common |multiplier| of the occurrences.
inline double ancilla_gradient(const ParamCircuit& circ, int param, const std::vector<double>& theta,
                               const PauliHamiltonian& h, double alpha = kPi / 2) {
    if (param < 0 || param >= circ.n_params) throw std::invalid_argument("ancilla_gradient: bad parameter");
    if (h.n != circ.qubits) throw std::invalid_argument("ancilla_gradient: Hamiltonian size mismatch");
    if (std::abs(std::sin(alpha)) < 1e-12) throw std::invalid_argument("ancilla_gradient: sin(alpha) vanishes");

    std::vector<size_t> sites;
    std::vector<double> signs;
    double common = 0.0;
    for (size_t gi = 0; gi < circ.gates.size(); ++gi) {
        const Gate& g = circ.gates[gi];
        if (g.bind.param != param || g.bind.mult == 0.0) continue;
        const double mag = std::abs(g.bind.mult);
        if (common == 0.0)
            common = mag;
        else if (std::abs(common - mag) > 1e-12)
            throw std::invalid_argument("ancilla_gradient: occurrences must share one |multiplier|");
        sites.push_back(gi);
        signs.push_back(g.bind.mult > 0 ? 1.0 : -1.0);
    }
    const int m = static_cast<int>(sites.size());
    if (m == 0) throw std::invalid_argument("ancilla_gradient: parameter does not occur");

    const int n = circ.qubits;
    Statevector w = ancilla_w_state(m);

    auto run = [&](double s) {
        // System wires 0..n-1, ancillas n..n+m-1 (least significant block).
        Statevector st;
        st.n = n + m;
        st.a.assign(size_t(1) << (n + m), Cplx(0.0, 0.0));
        for (int anc = 0; anc < (1 << m); ++anc) st.a[anc] = w.a[anc];
        int site_no = 0;
        for (size_t gi = 0; gi < circ.gates.size(); ++gi) {
            const Gate& g = circ.gates[gi];
            apply_gate(st, g, g.bind.angle(theta));
            if (site_no < m && sites[site_no] == gi) {
                auto [wires, paulis] = shift_detail::insertion_pauli(g);
                std::vector<int> tg = {n + site_no};
                tg.insert(tg.end(), wires.begin(), wires.end());
                apply_local(st, shift_detail::controlled_pauli(paulis, signs[site_no]), tg);
                ++site_no;
            }
        }
        for (int k = 0; k < m; ++k) {
            Cplx ph = std::exp(Cplx(0, s * alpha));
            size_t bit = size_t(1) << (m - 1 - k);
            for (size_t i = 0; i < st.a.size(); ++i)
                if (i & bit) st.a[i] *= ph;
        }
        // Unnormalized <+|^m projection of the ancilla block.
        Statevector sys;
        sys.n = n;
        sys.a.assign(size_t(1) << n, Cplx(0.0, 0.0));
        const double f = std::pow(2.0, -0.5 * m);
        for (size_t x = 0; x < sys.a.size(); ++x)
            for (int anc = 0; anc < (1 << m); ++anc) sys.a[x] += f * st.a[(x << m) | size_t(anc)];
        return inner(sys, apply_hamiltonian(h, sys)).real();
    };

    const double eminus = run(-1.0), eplus = run(1.0);
    const double kappa2 = std::pow(2.0, -m) / (m + 1);
    return common * (eminus - eplus) / (4.0 * kappa2 * std::sin(alpha));
}

}  // namespace zxwgrad
