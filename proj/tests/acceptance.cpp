// Release gate. Each criterion prints one PASS/FAIL line with its key
// numbers and wall time; the process exits non-zero if any line fails.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "zxwgrad/ansatz.hpp"
#include "zxwgrad/barren.hpp"
#include "zxwgrad/rules.hpp"
#include "zxwgrad/shift.hpp"

using namespace zxwgrad;

namespace {

int g_failures = 0;

std::string strf(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

template <class Fn>
void criterion(const char* name, double limit_s, Fn fn) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o = {false, strf("exception: %s", e.what())};
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = limit_s <= 0 || dt < limit_s;
    if (!(o.pass && in_time)) ++g_failures;
    std::string timing = limit_s > 0 ? strf("[%.1fs < %.0fs]", dt, limit_s) : strf("[%.1fs]", dt);
    std::printf("%s  %-26s %s  %s%s\n", o.pass && in_time ? "PASS" : "FAIL", name,
                o.detail.c_str(), timing.c_str(), in_time ? "" : " over time limit");
    std::fflush(stdout);
}

Mat random_unitary(int dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXcd a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = Cplx(u(rng), u(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    Eigen::MatrixXcd q = qr.householderQ();
    Mat out(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) out(i, j) = q(i, j);
    return out;
}

// Scaffold circuit with one parametrised gate in the middle.
ParamCircuit one_param_circuit(const Gate& pg, int qubits, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    ParamCircuit c;
    c.qubits = qubits;
    c.n_params = 1;
    for (int q = 0; q < qubits; ++q) c.gates.push_back(g_ry(q, {-1, 1.0, u(rng)}));
    for (int q = 0; q + 1 < qubits; ++q) c.gates.push_back(g_cnot(q, q + 1));
    c.gates.push_back(pg);
    for (int q = 0; q < qubits; ++q) c.gates.push_back(g_rx(q, {-1, 1.0, u(rng)}));
    return c;
}

PauliHamiltonian single_term(const std::string& paulis, double coeff = 1.0) {
    PauliHamiltonian h;
    h.n = static_cast<int>(paulis.size());
    h.terms = {PauliTerm{coeff, paulis}};
    return h;
}

// Circuit where each parameter sits on exactly one bound gate with an
// integer multiplier, mixed with Clifford scaffolding.
ParamCircuit random_single_occurrence(std::mt19937_64& rng) {
    const int n = std::uniform_int_distribution<int>(1, 3)(rng);
    const int np = std::uniform_int_distribution<int>(1, 4)(rng);
    ParamCircuit c;
    c.qubits = n;
    c.n_params = np;
    std::uniform_int_distribution<int> uq(0, n - 1);
    std::uniform_real_distribution<double> uo(-kPi, kPi);
    const double mults[3] = {1.0, -1.0, 2.0};
    auto scaffold = [&] {
        int r = std::uniform_int_distribution<int>(0, n == 1 ? 0 : 3)(rng);
        if (r == 0) {
            c.gates.push_back(g_h(uq(rng)));
            return;
        }
        int a = uq(rng), b = uq(rng);
        while (b == a) b = uq(rng);
        if (r == 1) c.gates.push_back(g_cnot(a, b));
        else if (r == 2) c.gates.push_back(g_cz(a, b));
        else c.gates.push_back(g_swap(a, b));
    };
    for (int p = 0; p < np; ++p) {
        scaffold();
        GateBinding b{p, mults[std::uniform_int_distribution<int>(0, 2)(rng)], uo(rng)};
        int kind = std::uniform_int_distribution<int>(0, n == 1 ? 4 : 5)(rng);
        if (kind == 0) c.gates.push_back(g_rz(uq(rng), b));
        else if (kind == 1) c.gates.push_back(g_rx(uq(rng), b));
        else if (kind == 2) c.gates.push_back(g_ry(uq(rng), b));
        else if (kind == 3) {
            std::vector<int> targets;
            for (int q = 0; q < n; ++q)
                if (targets.empty() || std::uniform_int_distribution<int>(0, 1)(rng)) targets.push_back(q);
            c.gates.push_back(g_phase_gadget(targets, b));
        } else if (kind == 4) {
            std::vector<int> targets;
            std::string paulis;
            for (int q = 0; q < n; ++q)
                if (targets.empty() || std::uniform_int_distribution<int>(0, 1)(rng)) {
                    targets.push_back(q);
                    paulis += "XYZ"[std::uniform_int_distribution<int>(0, 2)(rng)];
                }
            c.gates.push_back(g_pauli_exp(targets, paulis, b));
        } else {
            int a = uq(rng), t = uq(rng);
            while (t == a) t = uq(rng);
            c.gates.push_back(g_cu1(a, t, b));
        }
    }
    c.gates.push_back(g_rz(uq(rng), GateBinding{-1, 1.0, uo(rng)}));
    scaffold();
    return c;
}

PauliHamiltonian random_hamiltonian(int n, std::mt19937_64& rng) {
    PauliHamiltonian h;
    h.n = n;
    const int terms = std::uniform_int_distribution<int>(1, 2)(rng);
    std::uniform_real_distribution<double> uc(-1.0, 1.0);
    for (int t = 0; t < terms; ++t) {
        std::string s;
        for (int q = 0; q < n; ++q) s += "IXYZ"[std::uniform_int_distribution<int>(0, 3)(rng)];
        h.terms.push_back(PauliTerm{uc(rng), s});
    }
    return h;
}

Outcome zxw_rule_soundness() {
    auto res = rule_suite(1e-10, 25, 20260815);
    bool all = !res.empty();
    double maxdev = 0.0;
    for (const auto& r : res) {
        all = all && r.pass;
        maxdev = std::max(maxdev, r.max_dev);
    }
    return {all, strf("%zu identities at arities <= 3, max deviation %.2e", res.size(), maxdev)};
}

Outcome shift_rule_exactness() {
    std::mt19937_64 rng(20260815);
    std::uniform_real_distribution<double> th(-3.0, 3.0);
    bool spiders_ok = true;
    double worst_repr = 0.0, worst = 0.0;

    for (int n = 1; n <= 4; ++n) {
        const int q = n <= 1 ? 1 : (n <= 3 ? 2 : 3);
        const int dim = 1 << q;
        std::vector<double> vals;
        for (int k = 0; k <= n; ++k) vals.push_back(k);
        while (static_cast<int>(vals.size()) < dim)
            vals.push_back(std::uniform_int_distribution<int>(0, n)(rng));
        Mat v = random_unitary(dim, rng);
        Mat d(dim, dim);
        for (int i = 0; i < dim; ++i) d(i, i) = vals[i];
        auto g = eig_decompose(v * d * v.dagger());
        auto pd = repr_naive(g);
        spiders_ok = spiders_ok && static_cast<int>(pd.spiders.size()) == n;

        std::vector<int> targets;
        for (int j = 0; j < q; ++j) targets.push_back(j);
        ParamCircuit c = one_param_circuit(g_custom(targets, g, {0, 1.0, 0.0}), q, rng);
        PauliHamiltonian h = parse_hamiltonian(q == 1   ? "0.8*Z + 0.5*X"
                                               : q == 2 ? "0.9*ZZ - 0.6*XY + 0.4*IX"
                                                        : "0.6*ZZI - 0.8*IXX + 0.3*YIY");
        ShiftRule r = general_equidistant(n);
        for (int rep = 0; rep < 20; ++rep) {
            double theta = th(rng);
            worst_repr = std::max(worst_repr, max_abs_diff(evaluate(pd.at({theta})), exp_unitary(g, theta)));
            double want = grad_exact(c, {theta}, h, 0);
            worst = std::max(worst, std::abs(apply_rule(r, c, {theta}, 0, h) - want));
        }
    }

    struct Case {
        Gate gate;
        ShiftRule rule;
    };
    std::vector<Case> cases = {
        {g_rz(0, {0, 1.0, 0.0}), two_term(-0.5, 0.5)},
        {g_rx(1, {0, 1.0, 0.0}), two_term(-0.5, 0.5)},
        {g_ry(0, {0, 1.0, 0.0}), two_term(0.5, -0.5)},
        {g_cu1(0, 1, {0, 1.0, 0.0}), two_term(0.0, 1.0)},
        {g_crz(0, 1, {0, 1.0, 0.0}), four_term(0.5)},
    };
    PauliHamiltonian h2 = parse_hamiltonian("0.9*ZZ - 0.6*XY + 0.4*IX");
    for (auto& cs : cases) {
        ParamCircuit c = one_param_circuit(cs.gate, 2, rng);
        for (int rep = 0; rep < 20; ++rep) {
            double theta = th(rng);
            double want = grad_exact(c, {theta}, h2, 0);
            worst = std::max(worst, std::abs(apply_rule(cs.rule, c, {theta}, 0, h2) - want));
        }
    }
    bool pass = spiders_ok && worst_repr < 1e-8 && worst < 1e-8;
    return {pass, strf("spider counts %s, unitary dev %.1e, max gradient gap %.2e",
                       spiders_ok ? "ok" : "WRONG", worst_repr, worst)};
}

Outcome equidistant_coefficients() {
    double worst = 0.0;
    for (int n = 1; n <= 8; ++n) {
        ShiftRule eq = general_equidistant(n);
        std::vector<double> freqs, alphas;
        for (int k = 1; k <= n; ++k) freqs.push_back(k);
        for (int j = 1; j <= n; ++j) alphas.push_back(j * kPi / (n + 1));
        ShiftRule sv = solve_system(freqs, alphas);
        if (sv.terms.size() != eq.terms.size()) return {false, "term count mismatch"};
        for (size_t t = 0; t < eq.terms.size(); ++t) {
            worst = std::max(worst, std::abs(sv.terms[t].shift - eq.terms[t].shift));
            worst = std::max(worst, std::abs(sv.terms[t].coeff - eq.terms[t].coeff));
        }
    }
    ShiftRule r2 = general_equidistant(2);
    worst = std::max(worst, std::abs(r2.terms[0].coeff - std::sqrt(3.0) / 2));
    worst = std::max(worst, std::abs(r2.terms[2].coeff + std::sqrt(3.0) / 6));
    return {worst < 1e-10, strf("n <= 8 vs linear solve, max gap %.2e", worst)};
}

Outcome nogo_certificate() {
    std::mt19937_64 rng(20260815);
    std::uniform_real_distribution<double> u(0.1, 2 * kPi - 0.1);
    double min_res = 1e300;
    for (int count = 0; count < 1000;) {
        double a = u(rng), b = u(rng), g = u(rng);
        if (std::abs(a - b) < 1e-3 || std::abs(a - g) < 1e-3 || std::abs(b - g) < 1e-3) continue;
        min_res = std::min(min_res, nogo_residual(a, b, g));
        ++count;
    }
    return {min_res > 1e-6, strf("1000 triples, min |Im xi| = %.3e", min_res)};
}

Outcome ancilla_estimator() {
    Statevector w = ancilla_w_state(2);
    const double r3 = 1 / std::sqrt(3.0);
    double wdev = std::abs(w.a[3]);
    for (int i = 0; i < 3; ++i) wdev = std::max(wdev, std::abs(w.a[i] - Cplx(r3, 0)));

    double worst = 0.0;
    {
        auto h = parse_hamiltonian("0.7*ZZ + 0.5*XI - 0.4*YX");
        ParamCircuit c;
        c.qubits = 2;
        c.n_params = 1;
        c.gates.push_back(g_h(0));
        c.gates.push_back(g_rz(0, {0, 1.0, 0.0}));
        c.gates.push_back(g_cnot(0, 1));
        c.gates.push_back(g_rz(1, {0, 1.0, 0.0}));
        c.gates.push_back(g_h(1));
        for (double theta : {0.35, -1.2, 2.6}) {
            double want = grad_exact(c, {theta}, h)[0];
            worst = std::max(worst, std::abs(ancilla_gradient(c, 0, {theta}, h) - want));
        }
    }
    {
        std::mt19937_64 rng(20260815);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        auto h = parse_hamiltonian("0.6*ZZI - 0.8*IXX + 0.3*YIY + 0.2*IZI");
        for (int rep = 0; rep < 10; ++rep) {
            ParamCircuit c;
            c.qubits = 3;
            c.n_params = 1;
            int sites = 1 + static_cast<int>(rng() % 3);
            double sign = (rng() % 2) ? 1.0 : -1.0;
            for (int q = 0; q < 3; ++q) c.gates.push_back(g_ry(q, {-1, 1.0, u(rng)}));
            for (int s = 0; s < sites; ++s) {
                int q = static_cast<int>(rng() % 3);
                switch (rng() % 4) {
                    case 0: c.gates.push_back(g_rz(q, {0, sign, 0.0})); break;
                    case 1: c.gates.push_back(g_rx(q, {0, sign, 0.0})); break;
                    case 2: c.gates.push_back(g_ry(q, {0, sign, 0.0})); break;
                    case 3: c.gates.push_back(g_pauli_exp({0, 1, 2}, "ZIX", {0, sign, 0.0})); break;
                }
                c.gates.push_back(g_cnot(q, (q + 1) % 3));
                sign = -sign;
            }
            std::vector<double> theta = {u(rng)};
            double want = grad_exact(c, theta, h)[0];
            worst = std::max(worst, std::abs(ancilla_gradient(c, 0, theta, h) - want));
        }
    }
    return {wdev < 1e-12 && worst < 1e-9,
            strf("w-state dev %.1e, max gradient gap %.2e over 13 circuits", wdev, worst)};
}

Outcome variance_cross_method() {
    std::mt19937_64 rng(20260815);
    double worst = 0.0, worst_z = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        ParamCircuit c = random_single_occurrence(rng);
        PauliHamiltonian h = random_hamiltonian(c.qubits, rng);
        double vq0 = 0.0;
        for (int p = 0; p < c.n_params; ++p) {
            double vq = variance_quadrature(c, h, p);
            double vd = variance_diagram(c, h, p);
            worst = std::max(worst, std::abs(vq - vd));
            if (p == 0) vq0 = vq;
        }
        McEstimate mc = variance_mc(c, h, 0, 100000, 20260815 + rep);
        double diff = std::abs(mc.value - vq0);
        // Differences below 1e-12 are double-precision dust around a zero
        // variance, not statistical disagreement.
        double z = diff <= 1e-12 ? 0.0 : (mc.std_err > 0 ? diff / mc.std_err : 1e300);
        worst_z = std::max(worst_z, z);
    }
    return {worst < 1e-9 && worst_z <= 3.0,
            strf("20 circuits, max |quad - diagram| %.2e, max mc z-score %.2f", worst, worst_z)};
}

Outcome pinned_variance_values() {
    double worst = 0.0;  // |quadrature - closed form| across every pinned point
    double pin = 0.0;    // |closed form - pinned rational value|
    bool ok = true;

    for (int n : {3, 5}) {
        std::string xs(n, 'X');
        ParamCircuit c = intro_circuit(n);
        for (int p = 0; p < 2; ++p) {
            double closed = iqp_closed(Family::Intro, n, 1, xs, p);
            pin = std::max(pin, std::abs(closed - 0.25));
            worst = std::max(worst, std::abs(variance_quadrature(c, single_term(xs), p, 3) - closed));
        }
    }

    for (int n = 2; n <= 6; ++n) {
        std::string zn(n, 'Z');
        ParamCircuit c = build({Family::Sim1, n, 1});
        for (int p = 0; p < 2 * n; p += 2) {
            double closed = sim1_closed(zn, p / 2, 1);
            pin = std::max(pin, std::abs(closed - std::ldexp(1.0, -n)));
            worst = std::max(worst, std::abs(variance_quadrature(c, single_term(zn), p, 3) - closed));
        }
    }

    for (int n : {2, 4, 6}) {
        std::string yx = expand_h_pattern("(YX)^(n/2)", n).terms[0].paulis;
        ParamCircuit c = build({Family::IQP2, n, 1});
        for (int p = 0; p < n / 2; ++p) {
            double closed = iqp_closed(Family::IQP2, n, 1, yx, p);
            pin = std::max(pin, std::abs(closed - std::ldexp(1.0, -n / 2)));
            worst = std::max(worst, std::abs(variance_quadrature(c, single_term(yx), p, 3) - closed));
        }
    }

    for (int n : {2, 4}) {
        std::string yx = expand_h_pattern("(YX)^(n/2)", n).terms[0].paulis;
        ParamCircuit c = build({Family::IQP3, n, 1});
        pin = std::max(pin, std::abs(iqp_closed(Family::IQP3, n, 1, yx, 1) - std::ldexp(1.0, -n)));
        for (int p = 0; p < c.n_params; ++p) {
            double closed = iqp_closed(Family::IQP3, n, 1, yx, p);
            worst = std::max(worst, std::abs(variance_quadrature(c, single_term(yx), p, 3) - closed));
        }
    }
    for (int n : {3, 5}) {
        // YX tiles whole pairs, so the odd-width string ends in X.
        std::string hs = n == 3 ? "YXX" : "YXYXX";
        ParamCircuit c = build({Family::IQP3, n, 1});
        for (int p = 0; p < c.n_params; ++p) {
            double closed = iqp_closed(Family::IQP3, n, 1, hs, p);
            ok = ok && closed == 0.0;
            worst = std::max(worst, std::abs(variance_quadrature(c, single_term(hs), p, 3) - closed));
        }
    }

    bool refused = false;
    for (int n : {2, 3, 4}) {
        std::string zn(n, 'Z');
        ParamCircuit c = build({Family::IQP4, n, 1});
        for (int p = 0; p < n - 1; ++p) {
            double closed = iqp_closed(Family::IQP4, n, 1, zn, p);
            pin = std::max(pin, std::abs(closed - std::ldexp(1.0, -(n - 1))));
            // Each parameter drives two gadgets, so its frequency is 2.
            worst = std::max(worst, std::abs(variance_quadrature(c, single_term(zn), p, 5) - closed));
        }
        if (n == 3) {
            try {
                variance_diagram(c, single_term(zn), 0);
            } catch (const std::invalid_argument&) {
                refused = true;
            }
        }
    }

    const double table[4] = {0.5, 0.25, 0.375, 0.3125};
    for (int layers = 1; layers <= 4; ++layers) {
        double closed = iqp_closed(Family::IQP1, 3, layers, "ZZZ", 0);
        pin = std::max(pin, std::abs(closed - table[layers - 1]));
        ParamCircuit c = build({Family::IQP1, 3, layers});
        // One shared parameter across the layers, so its frequency is the
        // layer count and the grid needs 2*layers + 1 points.
        worst = std::max(worst, std::abs(
            variance_quadrature(c, single_term("ZZZ"), 0, 2 * layers + 1) - closed));
    }
    double v15 = std::abs(iqp_closed(Family::IQP1, 3, 15, "ZZZ", 0) - 1.0 / 3.0);

    ok = ok && worst < 1e-9 && pin < 1e-12 && refused && v15 < 1e-3;
    return {ok, strf("max |quad - closed| %.2e, pin gap %.1e, |v15 - 1/3| %.1e, refusal %s", worst,
                     pin, v15, refused ? "ok" : "MISSING")};
}

Outcome sim9_upper_bound() {
    double worst_excess = -1e300;
    for (int n = 2; n <= 6; ++n) {
        std::string zn(n, 'Z');
        ParamCircuit c = build({Family::Sim9, n, 1});
        double bound = std::ldexp(1.0, -(n - 1));
        for (int p = 0; p < c.n_params; ++p)
            worst_excess = std::max(worst_excess,
                                    variance_quadrature(c, single_term(zn), p, 3) - bound);
    }
    return {worst_excess <= 1e-12, strf("n = 2..6, max variance minus 1/2^(n-1) = %.2e", worst_excess)};
}

Outcome layer_recurrence() {
    int cases = 0;
    for (int layers = 1; layers <= 15; ++layers)
        for (int ke : {0, 1})
            for (int ko : {0, 1}) {
                if (v_recurrence(layers, ke, ko) != v_closed(layers, ke, ko))
                    return {false, strf("mismatch at layers=%d ke=%d ko=%d", layers, ke, ko)};
                ++cases;
            }
    return {true, strf("%d rational cases, exact equality", cases)};
}

Outcome sim1_n8_spot_check() {
    ParamCircuit c = build({Family::Sim1, 8, 1});
    McEstimate mc = variance_mc(c, single_term(std::string(8, 'Z')), 0, 100000, 20260815);
    double want = std::ldexp(1.0, -8);
    double z = mc.std_err > 0 ? std::abs(mc.value - want) / mc.std_err : 1e300;
    return {z <= 3.0, strf("mc %.3e vs 1/256, z-score %.2f", mc.value, z)};
}

}  // namespace

int main() {
    criterion("zxw-rule-soundness", 10, zxw_rule_soundness);
    criterion("shift-rule-exactness", 30, shift_rule_exactness);
    criterion("equidistant-coefficients", 0, equidistant_coefficients);
    criterion("no-go-certificate", 5, nogo_certificate);
    criterion("ancilla-estimator", 10, ancilla_estimator);
    criterion("variance-cross-method", 120, variance_cross_method);
    criterion("pinned-variance-values", 180, pinned_variance_values);
    criterion("sim9-upper-bound", 0, sim9_upper_bound);
    criterion("layer-recurrence", 0, layer_recurrence);
    criterion("sim1-n8-spot-check", 0, sim1_n8_spot_check);
    std::printf("acceptance: %d/10 criteria passed\n", 10 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
