// Synthesize parameter-shift rules and cross-check them against the exact
// gradient of a small circuit.

#include <cstdio>
#include <random>

#include <zxwgrad/shift.hpp>

using namespace zxwgrad;

static void print_rule(const char* label, const ShiftRule& r) {
    std::printf("%s: scale %.6g\n", label, r.scale);
    for (const auto& t : r.terms)
        std::printf("  shift %+.12f  coeff %+.12f\n", t.shift, t.coeff);
}

int main() {
    for (int n = 1; n <= 4; ++n) {
        char label[32];
        std::snprintf(label, sizeof label, "equidistant, %d legs", n);
        print_rule(label, general_equidistant(n));
    }

    // Rules solved from raw eigenvalue data: CRZ-style half-integer pair.
    ShiftRule crz = solve_system({0.5, 1.0}, {kPi / 2, kPi});
    print_rule("solved for frequencies {1/2, 1}", crz);

    // Apply the two-term rule on a two-qubit circuit and compare paths.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    ParamCircuit c;
    c.qubits = 2;
    c.n_params = 1;
    c.gates.push_back(g_ry(0, {-1, 1.0, u(rng)}));
    c.gates.push_back(g_cnot(0, 1));
    c.gates.push_back(g_rz(1, {0, 1.0, 0.0}));
    c.gates.push_back(g_rx(0, {-1, 1.0, u(rng)}));
    auto h = parse_hamiltonian("0.9*ZZ - 0.6*XY + 0.4*IX");
    ShiftRule rz_rule = two_term(-0.5, 0.5);
    std::printf("\ntheta      rule           exact          fd(1e-5)\n");
    for (double theta : {-2.2, -0.4, 0.7, 1.9}) {
        double rule = apply_rule(rz_rule, c, {theta}, 0, h);
        double exact = grad_exact(c, {theta}, h, 0);
        double fd = grad_fd(c, {theta}, h, 1e-5)[0];
        std::printf("%+.2f  %+.12f %+.12f %+.12f\n", theta, rule, exact, fd);
    }

    // Every one-sided three-term system has complex coefficients.
    std::printf("\nno-go residual at (pi/2, pi, 3pi/2): %.6f\n",
                nogo_residual(kPi / 2, kPi, 3 * kPi / 2));
    return 0;
}
