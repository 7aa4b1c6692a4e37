#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "zxwgrad/barren.hpp"

using namespace zxwgrad;

namespace {

std::vector<std::string> all_paulis(int n) {
    std::vector<std::string> out = {""};
    for (int j = 0; j < n; ++j) {
        std::vector<std::string> next;
        for (const auto& s : out)
            for (char p : {'I', 'X', 'Y', 'Z'}) next.push_back(s + p);
        out = std::move(next);
    }
    return out;
}

PauliHamiltonian single_term(const std::string& paulis, double coeff = 1.0) {
    PauliHamiltonian h;
    h.n = static_cast<int>(paulis.size());
    h.terms = {PauliTerm{coeff, paulis}};
    return h;
}

std::vector<double> random_theta(int count, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-kPi, kPi);
    std::vector<double> t(count);
    for (auto& x : t) x = u(rng);
    return t;
}

// Circuit where each parameter sits on exactly one bound gate, mixed with
// Clifford scaffolding and constant-angle gates.
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

}  // namespace

TEST_CASE("layer recurrence matches the closed forms exactly") {
    for (int layers = 1; layers <= 15; ++layers)
        for (int ke : {0, 1})
            for (int ko : {0, 1}) CHECK(v_recurrence(layers, ke, ko) == v_closed(layers, ke, ko));
    CHECK(v_recurrence(1, 0, 1) == rat(1, 2));
    CHECK(v_recurrence(1, 1, 0) == rat(0));
    CHECK(v_recurrence(4, 0, 0) == rat(0));
    CHECK(v_recurrence(2, 1, 1) == rat(1, 4));
    CHECK(v_recurrence(3, 0, 1) == rat(3, 8));
    CHECK(v_recurrence(4, 1, 0) == rat(5, 16));
    CHECK(std::abs(rat_value(v_recurrence(15, 0, 1)) - 1.0 / 3.0) < 1e-3);
    CHECK_THROWS_AS(v_recurrence(0, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(v_closed(3, 2, 0), std::invalid_argument);
}

TEST_CASE("rational helpers") {
    CHECK(rat(2, 4) == rat(1, 2));
    CHECK(rat(1, -2) == rat(-1, 2));
    CHECK(rat_half(rat(1, 2) - rat(1, 4)) == rat(1, 8));
    CHECK(rat_abs(rat(-3, 8)) == rat(3, 8));
    CHECK(rat_value(rat(5, 16)) == 0.3125);
    CHECK_THROWS_AS(rat(1, 0), std::invalid_argument);
}

TEST_CASE("single-layer hardware-efficient closed form") {
    CHECK(sim1_closed("ZZZZ", 0, 1) == Catch::Approx(1.0 / 16.0));
    CHECK(sim1_closed("ZZ", 0, 1) == Catch::Approx(0.25));
    CHECK(sim1_closed("IZ", 0, 1) == 0.0);
    CHECK(sim1_closed("ZZ", 0, 2) == 0.0);
    CHECK(sim1_closed("IZ", 0, 2) == 0.0);
    CHECK_THROWS_AS(sim1_closed("ZZ", 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(sim1_closed("ZZ", 0, 3), std::invalid_argument);
    CHECK_THROWS_AS(sim1_closed("ZA", 0, 1), std::invalid_argument);

    ParamCircuit c = build({Family::Sim1, 2, 1});
    for (const auto& s : all_paulis(2)) {
        PauliHamiltonian h = single_term(s);
        for (int p = 0; p < c.n_params; ++p) {
            double closed = sim1_closed(s, p / 2, 1 + p % 2);
            double quad = variance_quadrature(c, h, p);
            INFO(s << " param " << p);
            CHECK(std::abs(closed - quad) < 1e-9);
        }
    }

    ParamCircuit c3 = build({Family::Sim1, 3, 1});
    for (const auto& s : {"XYZ", "IZI", "YYY", "ZIX", "XXI", "ZZZ"}) {
        PauliHamiltonian h = single_term(s);
        for (int p : {0, 3, 5}) {
            double closed = sim1_closed(s, p / 2, 1 + p % 2);
            double quad = variance_quadrature(c3, h, p);
            INFO(s << " param " << p);
            CHECK(std::abs(closed - quad) < 1e-9);
        }
    }
}

TEST_CASE("single-layer IQP selection rule holds for every Pauli string") {
    for (int n : {1, 2, 3}) {
        ParamCircuit c = build({Family::IQP1, n, 1});
        for (const auto& s : all_paulis(n)) {
            double closed = iqp_closed(Family::IQP1, n, 1, s, 0);
            double quad = variance_quadrature(c, single_term(s), 0);
            INFO("n=" << n << " " << s);
            CHECK(std::abs(closed - quad) < 1e-9);
        }
    }
}

TEST_CASE("multilayer IQP closed form") {
    const double expected[] = {0.5, 0.25, 3.0 / 8.0, 5.0 / 16.0};
    for (int layers = 1; layers <= 4; ++layers) {
        ParamCircuit c = build({Family::IQP1, 3, layers});
        double closed = iqp_closed(Family::IQP1, 3, layers, "ZZZ", 0);
        double quad = variance_quadrature(c, single_term("ZZZ"), 0);
        INFO("layers " << layers);
        CHECK(closed == Catch::Approx(expected[layers - 1]));
        CHECK(std::abs(closed - quad) < 1e-9);
    }
    ParamCircuit c2 = build({Family::IQP1, 3, 2});
    for (const auto& s : {"XXX", "YYY", "ZZX", "XYI"}) {
        double closed = iqp_closed(Family::IQP1, 3, 2, s, 0);
        double quad = variance_quadrature(c2, single_term(s), 0);
        INFO(s);
        CHECK(std::abs(closed - quad) < 1e-9);
    }
    ParamCircuit c3 = build({Family::IQP1, 3, 3});
    for (const auto& s : {"YYY", "ZZI"}) {
        double closed = iqp_closed(Family::IQP1, 3, 3, s, 0);
        double quad = variance_quadrature(c3, single_term(s), 0);
        INFO(s);
        CHECK(std::abs(closed - quad) < 1e-9);
    }
    CHECK_THROWS_AS(iqp_closed(Family::IQP1, 3, 2, "ZZZ", 1), std::invalid_argument);
    CHECK_THROWS_AS(iqp_closed(Family::IQP1, 4, 2, "ZZZZ", 0), std::invalid_argument);
    CHECK_THROWS_AS(iqp_closed(Family::IQP1, 3, 1, "ZZZ", 1), std::invalid_argument);
}

TEST_CASE("remaining closed forms agree with the quadrature") {
    CHECK(iqp_closed(Family::IQP2, 4, 1, "YXYX", 0) == Catch::Approx(0.25));
    {
        ParamCircuit c = build({Family::IQP2, 4, 1});
        double quad = variance_quadrature(c, single_term("YXYX"), 0);
        CHECK(std::abs(quad - 0.25) < 1e-9);
        CHECK(std::abs(variance_quadrature(c, single_term("YXYX"), 1) - 0.25) < 1e-9);
    }
    CHECK_THROWS_AS(iqp_closed(Family::IQP2, 4, 1, "ZZZZ", 0), std::invalid_argument);
    CHECK_THROWS_AS(iqp_closed(Family::IQP2, 4, 2, "YXYX", 0), std::invalid_argument);

    CHECK(iqp_closed(Family::IQP3, 2, 1, "YX", 0) == Catch::Approx(0.25));
    // Odd registers tile the YX pattern in whole pairs and end in X.
    CHECK(iqp_closed(Family::IQP3, 3, 1, "YXX", 0) == 0.0);
    CHECK(iqp_closed(Family::IQP3, 5, 1, "YXYXX", 4) == 0.0);
    // Single gadgets sitting on an X wire have even Z-part parity.
    CHECK(iqp_closed(Family::IQP3, 4, 1, "YXYX", 2) == 0.0);
    CHECK(iqp_closed(Family::IQP3, 4, 1, "YXYX", 1) == Catch::Approx(1.0 / 16.0));
    {
        ParamCircuit c = build({Family::IQP3, 2, 1});
        CHECK(std::abs(variance_quadrature(c, single_term("YX"), 0) - 0.25) < 1e-9);
        ParamCircuit c3 = build({Family::IQP3, 3, 1});
        for (int p = 0; p < c3.n_params; ++p)
            CHECK(std::abs(variance_quadrature(c3, single_term("YXX"), p)) < 1e-12);
        ParamCircuit c4 = build({Family::IQP3, 4, 1});
        CHECK(std::abs(variance_quadrature(c4, single_term("YXYX"), 0, 3) - 1.0 / 16.0) < 1e-9);
        CHECK(std::abs(variance_quadrature(c4, single_term("YXYX"), 2, 3)) < 1e-12);
        ParamCircuit c5 = build({Family::IQP3, 5, 1});
        CHECK(std::abs(variance_quadrature(c5, single_term("YXYXX"), 4, 3)) < 1e-12);
        CHECK(std::abs(variance_quadrature(c5, single_term("YXYXX"), 0, 3)) < 1e-12);
    }
    CHECK_THROWS_AS(iqp_closed(Family::IQP3, 2, 1, "XX", 0), std::invalid_argument);
    CHECK_THROWS_AS(iqp_closed(Family::IQP3, 3, 1, "YXY", 0), std::invalid_argument);

    CHECK(iqp_closed(Family::IQP4, 3, 1, "ZZZ", 0) == Catch::Approx(0.25));
    CHECK(iqp_closed(Family::IQP4, 2, 1, "ZZ", 0) == Catch::Approx(0.5));
    {
        ParamCircuit c = build({Family::IQP4, 3, 1});
        CHECK(std::abs(variance_quadrature(c, single_term("ZZZ"), 0) - 0.25) < 1e-9);
        CHECK(std::abs(variance_quadrature(c, single_term("ZZZ"), 1) - 0.25) < 1e-9);
        ParamCircuit c4 = build({Family::IQP4, 4, 1});
        CHECK(std::abs(variance_quadrature(c4, single_term("ZZZZ"), 1) - 0.125) < 1e-9);
    }
    CHECK_THROWS_AS(iqp_closed(Family::IQP4, 3, 1, "ZZI", 0), std::invalid_argument);

    {
        ParamCircuit c6 = build({Family::IQP2, 6, 1});
        CHECK(iqp_closed(Family::IQP2, 6, 1, "YXYXYX", 1) == Catch::Approx(0.125));
        CHECK(std::abs(variance_quadrature(c6, single_term("YXYXYX"), 1, 3) - 0.125) < 1e-9);
        ParamCircuit in2 = intro_circuit(2);
        CHECK(std::abs(variance_quadrature(in2, single_term("XX"), 0, 3)) < 1e-12);
    }

    CHECK(iqp_closed(Family::Intro, 3, 1, "XXX", 0) == Catch::Approx(0.25));
    CHECK(iqp_closed(Family::Intro, 2, 1, "XX", 0) == 0.0);
    CHECK_THROWS_AS(iqp_closed(Family::Intro, 3, 1, "ZZZ", 0), std::invalid_argument);
    CHECK_THROWS_AS(iqp_closed(Family::Sim9, 3, 1, "ZZZ", 0), std::invalid_argument);
}

TEST_CASE("quadrature basics") {
    ParamCircuit c = intro_circuit(3);
    PauliHamiltonian h = single_term("XXX");
    CHECK(std::abs(variance_quadrature(c, h, 0) - 0.25) < 1e-9);
    CHECK(std::abs(variance_quadrature(c, h, 1) - 0.25) < 1e-9);

    // identity Hamiltonian has an exactly zero gradient
    CHECK(variance_quadrature(c, single_term("III"), 0) == 0.0);

    // three points already resolve frequency-one circuits
    double v3 = variance_quadrature(c, h, 0, 3);
    double v5 = variance_quadrature(c, h, 0, 5);
    CHECK(std::abs(v3 - v5) < 1e-12);

    ParamCircuit sim = build({Family::Sim1, 2, 1});
    CHECK(std::abs(variance_quadrature(sim, single_term("ZZ"), 0) - 0.25) < 1e-9);

    CHECK_THROWS_AS(variance_quadrature(c, h, 0, 5, 3), BudgetExceeded);
    CHECK_THROWS_AS(variance_quadrature(c, h, 9), std::invalid_argument);

    // doubled-frequency parameters fail the three-point audit
    ParamCircuit iqp4 = build({Family::IQP4, 3, 1});
    CHECK_THROWS_AS(variance_quadrature(iqp4, single_term("ZZZ"), 0, 3), std::invalid_argument);
    CHECK(variance_quadrature(iqp4, single_term("ZZZ"), 0, 5) > 0.0);

    // non-integer frequency is rejected
    ParamCircuit frac;
    frac.qubits = 1;
    frac.n_params = 1;
    frac.gates.push_back(g_rz(0, GateBinding{0, 0.5, 0.0}));
    CHECK_THROWS_AS(variance_quadrature(frac, single_term("X"), 0), std::invalid_argument);

    // a parameter the circuit never uses has zero variance
    ParamCircuit sparse;
    sparse.qubits = 1;
    sparse.n_params = 2;
    sparse.gates.push_back(g_rx(0, GateBinding{0, 1.0, 0.0}));
    CHECK(variance_quadrature(sparse, single_term("Z"), 1) == 0.0);

    // worker count does not change the bits
    double w1 = variance_quadrature(c, h, 0, 5, 10000000, 1);
    double w4 = variance_quadrature(c, h, 0, 5, 10000000, 4);
    CHECK(w1 == w4);
}

TEST_CASE("monte carlo estimator") {
    ParamCircuit c = build({Family::IQP2, 4, 1});
    PauliHamiltonian h = single_term("YXYX");
    McEstimate a = variance_mc(c, h, 0, 4000, 99);
    McEstimate b = variance_mc(c, h, 0, 4000, 99);
    CHECK(a.value == b.value);
    CHECK(a.std_err == b.std_err);
    McEstimate d = variance_mc(c, h, 0, 4000, 99, 4);
    CHECK(a.value == d.value);
    CHECK(std::abs(a.value - 0.25) <= 3.0 * a.std_err);
    CHECK(a.std_err > 0.0);

    McEstimate other = variance_mc(c, h, 0, 4000, 100);
    CHECK(a.value != other.value);

    McEstimate id = variance_mc(c, single_term("IIII"), 0, 100, 7);
    CHECK(id.value == 0.0);
    CHECK(id.std_err == 0.0);

    CHECK_THROWS_AS(variance_mc(c, h, 0, 1, 3), std::invalid_argument);
    CHECK_THROWS_AS(variance_mc(c, h, 8, 100, 3), std::invalid_argument);
}

TEST_CASE("monte carlo brackets the quadrature on random instances") {
    std::mt19937_64 rng(314159);
    for (int trial = 0; trial < 20; ++trial) {
        ParamCircuit c = random_single_occurrence(rng);
        PauliHamiltonian h = random_hamiltonian(c.qubits, rng);
        int param = std::uniform_int_distribution<int>(0, c.n_params - 1)(rng);
        double quad = variance_quadrature(c, h, param);
        McEstimate e = variance_mc(c, h, param, 3000, 1000 + trial);
        INFO("trial " << trial);
        CHECK(std::abs(e.value - quad) <= 3.0 * e.std_err + 1e-12);
    }
}

TEST_CASE("variance diagram matches the quadrature on the intro example") {
    ParamCircuit c = intro_circuit(3);
    PauliHamiltonian h = single_term("XXX");
    CHECK(std::abs(variance_diagram(c, h, 0) - 0.25) < 1e-9);
    CHECK(std::abs(variance_diagram(c, h, 1) - 0.25) < 1e-9);
}

TEST_CASE("variance diagram matches the quadrature on random circuits") {
    std::mt19937_64 rng(20260815);
    for (int trial = 0; trial < 20; ++trial) {
        ParamCircuit c = random_single_occurrence(rng);
        PauliHamiltonian h = random_hamiltonian(c.qubits, rng);
        int param = std::uniform_int_distribution<int>(0, c.n_params - 1)(rng);
        double dg = variance_diagram(c, h, param);
        double quad = variance_quadrature(c, h, param);
        INFO("trial " << trial << " n=" << c.qubits << " params=" << c.n_params << " d=" << param);
        CHECK(std::abs(dg - quad) < 1e-9);
    }
}

TEST_CASE("variance diagram rejects out-of-scope circuits") {
    // repeated parameter use
    ParamCircuit iqp4 = build({Family::IQP4, 3, 1});
    CHECK_THROWS_AS(variance_diagram(iqp4, single_term("ZZZ"), 0), std::invalid_argument);

    ParamCircuit crz;
    crz.qubits = 2;
    crz.n_params = 1;
    crz.gates.push_back(g_h(0));
    crz.gates.push_back(g_crz(0, 1, GateBinding{0, 1.0, 0.0}));
    CHECK_THROWS_AS(variance_diagram(crz, single_term("ZZ"), 0), std::invalid_argument);

    // fractional multiplier
    ParamCircuit frac;
    frac.qubits = 1;
    frac.n_params = 1;
    frac.gates.push_back(g_rz(0, GateBinding{0, 0.5, 0.0}));
    CHECK_THROWS_AS(variance_diagram(frac, single_term("X"), 0), std::invalid_argument);

    // unused parameter and identity Hamiltonian come out exactly zero
    ParamCircuit sparse;
    sparse.qubits = 1;
    sparse.n_params = 2;
    sparse.gates.push_back(g_rx(0, GateBinding{0, 1.0, 0.0}));
    CHECK(variance_diagram(sparse, single_term("Z"), 1) == 0.0);
    CHECK(variance_diagram(sparse, single_term("I"), 0) == 0.0);
    CHECK_THROWS_AS(variance_diagram(sparse, single_term("Z"), 5), std::invalid_argument);
}

TEST_CASE("single-layer IQP parameters share one variance") {
    struct Case {
        Family family;
        int n;
        std::string h;
    };
    for (const auto& [family, n, hs] : {Case{Family::IQP2, 4, "YXYX"},
                                        Case{Family::IQP3, 3, "YXY"},
                                        Case{Family::IQP4, 3, "ZZZ"}}) {
        ParamCircuit c = build({family, n, 1});
        PauliHamiltonian h = single_term(hs);
        std::vector<double> nonzero;
        for (int p = 0; p < c.n_params; ++p) {
            double v = variance_quadrature(c, h, p);
            if (v > 1e-12) nonzero.push_back(v);
        }
        REQUIRE(!nonzero.empty());
        for (double v : nonzero) CHECK(std::abs(v - nonzero[0]) < 1e-12);
    }
}

TEST_CASE("zero variance forces a vanishing gradient everywhere") {
    ParamCircuit c = build({Family::IQP1, 3, 1});
    PauliHamiltonian h = single_term("ZZI");
    CHECK(variance_quadrature(c, h, 0) < 1e-12);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> theta = random_theta(c.n_params, rng);
        CHECK(std::abs(grad_exact(c, theta, h, 0)) < 1e-10);
    }
}

TEST_CASE("circular-entangled ansatz obeys the variance bound") {
    for (int n = 2; n <= 6; ++n) {
        ParamCircuit c = build({Family::Sim9, n, 1});
        PauliHamiltonian h = single_term(std::string(n, 'Z'));
        const double bound = std::ldexp(1.0, -(n - 1)) + 1e-12;
        for (int p = 0; p < c.n_params; ++p) CHECK(variance_quadrature(c, h, p, 3) <= bound);
    }
}

TEST_CASE("sweep rows") {
    SweepSpec empty;
    CHECK(sweep(empty).empty());

    SweepSpec spec;
    spec.family = Family::Sim1;
    spec.ns = {2, 3};
    spec.h_pattern = "Z^n";
    spec.methods = {"closed_form", "quadrature", "diagram"};
    std::vector<VarianceReport> rows = sweep(spec);
    std::map<std::tuple<int, int, std::string>, double> val;
    for (const auto& r : rows) {
        CHECK(r.ansatz == "sim1");
        CHECK(r.skipped.empty());
        CHECK(r.value >= -1e-12);
        CHECK(r.exact);
        val[{r.n, r.param, r.method}] = r.value;
    }
    for (int n : {2, 3})
        for (int p = 0; p < 2 * n; ++p) {
            INFO("n=" << n << " param " << p);
            REQUIRE(val.count({n, p, "closed_form"}) == 1);
            CHECK(std::abs(val[{n, p, "closed_form"}] - val[{n, p, "quadrature"}]) < 1e-9);
            CHECK(std::abs(val[{n, p, "diagram"}] - val[{n, p, "quadrature"}]) < 1e-9);
        }
    // one extra qubit halves the variance
    CHECK(val[{3, 0, "closed_form"}] == Catch::Approx(0.5 * val[{2, 0, "closed_form"}]));

    // the full chain keeps halving out to n = 6
    SweepSpec chain;
    chain.family = Family::Sim1;
    chain.ns = {2, 3, 4, 5, 6};
    chain.h_pattern = "Z^n";
    chain.params = {0};
    chain.points = 3;
    chain.methods = {"closed_form", "quadrature"};
    std::vector<VarianceReport> ch = sweep(chain);
    REQUIRE(ch.size() == 10);
    for (size_t i = 0; i + 1 < ch.size(); i += 2) {
        CHECK(ch[i].method == "closed_form");
        CHECK(ch[i].value == Catch::Approx(std::ldexp(1.0, -ch[i].n)));
        CHECK(std::abs(ch[i].value - ch[i + 1].value) < 1e-9);
        if (i + 2 < ch.size()) CHECK(ch[i + 2].value == Catch::Approx(0.5 * ch[i].value));
    }

    SweepSpec iqp;
    iqp.family = Family::IQP1;
    iqp.ns = {3};
    iqp.layer_counts = {1, 2, 3, 4, 5, 6};
    iqp.h_pattern = "Z^n";
    iqp.params = {0};
    iqp.points = 3;
    iqp.methods = {"closed_form", "quadrature"};
    std::vector<VarianceReport> table = sweep(iqp);
    REQUIRE(table.size() == 12);
    const double vl[] = {0.5, 0.25, 3.0 / 8.0, 5.0 / 16.0,
                         rat_value(v_recurrence(5, 0, 1)), rat_value(v_recurrence(6, 1, 0))};
    for (int l = 0; l < 6; ++l) {
        INFO("layers " << l + 1);
        CHECK(table[2 * l].value == Catch::Approx(vl[l]));
        CHECK(std::abs(table[2 * l].value - table[2 * l + 1].value) < 1e-9);
    }

    SweepSpec skip;
    skip.family = Family::IQP4;
    skip.ns = {3};
    skip.h_pattern = "Z^n";
    skip.methods = {"diagram"};
    for (const auto& r : sweep(skip)) CHECK(r.skipped == "skipped:unsupported");
    skip.methods = {"quadrature"};
    skip.budget = 3;
    for (const auto& r : sweep(skip)) CHECK(r.skipped == "skipped:budget");

    SweepSpec mc;
    mc.family = Family::IQP2;
    mc.ns = {2};
    mc.h_pattern = "(YX)^(n/2)";
    mc.methods = {"monte_carlo"};
    mc.mc_samples = 500;
    mc.seed = 42;
    std::vector<VarianceReport> m1 = sweep(mc);
    std::vector<VarianceReport> m2 = sweep(mc);
    mc.workers = 3;
    std::vector<VarianceReport> m3 = sweep(mc);
    REQUIRE(m1.size() == m2.size());
    REQUIRE(m1.size() == m3.size());
    for (size_t i = 0; i < m1.size(); ++i) {
        CHECK_FALSE(m1[i].exact);
        CHECK(m1[i].value == m2[i].value);
        CHECK(m1[i].value == m3[i].value);
        CHECK(m1[i].std_err == m3[i].std_err);
    }

    SweepSpec bad = spec;
    bad.methods = {"psychic"};
    CHECK_THROWS_AS(sweep(bad), std::invalid_argument);
    bad = spec;
    bad.params = {99};
    CHECK_THROWS_AS(sweep(bad), std::invalid_argument);
}
