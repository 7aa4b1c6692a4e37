#pragma once

// The rewrite-rule corpus of the calculus, checked semantically: every rule is
// instantiated as a pair of concrete diagrams (or a diagram and an explicit
// matrix) and both sides are contracted to dense matrices. No graph rewriting
// happens here; the point is numeric witness at small arities.

#include <functional>
#include <random>
#include <string>

#include "diagram.hpp"

namespace zxwgrad {

struct RuleResult {
    std::string name;
    bool pass = true;
    double max_dev = 0.0;
    int instances = 0;
};

namespace rules_detail {

struct Collector {
    std::vector<RuleResult>* out;
    double tol;

    RuleResult& entry(const std::string& name) {
        for (auto& r : *out)
            if (r.name == name) return r;
        out->push_back(RuleResult{name, true, 0.0, 0});
        return out->back();
    }

    void check(const std::string& name, const Diagram& lhs, const Diagram& rhs) {
        check_mat(name, lhs, evaluate(rhs));
    }

    void check_mat(const std::string& name, const Diagram& lhs, const Mat& rhs) {
        RuleResult& r = entry(name);
        double d = max_abs_diff(evaluate(lhs), rhs);
        r.max_dev = std::max(r.max_dev, d);
        r.pass = r.pass && d <= tol;
        ++r.instances;
    }
};

inline Diagram g_state(double phase) { return single(green_spider(0, 1, phase)); }
inline Diagram g_effect(double phase) { return single(green_spider(1, 0, phase)); }
inline Diagram p_state(bool one) { return single(pink_spider(0, 1, one ? kPi : 0.0)); }
inline Diagram p_effect(bool one) { return single(pink_spider(1, 0, one ? kPi : 0.0)); }
inline Diagram box_state(Cplx a) { return single(green_box(0, 1, a)); }

// Two boxes/spiders joined by k internal wires, legs split as n1->m1 / n2->m2.
inline Diagram fused_pair(const Node& top, const Node& bottom, int k) {
    Diagram d;
    std::vector<int> tin, tout, bin, bout, mid;
    for (int i = 0; i < top.n_in; ++i) tin.push_back(d.fresh_edge());
    for (int i = 0; i < top.n_out - k; ++i) tout.push_back(d.fresh_edge());
    for (int i = 0; i < k; ++i) mid.push_back(d.fresh_edge());
    for (int i = 0; i < bottom.n_in - k; ++i) bin.push_back(d.fresh_edge());
    for (int i = 0; i < bottom.n_out; ++i) bout.push_back(d.fresh_edge());
    std::vector<int> tout_all = tout;
    tout_all.insert(tout_all.end(), mid.begin(), mid.end());
    std::vector<int> bin_all = mid;
    bin_all.insert(bin_all.end(), bin.begin(), bin.end());
    d.add_node(top, tin, tout_all);
    d.add_node(bottom, bin_all, bout);
    d.boundary_in = tin;
    d.boundary_in.insert(d.boundary_in.end(), bin.begin(), bin.end());
    d.boundary_out = tout;
    d.boundary_out.insert(d.boundary_out.end(), bout.begin(), bout.end());
    return d;
}

}  // namespace rules_detail

// Runs every rule of the calculus figure plus the auxiliary lemma set at small
// arities (n, m <= 3), on a fixed phase grid plus `draws` random draws.
inline std::vector<RuleResult> rule_suite(double tol = 1e-10, int draws = 25, uint64_t seed = 20260815) {
    using namespace rules_detail;
    std::vector<RuleResult> report;
    Collector c{&report, tol};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uphase(-kPi, kPi);

    std::vector<double> phases = {0.0, kPi / 2, kPi, -kPi / 3, 1.0};
    for (int i = 0; i < draws; ++i) phases.push_back(uphase(rng));

    // (sf) green fusion over k >= 1 wires; boxes multiply, spider phases add.
    // Free legs on both nodes: top is n1 -> (f1 + k), bottom is (k + f2) -> m2.
    for (double a : phases)
        for (double b : {0.5, -1.1})
            for (int k = 1; k <= 3; ++k)
                for (int n1 : {0, 1, 2})
                    for (int f1 : {0, 1})
                        for (int f2 : {0, 1})
                            for (int m2 : {0, 1, 2}) {
                                Diagram lhs = fused_pair(green_spider(n1, f1 + k, a),
                                                         green_spider(k + f2, m2, b), k);
                                Diagram rhs = single(green_spider(n1 + f2, f1 + m2, a + b));
                                c.check("sf", lhs, rhs);
                                Cplx ba = std::exp(Cplx(0, a)), bb(0.4, 0.2);
                                Diagram blhs = fused_pair(green_box(n1, f1 + k, ba),
                                                          green_box(k + f2, m2, bb), k);
                                Diagram brhs = single(green_box(n1 + f2, f1 + m2, ba * bb));
                                c.check("sf", blhs, brhs);
                            }

    // (id) phase-free 1->1 spiders are plain wires.
    c.check("id", single(green_spider(1, 1, 0.0)), wires(1));
    c.check("id", single(green_box(1, 1, 1.0)), wires(1));
    c.check("id", single(red_spider(1, 1, 0.0)), wires(1));
    c.check("id", single(pink_spider(1, 1, 0.0)), wires(1));

    // (id') phase-free cups/caps of either colour are the plain cup/cap.
    c.check("id'", single(green_spider(0, 2, 0.0)), single(cup()));
    c.check("id'", single(green_spider(2, 0, 0.0)), single(cap()));
    c.check("id'", single(pink_spider(0, 2, 0.0)), single(cup()));
    c.check("id'", single(pink_spider(2, 0, 0.0)), single(cap()));

    // (b1) bialgebra between the green copy and the W multiplication.
    {
        Diagram lhs = compose_seq(single(w_branch(2, 1)), single(green_spider(1, 2, 0.0)));
        Diagram copies = compose_par(single(green_spider(1, 2, 0.0)), single(green_spider(1, 2, 0.0)));
        Diagram mid = compose_par(compose_par(wires(1), single(swap_node())), wires(1));
        Diagram mults = compose_par(single(w_branch(2, 1)), single(w_branch(2, 1)));
        Diagram rhs = compose_seq(compose_seq(copies, mid), mults);
        c.check("b1", lhs, rhs);
    }

    // (b2) boxes copy through W branches.
    for (double a : phases) {
        Cplx amp = std::exp(Cplx(0, a)) * 0.8;
        Diagram lhs = compose_seq(single(green_box(1, 1, amp)), single(w_branch(1, 2)));
        Diagram rhs = compose_seq(single(w_branch(1, 2)),
                                  compose_par(single(green_box(1, 1, amp)), single(green_box(1, 1, amp))));
        c.check("b2", lhs, rhs);
    }

    // (b3) W on |0> splits.
    c.check("b3", compose_seq(p_state(false), single(w_branch(1, 2))),
            compose_par(p_state(false), p_state(false)));

    // (ety) the pink dot is the empty diagram.
    c.check("ety", single(pink_spider(0, 0, 0.0)), empty_diagram());

    // (brk) discarding one W output with <0| leaves a wire.
    c.check("brk", compose_seq(single(w_branch(1, 2)), compose_par(wires(1), p_effect(false))), wires(1));
    c.check("brk", compose_seq(single(w_branch(1, 2)), compose_par(p_effect(false), wires(1))), wires(1));

    // (suc) Triangle |1> = |0> + |1>.
    c.check("suc", compose_seq(p_state(true), single(triangle())), g_state(0.0));

    // (zero) a zero box disconnects into |0> states and <0| effects.
    for (int n : {0, 1, 2})
        for (int m : {0, 1, 2}) {
            Diagram rhs = empty_diagram();
            for (int i = 0; i < n; ++i) rhs = compose_par(rhs, p_effect(false));
            Diagram outs = empty_diagram();
            for (int i = 0; i < m; ++i) outs = compose_par(outs, p_state(false));
            rhs = compose_par(rhs, outs);
            // fix boundary: effects consume inputs, states produce outputs
            c.check("zero", single(green_box(n, m, 0.0)), rhs);
        }

    // (tri1)/(tri2) triangle on |0> and under <1|.
    c.check("tri1", compose_seq(p_state(false), single(triangle())), p_state(false));
    c.check("tri2", compose_seq(single(triangle()), p_effect(true)), p_effect(true));

    // (inv) Triangle and its inverse cancel both ways.
    c.check("inv", compose_seq(single(triangle()), single(triangle_inverse())), wires(1));
    c.check("inv", compose_seq(single(triangle_inverse()), single(triangle())), wires(1));

    // (eu) Euler decomposition of the Hadamard.
    {
        Diagram rhs = compose_seq(compose_seq(single(green_spider(1, 1, kPi / 2)), single(red_spider(1, 1, kPi / 2))),
                                  single(green_spider(1, 1, kPi / 2)));
        rhs.scalar *= std::exp(Cplx(0, -kPi / 4));
        c.check("eu", single(hadamard()), rhs);
    }

    // (sym) W outputs are symmetric.
    c.check("sym", compose_seq(single(w_branch(1, 2)), single(swap_node())), single(w_branch(1, 2)));

    // (aso) W branching is associative.
    c.check("aso",
            compose_seq(single(w_branch(1, 2)), compose_par(single(w_branch(1, 2)), wires(1))),
            compose_seq(single(w_branch(1, 2)), compose_par(wires(1), single(w_branch(1, 2)))));

    // (pcy) plugging |1> into a box multiplies out onto all legs.
    for (double a : phases)
        for (int m : {0, 1, 2, 3}) {
            Cplx amp = std::exp(Cplx(0, a)) * 1.3;
            Diagram lhs = compose_seq(p_state(true), single(green_box(1, m, amp)));
            Diagram rhs = empty_diagram();
            for (int i = 0; i < m; ++i) rhs = compose_par(rhs, p_state(true));
            rhs.scalar *= amp;
            c.check("pcy", lhs, rhs);
        }

    // (wdc) plugging <1| into a W output disconnects: |0><1| as two generators.
    {
        Diagram lhs = compose_seq(single(w_branch(1, 2)), compose_par(wires(1), p_effect(true)));
        Diagram rhs;
        int i0 = rhs.fresh_edge(), o0 = rhs.fresh_edge();
        rhs.add_node(pink_spider(1, 0, kPi), {i0}, {});
        rhs.add_node(pink_spider(0, 1, 0.0), {}, {o0});
        rhs.boundary_in = {i0};
        rhs.boundary_out = {o0};
        c.check("wdc", lhs, rhs);
    }

    // ---- auxiliary lemmas ----

    // (hh) Hadamard involution.
    c.check("hh", compose_seq(single(hadamard()), single(hadamard())), wires(1));

    // (cc) colour change: pink = 2^{(n+m-2)/2} x Hadamard-conjugated green.
    for (double ph : {0.0, kPi})
        for (int n : {0, 1, 2})
            for (int m : {0, 1, 2}) {
                Diagram rhs = single(green_spider(n, m, ph));
                if (n > 0) {
                    Diagram hs = empty_diagram();
                    for (int j = 0; j < n; ++j) hs = compose_par(hs, single(hadamard()));
                    rhs = compose_seq(hs, rhs);
                }
                if (m > 0) {
                    Diagram hs = empty_diagram();
                    for (int j = 0; j < m; ++j) hs = compose_par(hs, single(hadamard()));
                    rhs = compose_seq(rhs, hs);
                }
                rhs.scalar *= std::pow(2.0, 0.5 * (n + m - 2));
                c.check("cc", single(pink_spider(n, m, ph)), rhs);
            }

    // (sf-pink) pink fusion gains 2^{k-1} over k connecting wires.
    for (double pa : {0.0, kPi})
        for (double pb : {0.0, kPi})
            for (int k = 1; k <= 3; ++k) {
                double sum = std::fmod(pa + pb, 2.0 * kPi);
                Diagram lhs = fused_pair(pink_spider(1, k, pa), pink_spider(k, 1, pb), k);
                Diagram rhs = single(pink_spider(1, 1, sum));
                rhs.scalar *= std::pow(2.0, k - 1);
                c.check("sf-pink", lhs, rhs);
            }

    // (box-zero) spider-flavoured restatement of (zero).
    c.check("box-zero", single(green_box(2, 1, 0.0)),
            compose_seq(compose_par(p_effect(false), p_effect(false)), p_state(false)));

    // (pink-decompose) pink spiders split over a single wire freely.
    for (double ph : {0.0, kPi})
        for (int n : {1, 2})
            for (int m : {1, 2}) {
                Diagram lhs = single(pink_spider(n, m, ph));
                Diagram rhs = compose_seq(single(pink_spider(n, 1, ph)), single(pink_spider(1, m, 0.0)));
                c.check("pink-decompose", lhs, rhs);
            }

    // (ho) green-pink Hopf law: copy then XOR disconnects.
    {
        Diagram lhs = compose_seq(single(green_spider(1, 2, 0.0)), single(pink_spider(2, 1, 0.0)));
        Diagram rhs;
        int i0 = rhs.fresh_edge(), o0 = rhs.fresh_edge();
        rhs.add_node(green_spider(1, 0, 0.0), {i0}, {});
        rhs.add_node(pink_spider(0, 1, 0.0), {}, {o0});
        rhs.boundary_in = {i0};
        rhs.boundary_out = {o0};
        c.check("ho", lhs, rhs);
    }

    // (sc) the scalar table.
    c.check_mat("sc", single(green_spider(0, 0, 0.0)), Mat::scalar(2.0));
    c.check_mat("sc", single(pink_spider(0, 0, 0.0)), Mat::scalar(1.0));
    c.check_mat("sc", single(green_spider(0, 0, kPi)), Mat::scalar(0.0));
    c.check_mat("sc", single(pink_spider(0, 0, kPi)), Mat::scalar(0.0));

    // (pi) pi-commutation through a green phase.
    for (double a : phases) {
        Diagram lhs = compose_seq(single(green_spider(1, 1, a)), single(pink_spider(1, 1, kPi)));
        Diagram rhs = compose_seq(single(pink_spider(1, 1, kPi)), single(green_spider(1, 1, -a)));
        rhs.scalar *= std::exp(Cplx(0, a));
        c.check("pi", lhs, rhs);
    }

    // (cp) pink basis states copy through the green spider.
    for (bool one : {false, true})
        c.check("cp", compose_seq(p_state(one), single(green_spider(1, 2, 0.0))),
                compose_par(p_state(one), p_state(one)));

    // (tri) the triangle's action on the remaining basis effects.
    c.check("tri", compose_seq(p_state(false), single(triangle())), p_state(false));
    c.check("tri", compose_seq(single(triangle()), p_effect(true)), p_effect(true));
    c.check("tri", compose_seq(single(triangle()), g_effect(kPi)), p_effect(false));

    // (tri-pi-transpose) bending the triangle equals conjugation by pink pi.
    {
        Diagram bent;
        int bin = bent.fresh_edge(), c1 = bent.fresh_edge(), c2 = bent.fresh_edge(), t_out = bent.fresh_edge();
        bent.add_node(cup(), {}, {c1, c2});
        bent.add_node(triangle(), {c1}, {t_out});
        bent.add_node(cap(), {t_out, bin}, {});
        bent.boundary_in = {bin};
        bent.boundary_out = {c2};
        Diagram rhs = compose_seq(compose_seq(single(pink_spider(1, 1, kPi)), single(triangle())),
                                  single(pink_spider(1, 1, kPi)));
        c.check("tri-pi-transpose", bent, rhs);
    }

    // (W2-act)/(w) W action on box states: |0...0> + a sum_j |e_j>.
    for (double a : phases) {
        Cplx amp = std::exp(Cplx(0, a)) * 0.7;
        for (int legs : {2, 3}) {
            Diagram lhs = compose_seq(box_state(amp), w_tree(legs));
            Mat expect(1 << legs, 1);
            expect(0, 0) = 1.0;
            for (int j = 0; j < legs; ++j) expect(1 << (legs - 1 - j), 0) += amp;
            c.check_mat(legs == 2 ? "W2-act" : "w", lhs, expect);
        }
    }

    // (W-plug-leg) plugging |0> into one input of the merging W.
    c.check("W-plug-leg", compose_seq(compose_par(p_state(false), wires(1)), single(w_branch(2, 1))), wires(1));
    c.check("W-plug-leg", compose_seq(compose_par(wires(1), p_state(false)), single(w_branch(2, 1))), wires(1));

    // (W2-add) box states add under the merging W.
    for (double a : phases) {
        Cplx x = std::exp(Cplx(0, a)) * 0.9, y = Cplx(0.3, -0.4);
        Diagram lhs = compose_seq(compose_par(box_state(x), box_state(y)), single(w_branch(2, 1)));
        c.check("W2-add", lhs, box_state(x + y));
    }

    // (W-add) three-fold version via the associativity tree.
    {
        Cplx x = 0.25, y = Cplx(0, 0.5), z = Cplx(-0.3, 0.1);
        Diagram merge3 = compose_seq(compose_par(single(w_branch(2, 1)), wires(1)), single(w_branch(2, 1)));
        Diagram lhs = compose_seq(compose_par(compose_par(box_state(x), box_state(y)), box_state(z)), merge3);
        c.check("W-add", lhs, box_state(x + y + z));
    }

    // (pi-cycle) phases slide around a cup.
    for (double a : phases) {
        Diagram lhs = compose_seq(single(cup()), compose_par(single(green_spider(1, 1, a)), wires(1)));
        Diagram rhs = compose_seq(single(cup()), compose_par(wires(1), single(green_spider(1, 1, a))));
        c.check("pi-cycle", lhs, rhs);
    }

    // (pi-connect) a green state meeting pink effects resolves to 1 or its amplitude.
    for (double a : phases) {
        Diagram lhs0 = compose_seq(box_state(std::exp(Cplx(0, a))), p_effect(false));
        Diagram lhs1 = compose_seq(box_state(std::exp(Cplx(0, a))), p_effect(true));
        c.check_mat("pi-connect", lhs0, Mat::scalar(1.0));
        c.check_mat("pi-connect", lhs1, Mat::scalar(std::exp(Cplx(0, a))));
    }

    // (pi-copy) the green pi state copies through pink spiders.
    for (int m : {2, 3}) {
        Diagram lhs = compose_seq(g_state(kPi), single(pink_spider(1, m, 0.0)));
        Diagram rhs = empty_diagram();
        for (int i = 0; i < m; ++i) rhs = compose_par(rhs, g_state(kPi));
        c.check("pi-copy", lhs, rhs);
    }

    // (hopf-had) green-green Hopf through Hadamard edges, scalar 1/2.
    {
        Diagram lhs = compose_seq(compose_seq(single(green_spider(1, 2, 0.0)),
                                              compose_par(single(hadamard()), single(hadamard()))),
                                  single(green_spider(2, 1, 0.0)));
        Diagram rhs;
        int i0 = rhs.fresh_edge(), o0 = rhs.fresh_edge();
        rhs.add_node(green_spider(1, 0, 0.0), {i0}, {});
        rhs.add_node(green_spider(0, 1, 0.0), {}, {o0});
        rhs.boundary_in = {i0};
        rhs.boundary_out = {o0};
        rhs.scalar = 0.5;
        c.check("hopf-had", lhs, rhs);
    }

    // (pauli-box-pi) pi phases of both colours anticommute and build the Paulis.
    {
        Diagram xz = compose_seq(single(green_spider(1, 1, kPi)), single(pink_spider(1, 1, kPi)));
        Diagram zx = compose_seq(single(pink_spider(1, 1, kPi)), single(green_spider(1, 1, kPi)));
        zx.scalar *= -1.0;
        c.check("pauli-box-pi", xz, zx);
        Diagram y = compose_seq(single(green_spider(1, 1, kPi)), single(pink_spider(1, 1, kPi)));
        y.scalar *= Cplx(0, 1);
        Mat ymat(2, 2);
        ymat(0, 1) = Cplx(0, -1);
        ymat(1, 0) = Cplx(0, 1);
        c.check_mat("pauli-box-pi", y, ymat);
    }

    return report;
}

}  // namespace zxwgrad
