#pragma once

// ZXW diagrams as tensor networks over explicit generators, evaluated to dense
// matrices. Wire 0 is the most significant bit of every basis-state index.

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "complexmat.hpp"

namespace zxwgrad {

enum class Gen {
    GreenBox,      // |0^m><0^n| + a |1^m><1^n|
    GreenSpider,   // GreenBox with a = e^{i phase}
    PinkSpider,    // 2^((n+m-2)/2) * RedSpider, phase in {0, pi}
    RedSpider,     // Hadamard-conjugated green spider
    Hadamard,      // 1 -> 1
    WBranch,       // 1 -> k: |0> -> |0..0>, |1> -> sum_j |e_j>; also the k -> 1 transpose
    Triangle,      // [[1,1],[0,1]]
    TriangleInverse,
    Cup,           // 0 -> 2
    Cap,           // 2 -> 0
    Swap,          // 2 -> 2
    Wire,          // 1 -> 1
    FunctionBox,   // 0/1 matrix with exactly one 1 per column
    DenseBox,      // opaque labelled box holding an arbitrary matrix
};

struct Node {
    Gen kind;
    int n_in = 0;
    int n_out = 0;
    Cplx amp = 1.0;            // GreenBox amplitude
    double phase = 0.0;        // spider phase
    std::vector<int> table;    // FunctionBox: table[input index] = output index
    Mat dense;                 // DenseBox payload
};

inline Node green_box(int n_in, int n_out, Cplx a) { return Node{Gen::GreenBox, n_in, n_out, a, 0.0, {}}; }
inline Node green_spider(int n_in, int n_out, double phase) { return Node{Gen::GreenSpider, n_in, n_out, 1.0, phase, {}}; }
inline Node red_spider(int n_in, int n_out, double phase) { return Node{Gen::RedSpider, n_in, n_out, 1.0, phase, {}}; }
inline Node pink_spider(int n_in, int n_out, double phase) { return Node{Gen::PinkSpider, n_in, n_out, 1.0, phase, {}}; }
inline Node hadamard() { return Node{Gen::Hadamard, 1, 1, 1.0, 0.0, {}}; }
inline Node w_branch(int n_in, int n_out) { return Node{Gen::WBranch, n_in, n_out, 1.0, 0.0, {}}; }
inline Node triangle() { return Node{Gen::Triangle, 1, 1, 1.0, 0.0, {}}; }
inline Node triangle_inverse() { return Node{Gen::TriangleInverse, 1, 1, 1.0, 0.0, {}}; }
inline Node cup() { return Node{Gen::Cup, 0, 2, 1.0, 0.0, {}}; }
inline Node cap() { return Node{Gen::Cap, 2, 0, 1.0, 0.0, {}}; }
inline Node swap_node() { return Node{Gen::Swap, 2, 2, 1.0, 0.0, {}}; }
inline Node wire_node() { return Node{Gen::Wire, 1, 1, 1.0, 0.0, {}}; }
inline Node function_box(int n_in, int n_out, std::vector<int> table) {
    return Node{Gen::FunctionBox, n_in, n_out, 1.0, 0.0, std::move(table), {}};
}
inline Node dense_box(int n_in, int n_out, Mat m) {
    if (m.rows != (1 << n_out) || m.cols != (1 << n_in))
        throw std::invalid_argument("dense_box: matrix shape does not match arity");
    Node n{Gen::DenseBox, n_in, n_out, 1.0, 0.0, {}, std::move(m)};
    return n;
}

// The defining dense matrix of one generator, 2^n_out x 2^n_in.
inline Mat generator_matrix(const Node& g) {
    const int n = g.n_in, m = g.n_out;
    const int rows = 1 << m, cols = 1 << n;
    auto box = [&](Cplx a) {
        Mat M(rows, cols);
        M(0, 0) += 1.0;
        M(rows - 1, cols - 1) += a;
        return M;
    };
    auto hpow = [&](int k) {
        Mat H(2, 2);
        const double s = 1.0 / std::sqrt(2.0);
        H(0, 0) = s; H(0, 1) = s; H(1, 0) = s; H(1, 1) = -s;
        Mat out = Mat::identity(1);
        for (int i = 0; i < k; ++i) out = kron(out, H);
        return out;
    };
    switch (g.kind) {
        case Gen::GreenBox: return box(g.amp);
        case Gen::GreenSpider: return box(std::exp(Cplx(0.0, g.phase)));
        case Gen::RedSpider: return hpow(m) * box(std::exp(Cplx(0.0, g.phase))) * hpow(n);
        case Gen::PinkSpider: {
            double p = std::fmod(std::abs(g.phase), 2.0 * kPi);
            if (std::min(p, std::abs(p - kPi)) > 1e-12 && std::abs(p - 2.0 * kPi) > 1e-12)
                throw std::invalid_argument("pink spider phase must be 0 or pi");
            Mat r = hpow(m) * box(std::exp(Cplx(0.0, g.phase))) * hpow(n);
            return r * Cplx(std::pow(2.0, 0.5 * (n + m - 2)), 0.0);
        }
        case Gen::Hadamard:
            if (n != 1 || m != 1) throw std::invalid_argument("Hadamard is 1->1");
            return hpow(1);
        case Gen::WBranch: {
            if (n == 1 && m >= 1) {
                Mat M(rows, 2);
                M(0, 0) = 1.0;
                for (int j = 0; j < m; ++j) M(1 << (m - 1 - j), 1) += 1.0;
                return M;
            }
            if (m == 1 && n >= 1) {  // input-legged transpose
                Mat M(2, cols);
                M(0, 0) = 1.0;
                for (int j = 0; j < n; ++j) M(1, 1 << (n - 1 - j)) += 1.0;
                return M;
            }
            throw std::invalid_argument("WBranch arity must be 1->k or k->1");
        }
        case Gen::Triangle: {
            if (n != 1 || m != 1) throw std::invalid_argument("Triangle is 1->1");
            Mat M(2, 2);
            M(0, 0) = 1.0; M(0, 1) = 1.0; M(1, 1) = 1.0;
            return M;
        }
        case Gen::TriangleInverse: {
            if (n != 1 || m != 1) throw std::invalid_argument("TriangleInverse is 1->1");
            Mat M(2, 2);
            M(0, 0) = 1.0; M(0, 1) = -1.0; M(1, 1) = 1.0;
            return M;
        }
        case Gen::Cup: {
            if (n != 0 || m != 2) throw std::invalid_argument("Cup is 0->2");
            Mat M(4, 1);
            M(0, 0) = 1.0; M(3, 0) = 1.0;
            return M;
        }
        case Gen::Cap: {
            if (n != 2 || m != 0) throw std::invalid_argument("Cap is 2->0");
            Mat M(1, 4);
            M(0, 0) = 1.0; M(0, 3) = 1.0;
            return M;
        }
        case Gen::Swap: {
            if (n != 2 || m != 2) throw std::invalid_argument("Swap is 2->2");
            Mat M(4, 4);
            M(0, 0) = 1.0; M(1, 2) = 1.0; M(2, 1) = 1.0; M(3, 3) = 1.0;
            return M;
        }
        case Gen::Wire:
            if (n != 1 || m != 1) throw std::invalid_argument("Wire is 1->1");
            return Mat::identity(2);
        case Gen::FunctionBox: {
            if (static_cast<int>(g.table.size()) != cols) throw std::invalid_argument("FunctionBox table size");
            Mat M(rows, cols);
            for (int c = 0; c < cols; ++c) {
                if (g.table[c] < 0 || g.table[c] >= rows) throw std::invalid_argument("FunctionBox table entry");
                M(g.table[c], c) = 1.0;
            }
            return M;
        }
        case Gen::DenseBox:
            if (g.dense.rows != rows || g.dense.cols != cols) throw std::invalid_argument("DenseBox shape");
            return g.dense;
    }
    throw std::logic_error("unreachable");
}

// A diagram: nodes plus a wiring where every port (node port or boundary port)
// carries exactly one edge id, and every edge id occurs exactly twice.
struct Diagram {
    std::vector<Node> nodes;
    std::vector<std::vector<int>> in_edges;   // per node, size n_in
    std::vector<std::vector<int>> out_edges;  // per node, size n_out
    std::vector<int> boundary_in;
    std::vector<int> boundary_out;
    Cplx scalar = 1.0;
    int next_edge = 0;

    int fresh_edge() { return next_edge++; }

    int add_node(Node n, std::vector<int> ins, std::vector<int> outs) {
        if (static_cast<int>(ins.size()) != n.n_in || static_cast<int>(outs.size()) != n.n_out)
            throw std::invalid_argument("add_node: port count mismatch");
        nodes.push_back(std::move(n));
        in_edges.push_back(std::move(ins));
        out_edges.push_back(std::move(outs));
        return static_cast<int>(nodes.size()) - 1;
    }

    int n_in() const { return static_cast<int>(boundary_in.size()); }
    int n_out() const { return static_cast<int>(boundary_out.size()); }

    void validate() const {
        std::map<int, int> uses;
        auto count = [&](const std::vector<int>& v) { for (int e : v) ++uses[e]; };
        for (size_t i = 0; i < nodes.size(); ++i) { count(in_edges[i]); count(out_edges[i]); }
        count(boundary_in);
        count(boundary_out);
        for (const auto& [e, c] : uses)
            if (c != 2) throw std::invalid_argument("edge " + std::to_string(e) + " used " + std::to_string(c) + " times");
    }
};

// Empty diagram (0 -> 0, scalar 1).
inline Diagram empty_diagram() { return Diagram{}; }

// n parallel wires.
inline Diagram wires(int n) {
    Diagram d;
    for (int i = 0; i < n; ++i) {
        int a = d.fresh_edge(), b = d.fresh_edge();
        d.add_node(wire_node(), {a}, {b});
        d.boundary_in.push_back(a);
        d.boundary_out.push_back(b);
    }
    return d;
}

// Single-generator diagram.
inline Diagram single(Node g) {
    Diagram d;
    std::vector<int> ins, outs;
    for (int i = 0; i < g.n_in; ++i) ins.push_back(d.fresh_edge());
    for (int i = 0; i < g.n_out; ++i) outs.push_back(d.fresh_edge());
    d.boundary_in = ins;
    d.boundary_out = outs;
    d.add_node(std::move(g), std::move(ins), std::move(outs));
    return d;
}

namespace detail {

inline void offset_edges(Diagram& d, int off) {
    for (auto& v : d.in_edges) for (int& e : v) e += off;
    for (auto& v : d.out_edges) for (int& e : v) e += off;
    for (int& e : d.boundary_in) e += off;
    for (int& e : d.boundary_out) e += off;
    d.next_edge += off;
}

// Ensure every boundary slot carries an id not shared with any other boundary
// slot, by splicing in explicit Wire nodes where needed.
inline void normalize_boundary(Diagram& d) {
    std::map<int, int> seen;
    auto fix = [&](std::vector<int>& bnd, bool is_input) {
        for (int& e : bnd) {
            if (seen.count(e)) {
                int a = d.fresh_edge();
                if (is_input)
                    d.add_node(wire_node(), {a}, {e});
                else
                    d.add_node(wire_node(), {e}, {a});
                e = a;
            }
            ++seen[e];
        }
    };
    fix(d.boundary_in, true);
    fix(d.boundary_out, false);
}

inline void replace_edge(Diagram& d, int from, int to) {
    for (auto& v : d.in_edges) for (int& e : v) if (e == from) e = to;
    for (auto& v : d.out_edges) for (int& e : v) if (e == from) e = to;
    for (int& e : d.boundary_in) if (e == from) e = to;
    for (int& e : d.boundary_out) if (e == from) e = to;
}

}  // namespace detail

// Parallel composition: d1 on the more significant wires.
inline Diagram compose_par(const Diagram& d1, const Diagram& d2) {
    Diagram out = d1;
    Diagram lo = d2;
    detail::offset_edges(lo, out.next_edge);
    size_t base = out.nodes.size();
    out.nodes.insert(out.nodes.end(), lo.nodes.begin(), lo.nodes.end());
    out.in_edges.insert(out.in_edges.end(), lo.in_edges.begin(), lo.in_edges.end());
    out.out_edges.insert(out.out_edges.end(), lo.out_edges.begin(), lo.out_edges.end());
    (void)base;
    out.boundary_in.insert(out.boundary_in.end(), lo.boundary_in.begin(), lo.boundary_in.end());
    out.boundary_out.insert(out.boundary_out.end(), lo.boundary_out.begin(), lo.boundary_out.end());
    out.scalar *= lo.scalar;
    out.next_edge = lo.next_edge;
    return out;
}

// Sequential composition, d1 first: evaluate(compose_seq(d1,d2)) = evaluate(d2) * evaluate(d1).
inline Diagram compose_seq(const Diagram& d1, const Diagram& d2) {
    if (d1.n_out() != d2.n_in()) throw std::invalid_argument("compose_seq: boundary arity mismatch");
    Diagram a = d1;
    detail::normalize_boundary(a);
    Diagram b = d2;
    detail::normalize_boundary(b);
    detail::offset_edges(b, a.next_edge);
    for (int j = 0; j < a.n_out(); ++j) detail::replace_edge(b, b.boundary_in[j], a.boundary_out[j]);
    Diagram out = a;
    out.nodes.insert(out.nodes.end(), b.nodes.begin(), b.nodes.end());
    out.in_edges.insert(out.in_edges.end(), b.in_edges.begin(), b.in_edges.end());
    out.out_edges.insert(out.out_edges.end(), b.out_edges.begin(), b.out_edges.end());
    out.boundary_out = b.boundary_out;
    out.scalar = a.scalar * b.scalar;
    out.next_edge = b.next_edge;
    return out;
}

// Complex conjugate of a diagram (entrywise conjugate of its matrix).
inline Diagram conjugate(const Diagram& d) {
    Diagram out = d;
    out.scalar = std::conj(out.scalar);
    for (auto& n : out.nodes) {
        switch (n.kind) {
            case Gen::GreenBox: n.amp = std::conj(n.amp); break;
            case Gen::GreenSpider:
            case Gen::RedSpider: n.phase = -n.phase; break;
            case Gen::PinkSpider: break;  // 0/pi pink spiders are real
            case Gen::DenseBox: n.dense = n.dense.conjugate(); break;
            default: break;               // remaining generators are real
        }
    }
    return out;
}

// Doubling: D(d) = d tensored with its conjugate (conjugate copy on the less
// significant wire block).
inline Diagram double_diagram(const Diagram& d) { return compose_par(d, conjugate(d)); }

namespace detail {

struct Tensor {
    std::vector<int> legs;  // edge ids, leg 0 = most significant bit
    std::vector<Cplx> data; // size 2^rank

    int rank() const { return static_cast<int>(legs.size()); }
};

inline Tensor tensor_of(const Node& g) {
    Mat M = generator_matrix(g);
    Tensor t;
    t.data.assign(M.a.begin(), M.a.end());
    return t;  // caller fills legs: [outs..., ins...]
}

// Sum over legs that occur twice inside one tensor (self-loops).
inline Tensor self_contract(Tensor t) {
    for (;;) {
        int p = -1, q = -1;
        for (int i = 0; i < t.rank() && p < 0; ++i)
            for (int j = i + 1; j < t.rank(); ++j)
                if (t.legs[i] == t.legs[j]) { p = i; q = j; break; }
        if (p < 0) return t;
        int r = t.rank();
        std::vector<int> legs;
        for (int i = 0; i < r; ++i)
            if (i != p && i != q) legs.push_back(t.legs[i]);
        std::vector<Cplx> data(size_t(1) << legs.size(), Cplx(0.0, 0.0));
        for (size_t idx = 0; idx < t.data.size(); ++idx) {
            int bp = (idx >> (r - 1 - p)) & 1, bq = (idx >> (r - 1 - q)) & 1;
            if (bp != bq) continue;
            size_t out = 0;
            for (int i = 0; i < r; ++i) {
                if (i == p || i == q) continue;
                out = (out << 1) | ((idx >> (r - 1 - i)) & 1);
            }
            data[out] += t.data[idx];
        }
        t.legs = std::move(legs);
        t.data = std::move(data);
    }
}

// Contract two tensors over all shared legs.
inline Tensor contract(const Tensor& A, const Tensor& B) {
    std::vector<int> shared;
    for (int e : A.legs)
        if (std::find(B.legs.begin(), B.legs.end(), e) != B.legs.end()) shared.push_back(e);
    std::vector<int> afree, bfree;
    for (int e : A.legs)
        if (std::find(shared.begin(), shared.end(), e) == shared.end()) afree.push_back(e);
    for (int e : B.legs)
        if (std::find(shared.begin(), shared.end(), e) == shared.end()) bfree.push_back(e);

    auto position = [](const Tensor& t, int e) {
        return static_cast<int>(std::find(t.legs.begin(), t.legs.end(), e) - t.legs.begin());
    };
    const int ra = A.rank(), rb = B.rank();
    const int na = static_cast<int>(afree.size()), nb = static_cast<int>(bfree.size());
    const int ns = static_cast<int>(shared.size());

    // Gather bit positions: output index = [afree..., bfree...], summed over shared.
    std::vector<int> apos_free, apos_shared, bpos_free, bpos_shared;
    for (int e : afree) apos_free.push_back(ra - 1 - position(A, e));
    for (int e : shared) apos_shared.push_back(ra - 1 - position(A, e));
    for (int e : bfree) bpos_free.push_back(rb - 1 - position(B, e));
    for (int e : shared) bpos_shared.push_back(rb - 1 - position(B, e));

    Tensor out;
    out.legs = afree;
    out.legs.insert(out.legs.end(), bfree.begin(), bfree.end());
    out.data.assign(size_t(1) << (na + nb), Cplx(0.0, 0.0));

    const size_t an = size_t(1) << na, bn = size_t(1) << nb, sn = size_t(1) << ns;
    for (size_t ia = 0; ia < an; ++ia) {
        size_t abase = 0;
        for (int i = 0; i < na; ++i)
            if ((ia >> (na - 1 - i)) & 1) abase |= size_t(1) << apos_free[i];
        for (size_t is = 0; is < sn; ++is) {
            size_t aidx = abase, bpart = 0;
            for (int i = 0; i < ns; ++i)
                if ((is >> (ns - 1 - i)) & 1) {
                    aidx |= size_t(1) << apos_shared[i];
                    bpart |= size_t(1) << bpos_shared[i];
                }
            Cplx av = A.data[aidx];
            if (av == Cplx(0.0, 0.0)) continue;
            for (size_t ib = 0; ib < bn; ++ib) {
                size_t bidx = bpart;
                for (int i = 0; i < nb; ++i)
                    if ((ib >> (nb - 1 - i)) & 1) bidx |= size_t(1) << bpos_free[i];
                out.data[(ia << nb) | ib] += av * B.data[bidx];
            }
        }
    }
    return out;
}

// Expand a >3-leg spider node into a caterpillar of <=3-leg spiders of the same
// colour; single-wire fusion makes this exact for green, red and pink alike.
inline bool expand_node(Diagram& d, size_t i) {
    const Node& g = d.nodes[i];
    if (g.kind != Gen::GreenBox && g.kind != Gen::GreenSpider && g.kind != Gen::RedSpider && g.kind != Gen::PinkSpider)
        return false;
    if (g.n_in + g.n_out <= 3) return false;
    struct Leg { int edge; bool input; };
    std::vector<Leg> legs;
    for (int k = 0; k < g.n_in; ++k) legs.push_back({d.in_edges[i][k], true});
    for (int k = 0; k < g.n_out; ++k) legs.push_back({d.out_edges[i][k], false});
    Gen kind = g.kind;
    Cplx amp = g.amp;
    double phase = g.phase;
    // Replace node i by a chain: head takes legs[0], legs[1]; middles take one
    // leg each; the tail carries the phase/amplitude.
    auto mk = [&](bool tail) {
        Node n;
        n.kind = kind;
        n.amp = tail ? amp : Cplx(1.0, 0.0);
        n.phase = tail ? phase : 0.0;
        if (kind == Gen::GreenSpider || kind == Gen::RedSpider || kind == Gen::PinkSpider) n.amp = 1.0;
        return n;
    };
    std::vector<Node> chain_nodes;
    std::vector<std::vector<int>> chain_in, chain_out;
    int carrier = d.fresh_edge();
    {
        Node h = mk(false);
        std::vector<int> ins, outs;
        for (int k = 0; k < 2; ++k)
            (legs[k].input ? ins : outs).push_back(legs[k].edge);
        outs.push_back(carrier);
        h.n_in = static_cast<int>(ins.size());
        h.n_out = static_cast<int>(outs.size());
        chain_nodes.push_back(h);
        chain_in.push_back(ins);
        chain_out.push_back(outs);
    }
    for (size_t k = 2; k < legs.size(); ++k) {
        bool tail = (k + 1 == legs.size());
        Node nd = mk(tail);
        std::vector<int> ins = {carrier}, outs;
        (legs[k].input ? ins : outs).push_back(legs[k].edge);
        if (!tail) {
            carrier = d.fresh_edge();
            outs.push_back(carrier);
        }
        nd.n_in = static_cast<int>(ins.size());
        nd.n_out = static_cast<int>(outs.size());
        chain_nodes.push_back(nd);
        chain_in.push_back(ins);
        chain_out.push_back(outs);
    }
    d.nodes.erase(d.nodes.begin() + i);
    d.in_edges.erase(d.in_edges.begin() + i);
    d.out_edges.erase(d.out_edges.begin() + i);
    for (size_t k = 0; k < chain_nodes.size(); ++k) {
        d.nodes.push_back(chain_nodes[k]);
        d.in_edges.push_back(chain_in[k]);
        d.out_edges.push_back(chain_out[k]);
    }
    return true;
}

}  // namespace detail

// Contract the network to its dense matrix (2^outputs x 2^inputs) times scalar.
inline Mat evaluate(const Diagram& input) {
    input.validate();
    Diagram d = input;
    detail::normalize_boundary(d);

    // Pink-spider tree expansion needs the 2^((n+m-2)/2) normalization to stay
    // exact, which the caterpillar provides; expand every big spider.
    for (size_t i = 0; i < d.nodes.size();)
        if (!detail::expand_node(d, i)) ++i;

    std::vector<detail::Tensor> ts;
    for (size_t i = 0; i < d.nodes.size(); ++i) {
        detail::Tensor t = detail::tensor_of(d.nodes[i]);
        t.legs = d.out_edges[i];
        t.legs.insert(t.legs.end(), d.in_edges[i].begin(), d.in_edges[i].end());
        ts.push_back(detail::self_contract(std::move(t)));
    }

    // Greedy pairwise contraction: pick the sharing pair with the smallest
    // resulting rank. Candidate pairs come from an edge-to-owners scan (an edge
    // is held by at most two tensors), keeping the step cost near-linear. Fine
    // at this scale (the accelerated schemes are not a goal).
    while (ts.size() > 1) {
        std::map<int, std::pair<int, int>> owners;
        for (size_t i = 0; i < ts.size(); ++i)
            for (int e : ts[i].legs) {
                auto it = owners.find(e);
                if (it == owners.end()) owners[e] = {static_cast<int>(i), -1};
                else it->second.second = static_cast<int>(i);
            }
        std::map<std::pair<int, int>, int> shared;
        for (const auto& [e, own] : owners)
            if (own.second >= 0) ++shared[own];
        int bi = -1, bj = -1, best = 1 << 30;
        for (const auto& [pr, s] : shared) {
            int r = ts[pr.first].rank() + ts[pr.second].rank() - 2 * s;
            if (r < best) { best = r; bi = pr.first; bj = pr.second; }
        }
        if (bi < 0) break;  // disconnected components remain
        detail::Tensor merged = detail::contract(ts[bi], ts[bj]);
        ts.erase(ts.begin() + bj);
        ts.erase(ts.begin() + bi);
        ts.push_back(detail::self_contract(std::move(merged)));
    }
    // Outer-product the disconnected remainder.
    detail::Tensor total;
    total.data = {Cplx(1.0, 0.0)};
    for (auto& t : ts) total = detail::contract(total, t);

    // Assemble the matrix: row bits from boundary_out (slot 0 = MSB), column
    // bits from boundary_in.
    const int no = d.n_out(), ni = d.n_in();
    if (total.rank() != no + ni) throw std::logic_error("evaluate: leftover legs");
    std::vector<int> want = d.boundary_out;
    want.insert(want.end(), d.boundary_in.begin(), d.boundary_in.end());
    std::vector<int> pos(want.size());
    for (size_t i = 0; i < want.size(); ++i) {
        auto it = std::find(total.legs.begin(), total.legs.end(), want[i]);
        if (it == total.legs.end()) throw std::logic_error("evaluate: boundary leg lost");
        pos[i] = total.rank() - 1 - static_cast<int>(it - total.legs.begin());
    }
    Mat M(1 << no, 1 << ni);
    const int r = total.rank();
    for (size_t out = 0; out < M.a.size(); ++out) {
        size_t idx = 0;
        for (int i = 0; i < r; ++i)
            if ((out >> (r - 1 - i)) & 1) idx |= size_t(1) << pos[i];
        M.a[out] = total.data[idx] * d.scalar;
    }
    return M;
}

// Tree of 1->2 W branches realizing WBranch 1->k via associativity.
inline Diagram w_tree(int k) {
    if (k < 1) throw std::invalid_argument("w_tree: k >= 1");
    if (k == 1) return wires(1);
    Diagram d = single(w_branch(1, 2));
    for (int have = 2; have < k; ++have) {
        Diagram step = compose_par(wires(have - 1), single(w_branch(1, 2)));
        d = compose_seq(d, step);
    }
    return d;
}

}  // namespace zxwgrad
