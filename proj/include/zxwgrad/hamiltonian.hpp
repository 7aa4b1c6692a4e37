#pragma once

// Pauli-string Hamiltonians: parsing, pattern expansion and dense forms.

#include <cctype>
#include <sstream>
#include <string>

#include "complexmat.hpp"

namespace zxwgrad {

struct PauliTerm {
    double coeff = 1.0;
    std::string paulis;  // over {I,X,Y,Z}, position 0 = wire 0 (most significant)
};

struct PauliHamiltonian {
    int n = 0;
    std::vector<PauliTerm> terms;
};

inline Mat pauli_matrix(char p) {
    Mat m(2, 2);
    switch (p) {
        case 'I': m(0, 0) = 1.0; m(1, 1) = 1.0; break;
        case 'X': m(0, 1) = 1.0; m(1, 0) = 1.0; break;
        case 'Y': m(0, 1) = Cplx(0, -1); m(1, 0) = Cplx(0, 1); break;
        case 'Z': m(0, 0) = 1.0; m(1, 1) = -1.0; break;
        default: throw std::invalid_argument(std::string("bad Pauli letter: ") + p);
    }
    return m;
}

inline Mat term_matrix(const PauliTerm& t) {
    Mat m = Mat::identity(1);
    for (char p : t.paulis) m = kron(m, pauli_matrix(p));
    return m * Cplx(t.coeff, 0.0);
}

inline Mat hamiltonian_matrix(const PauliHamiltonian& h) {
    Mat m(1 << h.n, 1 << h.n);
    for (const auto& t : h.terms) m = m + term_matrix(t);
    return m;
}

namespace ham_detail {

// One Pauli string, allowing grouped repetition: "ZZ", "(YX)^2", "Z(XY)^3".
inline std::string parse_pauli_string(const std::string& s, size_t& pos) {
    std::string out;
    auto is_pauli = [](char ch) { return ch == 'I' || ch == 'X' || ch == 'Y' || ch == 'Z'; };
    while (pos < s.size()) {
        char ch = s[pos];
        if (is_pauli(ch)) {
            out += ch;
            ++pos;
        } else if (ch == '(') {
            size_t close = s.find(')', pos);
            if (close == std::string::npos) throw std::invalid_argument("unbalanced '(' in Pauli string");
            std::string group = s.substr(pos + 1, close - pos - 1);
            for (char g : group)
                if (!is_pauli(g)) throw std::invalid_argument("bad token inside group: " + group);
            pos = close + 1;
            if (pos >= s.size() || s[pos] != '^') throw std::invalid_argument("group must be followed by ^count");
            ++pos;
            size_t end = pos;
            while (end < s.size() && std::isdigit(static_cast<unsigned char>(s[end]))) ++end;
            if (end == pos) throw std::invalid_argument("missing repetition count after ^");
            int reps = std::stoi(s.substr(pos, end - pos));
            pos = end;
            for (int r = 0; r < reps; ++r) out += group;
        } else {
            break;
        }
    }
    if (out.empty()) throw std::invalid_argument("empty Pauli string");
    return out;
}

}  // namespace ham_detail

// Accepts sums of terms "coeff*STRING" (coeff optional), e.g.
// "ZZZ", "0.5*XY + 0.5*YX", "(YX)^2", "1.5*Z(XY)^2". All strings must have
// uniform length.
inline PauliHamiltonian parse_hamiltonian(const std::string& text) {
    PauliHamiltonian h;
    std::string compact;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) compact += ch;
    if (compact.empty()) throw std::invalid_argument("empty Hamiltonian expression");

    size_t pos = 0;
    bool first = true;
    while (pos < compact.size()) {
        double sign = 1.0;
        if (compact[pos] == '+' || compact[pos] == '-') {
            if (compact[pos] == '-') sign = -1.0;
            ++pos;
        } else if (!first) {
            throw std::invalid_argument("missing term separator");
        }
        first = false;

        double coeff = 1.0;
        size_t numend = pos;
        while (numend < compact.size() &&
               (std::isdigit(static_cast<unsigned char>(compact[numend])) || compact[numend] == '.' ||
                compact[numend] == 'e' || compact[numend] == 'E' ||
                ((compact[numend] == '+' || compact[numend] == '-') && numend > pos &&
                 (compact[numend - 1] == 'e' || compact[numend - 1] == 'E'))))
            ++numend;
        if (numend < compact.size() && compact[numend] == '*' && numend > pos) {
            coeff = std::stod(compact.substr(pos, numend - pos));
            pos = numend + 1;
        }

        std::string str = ham_detail::parse_pauli_string(compact, pos);
        if (h.terms.empty())
            h.n = static_cast<int>(str.size());
        else if (static_cast<int>(str.size()) != h.n)
            throw std::invalid_argument("inconsistent Pauli string lengths");
        h.terms.push_back(PauliTerm{sign * coeff, str});
    }
    if (h.terms.empty()) throw std::invalid_argument("no terms parsed");
    return h;
}

// Expands the compact CLI patterns at a concrete qubit count:
//   "Z^n"       -> Z repeated n times
//   "(YX)^(n/2)" -> YX repeated n/2 times (requires even n)
// any other input is passed through to parse_hamiltonian unchanged.
inline PauliHamiltonian expand_h_pattern(const std::string& pattern, int n) {
    std::string compact;
    for (char ch : pattern)
        if (!std::isspace(static_cast<unsigned char>(ch))) compact += ch;
    auto repeat = [](const std::string& unit, int k) {
        std::string out;
        for (int i = 0; i < k; ++i) out += unit;
        return out;
    };
    if (compact.size() == 3 && compact[1] == '^' && compact[2] == 'n')
        return parse_hamiltonian(repeat(compact.substr(0, 1), n));
    size_t caret = compact.find(")^(");
    if (compact.size() > 1 && compact[0] == '(' && caret != std::string::npos &&
        compact.substr(caret) == ")^(n/2)") {
        if (n % 2 != 0) throw std::invalid_argument("pattern requires even n");
        std::string unit = compact.substr(1, caret - 1);
        return parse_hamiltonian(repeat(unit, n / 2));
    }
    PauliHamiltonian h = parse_hamiltonian(compact);
    if (h.n != n) throw std::invalid_argument("Hamiltonian length does not match qubit count");
    return h;
}

}  // namespace zxwgrad
