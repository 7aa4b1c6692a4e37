#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace zxwgrad {

using Cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Dense row-major complex matrix. Rows/cols are powers of two when the matrix
// represents a diagram (rows = 2^outputs, cols = 2^inputs), but the type itself
// does not insist on that.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<Cplx> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, Cplx(0.0, 0.0)) {}

    Cplx& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    const Cplx& operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Mat scalar(Cplx v) {
        Mat m(1, 1);
        m(0, 0) = v;
        return m;
    }

    Mat operator*(const Mat& o) const {
        if (cols != o.rows) throw std::invalid_argument("Mat multiply: shape mismatch");
        Mat out(rows, o.cols);
        for (int i = 0; i < rows; ++i)
            for (int k = 0; k < cols; ++k) {
                Cplx v = (*this)(i, k);
                if (v == Cplx(0.0, 0.0)) continue;
                for (int j = 0; j < o.cols; ++j) out(i, j) += v * o(k, j);
            }
        return out;
    }

    Mat operator+(const Mat& o) const {
        if (rows != o.rows || cols != o.cols) throw std::invalid_argument("Mat add: shape mismatch");
        Mat out = *this;
        for (size_t i = 0; i < a.size(); ++i) out.a[i] += o.a[i];
        return out;
    }

    Mat operator-(const Mat& o) const {
        if (rows != o.rows || cols != o.cols) throw std::invalid_argument("Mat sub: shape mismatch");
        Mat out = *this;
        for (size_t i = 0; i < a.size(); ++i) out.a[i] -= o.a[i];
        return out;
    }

    Mat operator*(Cplx v) const {
        Mat out = *this;
        for (auto& x : out.a) x *= v;
        return out;
    }

    Mat dagger() const {
        Mat out(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) out(j, i) = std::conj((*this)(i, j));
        return out;
    }

    Mat transpose() const {
        Mat out(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    Mat conjugate() const {
        Mat out = *this;
        for (auto& x : out.a) x = std::conj(x);
        return out;
    }

    Cplx trace() const {
        Cplx t = 0.0;
        for (int i = 0; i < std::min(rows, cols); ++i) t += (*this)(i, i);
        return t;
    }
};

inline Mat kron(const Mat& x, const Mat& y) {
    Mat out(x.rows * y.rows, x.cols * y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) {
            Cplx v = x(i, j);
            if (v == Cplx(0.0, 0.0)) continue;
            for (int k = 0; k < y.rows; ++k)
                for (int l = 0; l < y.cols; ++l)
                    out(i * y.rows + k, j * y.cols + l) = v * y(k, l);
        }
    return out;
}

inline double max_abs_diff(const Mat& x, const Mat& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("max_abs_diff: shape mismatch");
    double d = 0.0;
    for (size_t i = 0; i < x.a.size(); ++i) d = std::max(d, std::abs(x.a[i] - y.a[i]));
    return d;
}

inline double max_abs(const Mat& x) {
    double d = 0.0;
    for (const auto& v : x.a) d = std::max(d, std::abs(v));
    return d;
}

// Max-entry distance, optionally minimized over a unit phase fitted from the
// largest-magnitude entry of x.
inline double matrix_distance(const Mat& x, const Mat& y, bool up_to_global_phase) {
    if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("matrix_distance: shape mismatch");
    if (!up_to_global_phase) return max_abs_diff(x, y);
    size_t best = 0;
    double mag = -1.0;
    for (size_t i = 0; i < x.a.size(); ++i)
        if (std::abs(x.a[i]) > mag) { mag = std::abs(x.a[i]); best = i; }
    if (mag <= 0.0) return max_abs(y);
    Cplx phase = y.a[best] / x.a[best];
    double p = std::abs(phase);
    phase = (p > 0.0) ? phase / p : Cplx(1.0, 0.0);
    double d = 0.0;
    for (size_t i = 0; i < x.a.size(); ++i) d = std::max(d, std::abs(x.a[i] * phase - y.a[i]));
    return d;
}

inline bool check_equal(const Mat& x, const Mat& y, double tol = 1e-10, bool up_to_global_phase = false) {
    if (x.rows != y.rows || x.cols != y.cols) return false;
    return matrix_distance(x, y, up_to_global_phase) <= tol;
}

inline bool is_unitary(const Mat& u, double tol = 1e-10) {
    if (u.rows != u.cols) return false;
    return max_abs_diff(u.dagger() * u, Mat::identity(u.rows)) <= tol;
}

}  // namespace zxwgrad
