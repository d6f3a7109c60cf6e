#include "vbcert/matrix.hpp"

#include <cassert>
#include <cmath>
#include <cstdio>

#include "vbcert/errors.hpp"

namespace vbcert {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(const Vector& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        assert(row.size() == c);
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

Vector Matrix::row(std::size_t i) const {
    return Vector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                  data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    assert(a.cols() == b.rows());
    Matrix c(a.rows(), b.cols());
    // i-k-j order, keeps the inner loop contiguous
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Vector operator*(const Matrix& a, const Vector& x) {
    assert(a.cols() == x.size());
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    assert(a.rows() == b.rows() && a.cols() == b.cols());
    Matrix c = a;
    for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] += b.data()[i];
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    assert(a.rows() == b.rows() && a.cols() == b.cols());
    Matrix c = a;
    for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] -= b.data()[i];
    return c;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix c = a;
    for (double& v : c.data()) v *= s;
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Matrix symmetrized(const Matrix& a) {
    assert(a.square());
    Matrix s(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
    return s;
}

Matrix outer(const Vector& u, const Vector& v) {
    Matrix m(u.size(), v.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
    return m;
}

double inf_norm(const Matrix& a) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

double max_abs(const Matrix& a) {
    double best = 0.0;
    for (double v : a.data()) best = std::max(best, std::abs(v));
    return best;
}

double max_asymmetry(const Matrix& a) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            best = std::max(best, std::abs(a(i, j) - a(j, i)));
    return best;
}

bool all_finite(const Matrix& a) {
    for (double v : a.data())
        if (!std::isfinite(v)) return false;
    return true;
}

Vector operator+(const Vector& a, const Vector& b) {
    assert(a.size() == b.size());
    Vector c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
    return c;
}

Vector operator-(const Vector& a, const Vector& b) {
    assert(a.size() == b.size());
    Vector c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b[i];
    return c;
}

Vector operator*(double s, const Vector& a) {
    Vector c = a;
    for (double& v : c) v *= s;
    return c;
}

double dot(const Vector& a, const Vector& b) {
    assert(a.size() == b.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double inf_norm(const Vector& a) {
    double best = 0.0;
    for (double v : a) best = std::max(best, std::abs(v));
    return best;
}

bool all_finite(const Vector& a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

std::string format_vector(const Vector& v) {
    std::string out = "(";
    char buf[32];
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.6g", v[i]);
        out += buf;
        if (i + 1 < v.size()) out += ", ";
    }
    out += ")";
    return out;
}

}  // namespace vbcert
