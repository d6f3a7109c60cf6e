#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace vbcert {

using Vector = std::vector<double>;

/// Dense row-major matrix. Everything in this project is desk scale, so
/// there is no view/expression machinery, just plain storage.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);
    static Matrix diagonal(const Vector& d);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const Vector& data() const { return data_; }
    Vector& data() { return data_; }

    Vector row(std::size_t i) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    Vector data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, const Vector& x);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix transpose(const Matrix& a);
Matrix symmetrized(const Matrix& a);  // (a + a^T)/2
Matrix outer(const Vector& u, const Vector& v);

double inf_norm(const Matrix& a);  // max absolute row sum
double max_abs(const Matrix& a);
double max_asymmetry(const Matrix& a);  // ||a - a^T||_maxabs
bool all_finite(const Matrix& a);

Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& a);
double dot(const Vector& a, const Vector& b);
double inf_norm(const Vector& a);
bool all_finite(const Vector& a);

std::string format_vector(const Vector& v);  // diagnostics only

}  // namespace vbcert
