#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mixtopo {

using cplx = std::complex<double>;

// Dense N x N complex matrix, row-major. Small N (2..16) is the design point;
// nothing here is blocked or vectorised.
class CMatrix {
public:
    CMatrix() = default;
    explicit CMatrix(std::size_t n) : n_(n), a_(n * n) {}
    // Row-major entries; size must be n*n.
    CMatrix(std::size_t n, std::initializer_list<cplx> rows);

    static CMatrix identity(std::size_t n);
    static CMatrix diagonal(std::span<const double> d);
    static CMatrix diagonal(std::span<const cplx> d);

    std::size_t dim() const noexcept { return n_; }

    cplx& operator()(std::size_t i, std::size_t j) noexcept { return a_[i * n_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * n_ + j]; }

    std::span<cplx> data() noexcept { return a_; }
    std::span<const cplx> data() const noexcept { return a_; }

    std::vector<cplx> column(std::size_t j) const;
    void set_column(std::size_t j, std::span<const cplx> v);

    CMatrix adjoint() const;
    cplx trace() const noexcept;
    double frobenius_norm() const noexcept;
    double max_abs() const noexcept;

    bool is_finite() const noexcept;
    // ||A - A^dag||_max <= tol * max(1, ||A||_max)
    bool is_hermitian(double tol) const noexcept;
    // ||A^dag A - 1||_F <= tol
    bool is_unitary(double tol) const;
    // Hermitian and smallest eigenvalue >= -tol.
    bool is_psd(double tol) const;

    CMatrix& operator+=(const CMatrix& b);
    CMatrix& operator-=(const CMatrix& b);
    CMatrix& operator*=(cplx s) noexcept;

    friend bool operator==(const CMatrix&, const CMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<cplx> a_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(cplx s, CMatrix a);
CMatrix operator*(CMatrix a, cplx s);

// A^dag B without forming the adjoint.
CMatrix adjoint_times(const CMatrix& a, const CMatrix& b);
CMatrix commutator(const CMatrix& a, const CMatrix& b);

// LU with partial pivoting.
cplx det(const CMatrix& a);

// ||A - B||_F
double distance(const CMatrix& a, const CMatrix& b);

}  // namespace mixtopo
