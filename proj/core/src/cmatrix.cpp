#include "mixtopo/cmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "mixtopo/matcore.hpp"

namespace mixtopo {

CMatrix::CMatrix(std::size_t n, std::initializer_list<cplx> rows) : n_(n), a_(rows) {
    if (a_.size() != n * n) {
        throw std::invalid_argument("CMatrix: initializer has wrong number of entries");
    }
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::diagonal(std::span<const double> d) {
    CMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

CMatrix CMatrix::diagonal(std::span<const cplx> d) {
    CMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

std::vector<cplx> CMatrix::column(std::size_t j) const {
    std::vector<cplx> v(n_);
    for (std::size_t i = 0; i < n_; ++i) v[i] = (*this)(i, j);
    return v;
}

void CMatrix::set_column(std::size_t j, std::span<const cplx> v) {
    for (std::size_t i = 0; i < n_; ++i) (*this)(i, j) = v[i];
}

CMatrix CMatrix::adjoint() const {
    CMatrix r(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

cplx CMatrix::trace() const noexcept {
    cplx t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double CMatrix::frobenius_norm() const noexcept {
    double s = 0.0;
    for (const auto& z : a_) s += std::norm(z);
    return std::sqrt(s);
}

double CMatrix::max_abs() const noexcept {
    double m = 0.0;
    for (const auto& z : a_) m = std::max(m, std::abs(z));
    return m;
}

bool CMatrix::is_finite() const noexcept {
    return std::all_of(a_.begin(), a_.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

bool CMatrix::is_hermitian(double tol) const noexcept {
    const double scale = std::max(1.0, max_abs());
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i; j < n_; ++j)
            if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol * scale) return false;
    return true;
}

bool CMatrix::is_unitary(double tol) const {
    return distance(adjoint_times(*this, *this), identity(n_)) <= tol;
}

bool CMatrix::is_psd(double tol) const {
    if (!is_hermitian(tol)) return false;
    const auto e = herm_eig(*this);
    return e.values.empty() || e.values.back() >= -tol;
}

CMatrix& CMatrix::operator+=(const CMatrix& b) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += b.a_[i];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& b) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= b.a_[i];
    return *this;
}

CMatrix& CMatrix::operator*=(cplx s) noexcept {
    for (auto& z : a_) z *= s;
    return *this;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
CMatrix operator*(CMatrix a, cplx s) { return a *= s; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    const std::size_t n = a.dim();
    CMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const cplx aik = a(i, k);
            for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

CMatrix adjoint_times(const CMatrix& a, const CMatrix& b) {
    const std::size_t n = a.dim();
    CMatrix c(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            const cplx aki = std::conj(a(k, i));
            for (std::size_t j = 0; j < n; ++j) c(i, j) += aki * b(k, j);
        }
    return c;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

cplx det(const CMatrix& a) {
    const std::size_t n = a.dim();
    CMatrix lu = a;
    cplx d = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
        if (lu(piv, k) == cplx{0.0}) return 0.0;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
            d = -d;
        }
        d *= lu(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx f = lu(i, k) / lu(k, k);
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
        }
    }
    return d;
}

double distance(const CMatrix& a, const CMatrix& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) s += std::norm(a.data()[i] - b.data()[i]);
    return std::sqrt(s);
}

}  // namespace mixtopo
