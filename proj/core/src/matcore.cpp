#include "mixtopo/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mixtopo/error.hpp"

namespace mixtopo {

namespace {

constexpr int kMaxSweeps = 80;

// 2x2 unitary block G = diag(1, e^{-i phi}) * [[c, s], [-s, c]] acting on
// columns (p, q). Applies X <- X G on the columns.
void rotate_columns(CMatrix& x, std::size_t p, std::size_t q, double c, double s, cplx ph) {
    // ph = e^{-i phi}
    for (std::size_t i = 0; i < x.dim(); ++i) {
        const cplx xp = x(i, p);
        const cplx xq = x(i, q);
        x(i, p) = c * xp - s * ph * xq;
        x(i, q) = s * xp + c * ph * xq;
    }
}

// X <- G^dag X on the rows.
void rotate_rows(CMatrix& x, std::size_t p, std::size_t q, double c, double s, cplx ph) {
    const cplx phc = std::conj(ph);
    for (std::size_t j = 0; j < x.dim(); ++j) {
        const cplx xp = x(p, j);
        const cplx xq = x(q, j);
        x(p, j) = c * xp - s * phc * xq;
        x(q, j) = s * xp + c * phc * xq;
    }
}

// Rotation zeroing the off-diagonal of [[alpha, |beta|], [|beta|, gamma]].
void jacobi_angle(double alpha, double gamma, double beta_abs, double& c, double& s) {
    const double tau = (gamma - alpha) / (2.0 * beta_abs);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    c = 1.0 / std::sqrt(1.0 + t * t);
    s = t * c;
}

double off_diagonal_norm(const CMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

void apply_phase_convention(CMatrix& v) {
    const std::size_t n = v.dim();
    for (std::size_t j = 0; j < n; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(v(i, j)));
        std::size_t pick = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(v(i, j)) >= m * (1.0 - 1e-10)) {
                pick = i;
                break;
            }
        }
        const cplx z = v(pick, j);
        if (std::abs(z) == 0.0) continue;
        const cplx ph = std::conj(z) / std::abs(z);
        for (std::size_t i = 0; i < n; ++i) v(i, j) *= ph;
        v(pick, j) = std::abs(v(pick, j));
    }
}

std::vector<std::size_t> descending_order(const std::vector<double>& vals) {
    std::vector<std::size_t> idx(vals.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
    return idx;
}

CMatrix permute_columns(const CMatrix& x, const std::vector<std::size_t>& order) {
    CMatrix r(x.dim());
    for (std::size_t j = 0; j < order.size(); ++j)
        for (std::size_t i = 0; i < x.dim(); ++i) r(i, j) = x(i, order[j]);
    return r;
}

// Removes from column j of u its components along columns 0..j-1 (two
// passes of modified Gram-Schmidt) and returns the residual norm.
double project_out(CMatrix& u, std::size_t j) {
    const std::size_t n = u.dim();
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < j; ++k) {
            cplx proj = 0.0;
            for (std::size_t i = 0; i < n; ++i) proj += std::conj(u(i, k)) * u(i, j);
            for (std::size_t i = 0; i < n; ++i) u(i, j) -= proj * u(i, k);
        }
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += std::norm(u(i, j));
    return std::sqrt(nrm);
}

// Orthonormalises the columns of u in order. Columns from first_unreliable
// on that have collapsed are completed with the standard basis vector whose
// residual is largest.
void orthonormalize(CMatrix& u, std::size_t first_unreliable) {
    const std::size_t n = u.dim();
    for (std::size_t j = 0; j < n; ++j) {
        double nrm = project_out(u, j);
        if (j >= first_unreliable && nrm < 0.5) {
            double best = -1.0;
            std::vector<cplx> best_col;
            for (std::size_t b = 0; b < n; ++b) {
                for (std::size_t i = 0; i < n; ++i) u(i, j) = (i == b) ? 1.0 : 0.0;
                const double r = project_out(u, j);
                if (r > best + 1e-12) {
                    best = r;
                    best_col = u.column(j);
                }
            }
            u.set_column(j, best_col);
            nrm = best;
        }
        for (std::size_t i = 0; i < n; ++i) u(i, j) /= nrm;
    }
}

}  // namespace

EigDecomposition herm_eig(const CMatrix& a) {
    if (!a.is_finite()) throw NonFiniteInput("herm_eig: non-finite entry");
    if (!a.is_hermitian(tol::input_check)) throw NonHermitianInput("herm_eig: input is not Hermitian");

    const std::size_t n = a.dim();
    CMatrix w = a;
    // Symmetrise so rounding noise in the input cannot bias the rotations.
    for (std::size_t i = 0; i < n; ++i) {
        w(i, i) = w(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx m = 0.5 * (w(i, j) + std::conj(w(j, i)));
            w(i, j) = m;
            w(j, i) = std::conj(m);
        }
    }
    CMatrix v = CMatrix::identity(n);
    const double scale = std::max(w.frobenius_norm(), std::numeric_limits<double>::min());

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_norm(w) <= 1e-16 * scale) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double b = std::abs(w(p, q));
                if (b <= 1e-300 || b <= 1e-18 * scale) {
                    w(p, q) = w(q, p) = 0.0;
                    continue;
                }
                const cplx ph = std::conj(w(p, q)) / b;  // e^{-i phi}
                double c = 0.0;
                double s = 0.0;
                jacobi_angle(w(p, p).real(), w(q, q).real(), b, c, s);
                rotate_columns(w, p, q, c, s, ph);
                rotate_rows(w, p, q, c, s, ph);
                w(p, q) = w(q, p) = 0.0;
                w(p, p) = w(p, p).real();
                w(q, q) = w(q, q).real();
                rotate_columns(v, p, q, c, s, ph);
            }
        }
    }

    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i) vals[i] = w(i, i).real();
    const auto order = descending_order(vals);
    EigDecomposition out;
    out.values.resize(n);
    for (std::size_t j = 0; j < n; ++j) out.values[j] = vals[order[j]];
    out.vectors = permute_columns(v, order);
    apply_phase_convention(out.vectors);
    return out;
}

SvdTriple svd(const CMatrix& a) {
    if (!a.is_finite()) throw NonFiniteInput("svd: non-finite entry");
    const std::size_t n = a.dim();
    CMatrix g = a;
    CMatrix v = CMatrix::identity(n);

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0;
                double beta = 0.0;
                cplx gamma = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    alpha += std::norm(g(i, p));
                    beta += std::norm(g(i, q));
                    gamma += std::conj(g(i, p)) * g(i, q);
                }
                const double gabs = std::abs(gamma);
                if (gabs == 0.0 || gabs <= 1e-15 * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const cplx ph = std::conj(gamma) / gabs;
                double c = 0.0;
                double s = 0.0;
                jacobi_angle(alpha, beta, gabs, c, s);
                rotate_columns(g, p, q, c, s, ph);
                rotate_columns(v, p, q, c, s, ph);
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sig(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += std::norm(g(i, j));
        sig[j] = std::sqrt(s);
    }
    const auto order = descending_order(sig);
    SvdTriple out;
    out.singulars.resize(n);
    for (std::size_t j = 0; j < n; ++j) out.singulars[j] = sig[order[j]];
    out.right = permute_columns(v, order);
    out.left = permute_columns(g, order);

    const double smax = n > 0 ? out.singulars[0] : 0.0;
    std::size_t first_unreliable = n;
    for (std::size_t j = 0; j < n; ++j) {
        const double sj = out.singulars[j];
        if (sj <= 1e-300 || sj <= 1e-14 * smax) {
            first_unreliable = std::min(first_unreliable, j);
            for (std::size_t i = 0; i < n; ++i) out.left(i, j) = 0.0;
        } else {
            for (std::size_t i = 0; i < n; ++i) out.left(i, j) /= sj;
        }
    }
    orthonormalize(out.left, first_unreliable);
    return out;
}

CMatrix sqrt_psd(const CMatrix& a) {
    const auto e = herm_eig(a);
    const std::size_t n = a.dim();
    const double scale = std::max(1.0, n > 0 ? e.values.front() : 0.0);
    std::vector<double> r(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double lam = e.values[j];
        if (lam < -tol::input_check * scale) throw NotPositive("sqrt_psd: negative eigenvalue");
        r[j] = lam > 0.0 ? std::sqrt(lam) : 0.0;
    }
    CMatrix s(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (r[k] == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const cplx vik = e.vectors(i, k) * r[k];
            for (std::size_t j = 0; j < n; ++j) s(i, j) += vik * std::conj(e.vectors(j, k));
        }
    }
    return s;
}

CMatrix unitary_polar(const CMatrix& a) {
    const auto t = svd(a);
    if (a.dim() == 0) return CMatrix{};
    const double smax = t.singulars.front();
    const double smin = t.singulars.back();
    if (!(smax > 0.0) || smin <= tol::invertible * smax) {
        throw RankDeficient("unitary_polar: matrix is (numerically) singular");
    }
    return t.left * t.right.adjoint();
}

double operator_norm(const CMatrix& a) {
    if (a.dim() == 0) return 0.0;
    return svd(a).singulars.front();
}

}  // namespace mixtopo
