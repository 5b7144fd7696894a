#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "quasispec/util.hpp"

namespace quasispec {

// ---------------------------------------------------------------------------
// Dense complex matrix, used by the dense oracle layer and small windows.
// ---------------------------------------------------------------------------
struct DenseC {
    int rows = 0, cols = 0;
    std::vector<cplx> a;

    DenseC() = default;
    DenseC(int r, int c) : rows(r), cols(c), a(std::size_t(r) * std::size_t(c), cplx(0.0)) {}

    cplx& operator()(int i, int j) { return a[std::size_t(i) * cols + j]; }
    const cplx& operator()(int i, int j) const { return a[std::size_t(i) * cols + j]; }

    static DenseC identity(int n) {
        DenseC m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    DenseC adjoint() const {
        DenseC m(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(j, i) = std::conj((*this)(i, j));
        return m;
    }

    friend DenseC operator*(const DenseC& x, const DenseC& y) {
        DenseC m(x.rows, y.cols);
        for (int i = 0; i < x.rows; ++i)
            for (int k = 0; k < x.cols; ++k) {
                cplx v = x(i, k);
                if (v == cplx(0.0)) continue;
                for (int j = 0; j < y.cols; ++j) m(i, j) += v * y(k, j);
            }
        return m;
    }

    double max_abs_diff(const DenseC& o) const {
        double d = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - o.a[k]));
        return d;
    }
};

// ---------------------------------------------------------------------------
// Dense LU with partial pivoting: determinant, solve, inverse.
// ---------------------------------------------------------------------------
struct DenseLU {
    DenseC lu;
    std::vector<int> piv;
    int sign = 1;
    bool singular = false;

    explicit DenseLU(DenseC m) : lu(std::move(m)) {
        int n = lu.rows;
        piv.resize(std::size_t(n));
        std::iota(piv.begin(), piv.end(), 0);
        for (int k = 0; k < n; ++k) {
            int p = k;
            double best = std::abs(lu(k, k));
            for (int i = k + 1; i < n; ++i)
                if (std::abs(lu(i, k)) > best) {
                    best = std::abs(lu(i, k));
                    p = i;
                }
            if (best == 0.0) {
                singular = true;
                continue;
            }
            if (p != k) {
                for (int j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
                std::swap(piv[std::size_t(k)], piv[std::size_t(p)]);
                sign = -sign;
            }
            for (int i = k + 1; i < n; ++i) {
                cplx f = lu(i, k) / lu(k, k);
                lu(i, k) = f;
                for (int j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
            }
        }
    }

    cplx det() const {
        if (singular) return 0.0;
        cplx d = double(sign);
        for (int i = 0; i < lu.rows; ++i) d *= lu(i, i);
        return d;
    }

    ScaledComplex det_scaled() const {
        if (singular) return ScaledComplex(cplx(0.0));
        ScaledComplex d(cplx(double(sign), 0.0));
        for (int i = 0; i < lu.rows; ++i) d = d * ScaledComplex(lu(i, i));
        return d;
    }

    std::vector<cplx> solve(const std::vector<cplx>& b) const {
        int n = lu.rows;
        std::vector<cplx> x(std::size_t(n));
        for (int i = 0; i < n; ++i) x[std::size_t(i)] = b[std::size_t(piv[std::size_t(i)])];
        for (int i = 1; i < n; ++i)
            for (int j = 0; j < i; ++j) x[std::size_t(i)] -= lu(i, j) * x[std::size_t(j)];
        for (int i = n - 1; i >= 0; --i) {
            for (int j = i + 1; j < n; ++j) x[std::size_t(i)] -= lu(i, j) * x[std::size_t(j)];
            x[std::size_t(i)] /= lu(i, i);
        }
        return x;
    }

    DenseC inverse() const {
        int n = lu.rows;
        DenseC inv(n, n);
        std::vector<cplx> e(std::size_t(n));
        for (int j = 0; j < n; ++j) {
            std::fill(e.begin(), e.end(), cplx(0.0));
            e[std::size_t(j)] = 1.0;
            auto col = solve(e);
            for (int i = 0; i < n; ++i) inv(i, j) = col[std::size_t(i)];
        }
        return inv;
    }
};

// ---------------------------------------------------------------------------
// Dense Hermitian eigensolver by cyclic complex Jacobi rotations.  This is
// the oracle against which the banded path is checked, so it stays dense and
// simple on purpose.
// ---------------------------------------------------------------------------
struct HermitianEigen {
    std::vector<double> values;  // ascending
    DenseC vectors;              // columns are orthonormal eigenvectors
};

inline HermitianEigen jacobi_hermitian_eigen(DenseC A, bool want_vectors = true,
                                             int max_sweeps = 60) {
    int n = A.rows;
    DenseC V = DenseC::identity(n);
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(A(i, j)));
    if (scale == 0.0) scale = 1.0;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(A(p, q)));
        if (off < 1e-15 * scale) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                cplx apq = A(p, q);
                if (std::abs(apq) < 1e-18 * scale) continue;
                double app = A(p, p).real();
                double aqq = A(q, q).real();
                double ab = std::abs(apq);
                cplx u = apq / ab;
                double tau = (aqq - app) / (2.0 * ab);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                cplx s = t * c * u;

                // rows p,q  (left multiply by G^H with G = [[c, s],[-conj(s), c]])
                for (int j = 0; j < n; ++j) {
                    cplx xp = A(p, j), xq = A(q, j);
                    A(p, j) = c * xp - s * xq;
                    A(q, j) = std::conj(s) * xp + c * xq;
                }
                // columns p,q (right multiply by G)
                for (int i = 0; i < n; ++i) {
                    cplx xp = A(i, p), xq = A(i, q);
                    A(i, p) = c * xp - std::conj(s) * xq;
                    A(i, q) = s * xp + c * xq;
                }
                A(p, q) = std::conj(A(q, p));  // keep exactly Hermitian
                A(p, p) = A(p, p).real();
                A(q, q) = A(q, q).real();
                if (want_vectors) {
                    for (int i = 0; i < n; ++i) {
                        cplx xp = V(i, p), xq = V(i, q);
                        V(i, p) = c * xp - std::conj(s) * xq;
                        V(i, q) = s * xp + c * xq;
                    }
                }
            }
        }
    }

    HermitianEigen out;
    out.values.resize(std::size_t(n));
    std::vector<int> order(std::size_t(n));
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < n; ++i) out.values[std::size_t(i)] = A(i, i).real();
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return out.values[std::size_t(i)] < out.values[std::size_t(j)]; });
    std::sort(out.values.begin(), out.values.end());
    if (want_vectors) {
        out.vectors = DenseC(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) out.vectors(i, j) = V(i, order[std::size_t(j)]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hermitian banded storage (lower bands): band(d)[c] = A(c+d, c), d = 0..kd.
// ---------------------------------------------------------------------------
struct BandedHermitian {
    int n = 0, kd = 0;
    std::vector<cplx> ab;  // (kd+1) x n, ab[d * n + c]

    BandedHermitian() = default;
    BandedHermitian(int n_, int kd_) : n(n_), kd(kd_), ab(std::size_t(kd_ + 1) * n_, cplx(0.0)) {}

    cplx& at(int r, int c) { return ab[std::size_t(r - c) * n + c]; }  // r >= c, r-c <= kd
    const cplx& at(int r, int c) const { return ab[std::size_t(r - c) * n + c]; }

    cplx get(int r, int c) const {  // any (r,c)
        if (r < c) return std::conj(get(c, r));
        if (r - c > kd) return cplx(0.0);
        return at(r, c);
    }

    DenseC to_dense() const {
        DenseC m(n, n);
        for (int c = 0; c < n; ++c)
            for (int d = 0; d <= kd && c + d < n; ++d) {
                m(c + d, c) = at(c + d, c);
                m(c, c + d) = std::conj(at(c + d, c));
            }
        return m;
    }
};

// Real symmetric tridiagonal form (unitary congruence of the banded matrix).
struct SymTridiagonal {
    std::vector<double> diag;
    std::vector<double> off;  // size n-1

    int n() const { return int(diag.size()); }

    // Sturm count: number of eigenvalues strictly below x.  The guarded
    // pivot recurrence is the standard monotone counter.
    int count_below(double x) const {
        int nn = n();
        double maxe2 = 1.0;
        for (double e : off) maxe2 = std::max(maxe2, e * e);
        const double pivmin = 1e-292 * maxe2;
        int cnt = 0;
        double t = diag[0] - x;
        if (std::fabs(t) < pivmin) t = -pivmin;
        if (t < 0) ++cnt;
        for (int i = 1; i < nn; ++i) {
            t = diag[std::size_t(i)] - x - off[std::size_t(i - 1)] * off[std::size_t(i - 1)] / t;
            if (std::fabs(t) < pivmin) t = -pivmin;
            if (t < 0) ++cnt;
        }
        return cnt;
    }

    double gershgorin_lo() const {
        double lo = std::numeric_limits<double>::infinity();
        int nn = n();
        for (int i = 0; i < nn; ++i) {
            double r = (i > 0 ? std::fabs(off[std::size_t(i - 1)]) : 0.0) +
                       (i + 1 < nn ? std::fabs(off[std::size_t(i)]) : 0.0);
            lo = std::min(lo, diag[std::size_t(i)] - r);
        }
        return lo;
    }
    double gershgorin_hi() const {
        double hi = -std::numeric_limits<double>::infinity();
        int nn = n();
        for (int i = 0; i < nn; ++i) {
            double r = (i > 0 ? std::fabs(off[std::size_t(i - 1)]) : 0.0) +
                       (i + 1 < nn ? std::fabs(off[std::size_t(i)]) : 0.0);
            hi = std::max(hi, diag[std::size_t(i)] + r);
        }
        return hi;
    }

    // all eigenvalues in [lo,hi] to absolute accuracy tol, with multiplicity
    // read off count jumps at resolution tol
    struct Cluster {
        double value;
        int multiplicity;
    };
    std::vector<Cluster> eigenvalues_in(double lo, double hi, double tol) const {
        std::vector<Cluster> out;
        struct Box {
            double lo, hi;
            int clo, chi;
        };
        std::vector<Box> stack{{lo, hi, count_below(lo), count_below(hi)}};
        while (!stack.empty()) {
            Box b = stack.back();
            stack.pop_back();
            if (b.chi == b.clo) continue;
            if (b.hi - b.lo <= tol) {
                out.push_back({0.5 * (b.lo + b.hi), b.chi - b.clo});
                continue;
            }
            double mid = 0.5 * (b.lo + b.hi);
            int cm = count_below(mid);
            stack.push_back({mid, b.hi, cm, b.chi});
            stack.push_back({b.lo, mid, b.clo, cm});
        }
        std::sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& c) { return a.value < c.value; });
        return out;
    }

    // all eigenvalues by root-free QL/QR with implicit shifts
    std::vector<double> eigenvalues_ql() const {
        std::vector<double> d = diag;
        std::vector<double> e = off;
        e.push_back(0.0);
        int nn = n();
        for (int l = 0; l < nn; ++l) {
            int iter = 0;
            int m;
            do {
                for (m = l; m < nn - 1; ++m) {
                    double dd = std::fabs(d[std::size_t(m)]) + std::fabs(d[std::size_t(m + 1)]);
                    if (std::fabs(e[std::size_t(m)]) <= 1e-16 * dd) break;
                }
                if (m != l) {
                    if (iter++ == 80) throw std::runtime_error("tridiagonal QL failed to converge");
                    double g = (d[std::size_t(l + 1)] - d[std::size_t(l)]) / (2.0 * e[std::size_t(l)]);
                    double r = std::hypot(g, 1.0);
                    g = d[std::size_t(m)] - d[std::size_t(l)] +
                        e[std::size_t(l)] / (g + std::copysign(r, g));
                    double s = 1.0, c = 1.0, p = 0.0;
                    for (int i = m - 1; i >= l; --i) {
                        double f = s * e[std::size_t(i)];
                        double b = c * e[std::size_t(i)];
                        r = std::hypot(f, g);
                        e[std::size_t(i + 1)] = r;
                        if (r == 0.0) {
                            d[std::size_t(i + 1)] -= p;
                            e[std::size_t(m)] = 0.0;
                            break;
                        }
                        s = f / r;
                        c = g / r;
                        g = d[std::size_t(i + 1)] - p;
                        r = (d[std::size_t(i)] - g) * s + 2.0 * c * b;
                        p = s * r;
                        d[std::size_t(i + 1)] = g + p;
                        g = c * r - b;
                    }
                    if (r == 0.0 && m - 1 >= l) continue;
                    d[std::size_t(l)] -= p;
                    e[std::size_t(l)] = g;
                    e[std::size_t(m)] = 0.0;
                }
            } while (m != l);
        }
        std::sort(d.begin(), d.end());
        return d;
    }

    // eigenvector by inverse iteration at eigenvalue estimate lambda
    std::vector<double> eigenvector(double lambda, Rng rng) const {
        int nn = n();
        std::vector<double> x(std::size_t(nn));
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        for (int pass = 0; pass < 3; ++pass) {
            solve_shifted(lambda, x);
            double nrm = 0.0;
            for (double v : x) nrm += v * v;
            nrm = std::sqrt(nrm);
            for (auto& v : x) v /= nrm;
        }
        return x;
    }

    // (T - lambda) y = rhs in place, tridiagonal LU with partial pivoting
    void solve_shifted(double lambda, std::vector<double>& rhs) const {
        int nn = n();
        std::vector<double> a(std::size_t(nn)), b(std::size_t(nn - 1)), c2(std::size_t(nn)),
            cl(std::size_t(nn - 1));
        for (int i = 0; i < nn; ++i) a[std::size_t(i)] = diag[std::size_t(i)] - lambda;
        for (int i = 0; i + 1 < nn; ++i) b[std::size_t(i)] = off[std::size_t(i)];
        // rows: a[i] x_i + b[i] x_{i+1} (+ fill c2[i] x_{i+2}); sub-diagonal cl
        std::fill(c2.begin(), c2.end(), 0.0);
        for (int i = 0; i + 1 < nn; ++i) cl[std::size_t(i)] = off[std::size_t(i)];
        const double tiny = 1e-280;
        for (int k = 0; k + 1 < nn; ++k) {
            double diag_k = a[std::size_t(k)];
            double sub_k = cl[std::size_t(k)];
            if (std::fabs(sub_k) > std::fabs(diag_k)) {
                std::swap(a[std::size_t(k)], cl[std::size_t(k)]);
                double bk = b[std::size_t(k)];
                b[std::size_t(k)] = a[std::size_t(k + 1)];
                a[std::size_t(k + 1)] = bk;
                if (k + 2 < nn) {
                    c2[std::size_t(k)] = b[std::size_t(k + 1)];
                    b[std::size_t(k + 1)] = 0.0;
                }
                std::swap(rhs[std::size_t(k)], rhs[std::size_t(k + 1)]);
            }
            double piv = a[std::size_t(k)];
            if (std::fabs(piv) < tiny) piv = (piv < 0 ? -tiny : tiny), a[std::size_t(k)] = piv;
            double f = cl[std::size_t(k)] / piv;
            a[std::size_t(k + 1)] -= f * b[std::size_t(k)];
            if (k + 2 < nn) b[std::size_t(k + 1)] -= f * c2[std::size_t(k)];
            rhs[std::size_t(k + 1)] -= f * rhs[std::size_t(k)];
        }
        if (std::fabs(a[std::size_t(nn - 1)]) < tiny)
            a[std::size_t(nn - 1)] = (a[std::size_t(nn - 1)] < 0 ? -tiny : tiny);
        for (int i = nn - 1; i >= 0; --i) {
            double s = rhs[std::size_t(i)];
            if (i + 1 < nn) s -= b[std::size_t(i)] * rhs[std::size_t(i + 1)];
            if (i + 2 < nn) s -= c2[std::size_t(i)] * rhs[std::size_t(i + 2)];
            rhs[std::size_t(i)] = s / a[std::size_t(i)];
        }
    }
};

// ---------------------------------------------------------------------------
// Unitary reduction of a Hermitian banded matrix (kd <= 2) to real symmetric
// tridiagonal form: Givens rotations with bulge chasing, then a diagonal
// phase rotation making the off-diagonal real.
// ---------------------------------------------------------------------------
inline SymTridiagonal band_to_tridiagonal(BandedHermitian A) {
    const int n = A.n;
    if (A.kd > 2) throw std::invalid_argument("band_to_tridiagonal: supports kd <= 2");

    if (A.kd == 2 && n > 2) {
        for (int j = 0; j <= n - 3; ++j) {
            // eliminate A(j+2, j), then chase the bulge down
            bool first = true;
            cplx bulge(0.0);
            for (int p = j + 1; p + 1 <= n - 1; p += 2) {
                const int q = p + 1;
                const int cc = first ? j : p - 2;  // column holding the pair to rotate
                cplx x = A.at(p, cc);
                cplx y = first ? A.at(q, cc) : bulge;
                first = false;
                double ax = std::abs(x), ay = std::abs(y);
                if (ay == 0.0) break;
                double r = std::hypot(ax, ay);
                double c;
                cplx s;
                if (ax == 0.0) {
                    c = 0.0;
                    s = cplx(1.0, 0.0);
                } else {
                    c = ax / r;
                    s = x * std::conj(y) / (r * ax);
                }
                // pair in column cc
                A.at(p, cc) = c * x + s * y;
                if (cc == p - 1)
                    A.at(q, cc) = 0.0;
                // pair in column p-1 (only when the zeroed pair sat in column p-2)
                if (cc == p - 2) {
                    cplx xp = A.at(p, p - 1), xq = A.at(q, p - 1);
                    A.at(p, p - 1) = c * xp + s * xq;
                    A.at(q, p - 1) = -std::conj(s) * xp + c * xq;
                }
                // 2x2 diagonal block
                {
                    cplx app = A.at(p, p), aqp = A.at(q, p), aqq = A.at(q, q);
                    cplx gp1 = c * app + s * aqp;                  // (GA)(p,p)
                    cplx gp2 = c * std::conj(aqp) + s * aqq;       // (GA)(p,q)
                    cplx gq1 = -std::conj(s) * app + c * aqp;      // (GA)(q,p)
                    cplx gq2 = -std::conj(s) * std::conj(aqp) + c * aqq;
                    A.at(p, p) = (gp1 * c + gp2 * std::conj(s)).real();
                    A.at(q, p) = gq1 * c + gq2 * std::conj(s);
                    A.at(q, q) = (-gq1 * s + gq2 * c).real();
                }
                // pairs in rows below: r = q+1 in band, r = q+2 spawns the bulge
                if (q + 1 <= n - 1) {
                    cplx xp = A.at(q + 1, p), xq = A.at(q + 1, q);
                    A.at(q + 1, p) = c * xp + std::conj(s) * xq;
                    A.at(q + 1, q) = -s * xp + c * xq;
                }
                if (q + 2 <= n - 1) {
                    cplx xq = A.at(q + 2, q);
                    bulge = std::conj(s) * xq;  // new A(q+2, p), distance 3
                    A.at(q + 2, q) = c * xq;
                } else {
                    bulge = 0.0;
                }
                if (std::abs(bulge) == 0.0) break;
            }
        }
    }

    SymTridiagonal t;
    t.diag.resize(std::size_t(n));
    t.off.assign(std::size_t(std::max(0, n - 1)), 0.0);
    for (int i = 0; i < n; ++i) t.diag[std::size_t(i)] = A.at(i, i).real();
    for (int i = 0; i + 1 < n; ++i) t.off[std::size_t(i)] = std::abs(A.at(i + 1, i));
    return t;
}

// ---------------------------------------------------------------------------
// General banded LU with partial pivoting (kl = ku = kd), LAPACK-style
// storage with kl extra fill rows.
// ---------------------------------------------------------------------------
struct BandedLU {
    int n = 0, kl = 0, ku = 0;
    std::vector<cplx> ab;  // (2*kl+ku+1) x n, row-major bands: ab[r*n + j]
    std::vector<int> piv;
    bool singular = false;
    double min_pivot = std::numeric_limits<double>::infinity();

    cplx& entry(int i, int j) { return ab[std::size_t(kl + ku + i - j) * n + j]; }

    // factor A given by a getter A(i,j), bandwidth kd on each side
    template <class Getter>
    BandedLU(int n_, int kd, const Getter& A) : n(n_), kl(kd), ku(kd) {
        ab.assign(std::size_t(2 * kl + ku + 1) * n, cplx(0.0));
        piv.resize(std::size_t(n));
        for (int j = 0; j < n; ++j)
            for (int i = std::max(0, j - ku); i <= std::min(n - 1, j + kl); ++i)
                entry(i, j) = A(i, j);

        int kv = kl + ku;  // working upper bandwidth
        for (int k = 0; k < n; ++k) {
            int pmax = std::min(n - 1, k + kl);
            int p = k;
            double best = std::abs(ab[std::size_t(kv + 0) * n + k]);
            for (int i = k + 1; i <= pmax; ++i) {
                double v = std::abs(ab[std::size_t(kv + i - k) * n + k]);
                if (v > best) {
                    best = v;
                    p = i;
                }
            }
            piv[std::size_t(k)] = p;
            min_pivot = std::min(min_pivot, best);
            if (best == 0.0) {
                singular = true;
                continue;
            }
            if (p != k) {
                // swap rows k and p within the band (columns k .. min(n-1, k+kv))
                for (int j = k; j <= std::min(n - 1, k + kv); ++j)
                    std::swap(ab[std::size_t(kv + k - j) * n + j], ab[std::size_t(kv + p - j) * n + j]);
            }
            cplx pivval = ab[std::size_t(kv) * n + k];
            for (int i = k + 1; i <= pmax; ++i) {
                cplx f = ab[std::size_t(kv + i - k) * n + k] / pivval;
                ab[std::size_t(kv + i - k) * n + k] = f;
                for (int j = k + 1; j <= std::min(n - 1, k + kv); ++j)
                    ab[std::size_t(kv + i - j) * n + j] -= f * ab[std::size_t(kv + k - j) * n + j];
            }
        }
    }

    std::vector<cplx> solve(std::vector<cplx> b) const {
        int kv = kl + ku;
        for (int k = 0; k < n; ++k) {
            int p = piv[std::size_t(k)];
            if (p != k) std::swap(b[std::size_t(k)], b[std::size_t(p)]);
            for (int i = k + 1; i <= std::min(n - 1, k + kl); ++i)
                b[std::size_t(i)] -= ab[std::size_t(kv + i - k) * n + k] * b[std::size_t(k)];
        }
        for (int i = n - 1; i >= 0; --i) {
            for (int j = i + 1; j <= std::min(n - 1, i + kv); ++j)
                b[std::size_t(i)] -= ab[std::size_t(kv + i - j) * n + j] * b[std::size_t(j)];
            b[std::size_t(i)] /= ab[std::size_t(kv) * n + i];
        }
        return b;
    }
};

}  // namespace quasispec
