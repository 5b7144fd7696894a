#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "quasispec/linalg.hpp"
#include "quasispec/models.hpp"
#include "quasispec/util.hpp"

namespace quasispec {

// ---------------------------------------------------------------------------
// Finite restrictions with Dirichlet boundary.
//   scalar chains: sites [0, N-1], tridiagonal
//   strip:         blocks [1, N], 2N x 2N Hermitian with bandwidth 2
// ---------------------------------------------------------------------------
struct FiniteRestriction {
    bool strip = false;
    int n_sites = 0;  // N
    int dim = 0;      // N (scalar) or 2N (strip)
    double phase = 0.0;
    BandedHermitian mat;
};

inline FiniteRestriction build_restriction(const ScalarMosaicModel& m, double theta, int N) {
    if (N < 1) throw std::invalid_argument("build_restriction: N >= 1");
    FiniteRestriction r;
    r.strip = false;
    r.n_sites = N;
    r.dim = N;
    r.phase = theta;
    r.mat = BandedHermitian(N, 1);
    for (int n = 0; n < N; ++n) {
        ScalarSample s = sample_scalar(m, theta, n);
        r.mat.at(n, n) = s.v;
        if (n + 1 < N) r.mat.at(n + 1, n) = s.c;
    }
    return r;
}

inline FiniteRestriction build_restriction(const StripModel& m, double omega, int N) {
    if (N < 1) throw std::invalid_argument("build_restriction: N >= 1");
    if (std::abs(m.hop.a12) > 1e-14)
        throw std::invalid_argument("build_restriction: hop matrix must have zero (1,2) entry");
    FiniteRestriction r;
    r.strip = true;
    r.n_sites = N;
    r.dim = 2 * N;
    r.phase = omega;
    r.mat = BandedHermitian(2 * N, 2);
    Mat2C cs = adjoint(m.hop);  // block (n+1, n)
    for (int n = 1; n <= N; ++n) {
        Mat2C V = m.potential_at_site(omega, n);
        int r0 = 2 * (n - 1);
        r.mat.at(r0, r0) = V.a11.real();
        r.mat.at(r0 + 1, r0) = V.a21;
        r.mat.at(r0 + 1, r0 + 1) = V.a22.real();
        if (n < N) {
            r.mat.at(r0 + 2, r0) = cs.a11;      // distance 2
            r.mat.at(r0 + 2, r0 + 1) = cs.a12;  // distance 1
            r.mat.at(r0 + 3, r0 + 1) = cs.a22;  // distance 2
        }
    }
    return r;
}

// signed tridiagonal of a scalar restriction (used for eigenvectors)
inline SymTridiagonal scalar_tridiagonal(const ScalarMosaicModel& m, double theta, int N) {
    SymTridiagonal t;
    t.diag.resize(std::size_t(N));
    t.off.resize(std::size_t(N - 1));
    for (int n = 0; n < N; ++n) {
        ScalarSample s = sample_scalar(m, theta, n);
        t.diag[std::size_t(n)] = s.v;
        if (n + 1 < N) t.off[std::size_t(n)] = s.c;
    }
    return t;
}

// ---------------------------------------------------------------------------
// Cached spectral access to one restriction: the banded matrix is reduced to
// tridiagonal form once, counts and eigenvalues reuse it.
// ---------------------------------------------------------------------------
class RestrictionSpectrum {
public:
    explicit RestrictionSpectrum(const FiniteRestriction& r)
        : dim_(r.dim), tri_(band_to_tridiagonal(r.mat)) {}
    explicit RestrictionSpectrum(SymTridiagonal t) : dim_(t.n()), tri_(std::move(t)) {}

    int dim() const { return dim_; }
    const SymTridiagonal& tridiagonal() const { return tri_; }

    int count_below(double E) const { return tri_.count_below(E); }

    std::vector<SymTridiagonal::Cluster> eigenvalues_in(double lo, double hi, double tol) const {
        return tri_.eigenvalues_in(lo, hi, tol);
    }

    const std::vector<double>& all_eigenvalues() const {
        if (eigs_.empty()) eigs_ = tri_.eigenvalues_ql();
        return eigs_;
    }

private:
    int dim_;
    SymTridiagonal tri_;
    mutable std::vector<double> eigs_;
};

// Inertia count of eigenvalues strictly below E.  An exact hit on an
// eigenvalue makes the count ambiguous at working precision; the bracketed
// variant reports both sides of a 1e-12 perturbation.
inline int count_below(const FiniteRestriction& r, double E) {
    return RestrictionSpectrum(r).count_below(E);
}

struct CountBracket {
    int lo = 0, hi = 0;
    bool exact_hit() const { return lo != hi; }
};

inline CountBracket count_below_bracket(const RestrictionSpectrum& s, double E) {
    return CountBracket{s.count_below(E - 1e-12), s.count_below(E + 1e-12)};
}

struct EigenList {
    std::vector<double> values;  // with multiplicity repeats, ascending
    std::vector<SymTridiagonal::Cluster> clusters;
};

inline EigenList eigenvalues(const FiniteRestriction& r, double lo, double hi, double tol) {
    if (!(lo < hi)) throw std::invalid_argument("eigenvalues: need lo < hi");
    EigenList out;
    out.clusters = RestrictionSpectrum(r).eigenvalues_in(lo, hi, tol);
    for (const auto& c : out.clusters)
        for (int k = 0; k < c.multiplicity; ++k) out.values.push_back(c.value);
    return out;
}

// ---------------------------------------------------------------------------
// Integrated density of states from phase-averaged eigenvalue counts.
// ---------------------------------------------------------------------------
template <class Model>
class IdsEvaluator {
public:
    IdsEvaluator(const Model& m, int N, int n_phases, double phase0 = 0.1371)
        : n_sites_(N) {
        spectra_.reserve(std::size_t(n_phases));
        std::vector<std::optional<RestrictionSpectrum>> slots(std::size_t(n_phases));
        parallel_for(std::size_t(n_phases), [&](std::size_t j) {
            double ph = frac(phase0 + double(j) / n_phases);
            slots[j].emplace(build_restriction(m, ph, N));
        });
        for (auto& s : slots) spectra_.push_back(std::move(*s));
    }

    double operator()(double E) const {
        double acc = 0.0;
        for (const auto& s : spectra_) acc += double(s.count_below(E)) / double(s.dim());
        return acc / double(spectra_.size());
    }

    // eigenvalues of all phases pooled (spectrum samples)
    std::vector<double> pooled_eigenvalues() const {
        std::vector<double> all;
        for (const auto& s : spectra_) {
            const auto& e = s.all_eigenvalues();
            all.insert(all.end(), e.begin(), e.end());
        }
        std::sort(all.begin(), all.end());
        return all;
    }

    const std::vector<RestrictionSpectrum>& spectra() const { return spectra_; }
    int n_sites() const { return n_sites_; }

private:
    int n_sites_;
    std::vector<RestrictionSpectrum> spectra_;
};

template <class Model>
double ids(const Model& m, double E, int N, int n_phases, double phase0 = 0.1371) {
    if (N < 1) throw std::invalid_argument("ids: N >= 1");
    return IdsEvaluator<Model>(m, N, n_phases, phase0)(E);
}

// ---------------------------------------------------------------------------
// Determinant recurrences.
//
// Strip, scaled:   Delta_n = vt_n Delta_{n-1} - Delta_{n-2},
//                  vt_n = z - V11(n) - V12(n)V21(n)/(z - V22(n)),
// so that (Delta_n, Delta_{n-1})^T = A^z(site n) (Delta_{n-1}, Delta_{n-2})^T.
// Strip, unscaled: D_n = det(z - V(n)) D_{n-1}
//                        - (z - V22(n))(z - V22(n-1)) D_{n-2},
// a polynomial identity valid for every z.
// ---------------------------------------------------------------------------
struct DetRecurrence {
    cplx z;
    bool scaled_valid = true;
    int first_pole_index = -1;
    std::vector<ScaledComplex> delta;  // Delta_0 .. Delta_N
    std::vector<ScaledComplex> det;    // D_0 .. D_N

    cplx delta_value(int n) const { return delta[std::size_t(n)].value(); }
};

inline DetRecurrence det_recurrence(const StripModel& m, double omega, cplx z, int N,
                                    double pole_tol = 1e-9) {
    DetRecurrence r;
    r.z = z;
    r.delta.assign(std::size_t(N) + 1, ScaledComplex(cplx(0.0)));
    r.det.assign(std::size_t(N) + 1, ScaledComplex(cplx(0.0)));
    r.delta[0] = ScaledComplex(cplx(1.0));
    r.det[0] = ScaledComplex(cplx(1.0));
    ScaledComplex delta_m2(cplx(0.0)), det_m2(cplx(0.0));
    cplx prev_d22(0.0);
    for (int n = 1; n <= N; ++n) {
        Mat2C V = m.potential_at_site(omega, n);
        cplx d22 = z - V.a22;
        cplx det_block = (z - V.a11) * d22 - V.a12 * V.a21;
        if (std::abs(d22) < pole_tol) {
            if (r.scaled_valid) {
                r.scaled_valid = false;
                r.first_pole_index = n;
            }
        }
        if (r.scaled_valid) {
            cplx vt = (z - V.a11) - V.a12 * V.a21 / d22;
            ScaledComplex dn = ScaledComplex(vt) * r.delta[std::size_t(n - 1)] -
                               (n >= 2 ? delta_m2 : ScaledComplex(cplx(0.0)));
            delta_m2 = r.delta[std::size_t(n - 1)];
            r.delta[std::size_t(n)] = dn;
        }
        ScaledComplex Dn = ScaledComplex(det_block) * r.det[std::size_t(n - 1)];
        if (n >= 2) Dn = Dn - ScaledComplex(d22 * prev_d22) * det_m2;
        det_m2 = r.det[std::size_t(n - 1)];
        r.det[std::size_t(n)] = Dn;
        prev_d22 = d22;
    }
    return r;
}

// Experimental eigenvalue counter from sign changes of the Delta sequence.
// Empirically  #eig(S|[1,N]) > E  =  changes(Delta) + #{n <= N : V22(n) > E};
// inertia counting is the reference path.
inline int count_above_delta(const StripModel& m, double omega, double E, int N) {
    DetRecurrence r = det_recurrence(m, omega, cplx(E, 0.0), N);
    if (!r.scaled_valid) throw PoleError("count_above_delta: E hits Ran(V22) on the window");
    int changes = 0;
    int prev = 1;  // sign of Delta_0 = 1
    for (int n = 1; n <= N; ++n) {
        double v = r.delta[std::size_t(n)].m.real();
        int s = (v > 0) - (v < 0);
        if (s == 0) s = -prev;
        if (s != prev) ++changes;
        prev = s;
    }
    int v22_above = 0;
    for (int n = 1; n <= N; ++n)
        if (m.potential_at_site(omega, n).a22.real() > E) ++v22_above;
    return changes + v22_above;
}

// scalar chains: P_k = det[(H-E)|_{[0,k-1]}], Q_k = det[(H-E)|_{[1,k]}]
struct ScalarDetSeq {
    std::vector<ScaledReal> P, Q;
    double p(int k) const { return P[std::size_t(k)].value(); }
    double q(int k) const { return Q[std::size_t(k)].value(); }
};

inline ScalarDetSeq scalar_det_recurrence(const ScalarMosaicModel& m, double theta, double E,
                                          int N) {
    ScalarDetSeq s;
    s.P.assign(std::size_t(N) + 1, ScaledReal(0.0));
    s.Q.assign(std::size_t(N) + 1, ScaledReal(0.0));
    s.P[0] = ScaledReal(1.0);
    s.Q[0] = ScaledReal(1.0);
    ScaledReal pm2(0.0), qm2(0.0);
    for (int k = 1; k <= N; ++k) {
        ScalarSample sk = sample_scalar(m, theta, k - 1);  // site k-1 closes [0,k-1]
        ScaledReal pk = ScaledReal(sk.v - E) * s.P[std::size_t(k - 1)];
        if (k >= 2) {
            double c = sample_scalar(m, theta, k - 2).c;
            pk = pk - ScaledReal(c * c) * pm2;
        }
        pm2 = s.P[std::size_t(k - 1)];
        s.P[std::size_t(k)] = pk;

        ScalarSample tk = sample_scalar(m, theta, k);  // site k closes [1,k]
        ScaledReal qk = ScaledReal(tk.v - E) * s.Q[std::size_t(k - 1)];
        if (k >= 2) {
            double c = sample_scalar(m, theta, k - 1).c;
            qk = qk - ScaledReal(c * c) * qm2;
        }
        qm2 = s.Q[std::size_t(k - 1)];
        s.Q[std::size_t(k)] = qk;
    }
    return s;
}

// determinants of (H - E) over nested sub-intervals of [n1, n2]
// leading[k]  = det over [n1, n1+k-1]
// trailing[k] = det over [n2-k+1, n2]
struct IntervalDets {
    std::vector<ScaledReal> leading, trailing;
};

inline IntervalDets interval_dets(const ScalarMosaicModel& m, double theta, double E, long n1,
                                  long n2) {
    int len = int(n2 - n1 + 1);
    IntervalDets d;
    d.leading.assign(std::size_t(len) + 1, ScaledReal(0.0));
    d.trailing.assign(std::size_t(len) + 1, ScaledReal(0.0));
    d.leading[0] = ScaledReal(1.0);
    d.trailing[0] = ScaledReal(1.0);
    ScaledReal lm2(0.0), tm2(0.0);
    for (int k = 1; k <= len; ++k) {
        long site = n1 + k - 1;
        ScaledReal lk = ScaledReal(sample_scalar(m, theta, site).v - E) * d.leading[std::size_t(k - 1)];
        if (k >= 2) {
            double c = sample_scalar(m, theta, site - 1).c;
            lk = lk - ScaledReal(c * c) * lm2;
        }
        lm2 = d.leading[std::size_t(k - 1)];
        d.leading[std::size_t(k)] = lk;

        long tsite = n2 - k + 1;
        ScaledReal tk = ScaledReal(sample_scalar(m, theta, tsite).v - E) * d.trailing[std::size_t(k - 1)];
        if (k >= 2) {
            double c = sample_scalar(m, theta, tsite).c;
            tk = tk - ScaledReal(c * c) * tm2;
        }
        tm2 = d.trailing[std::size_t(k - 1)];
        d.trailing[std::size_t(k)] = tk;
    }
    return d;
}

struct EigenvalueCollisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// log|G_[n1,n2](n,m)| and the signed value where it fits in doubles
struct GreenEntry {
    double log_abs = 0.0;
    double value = 0.0;  // may over/underflow; log_abs is always valid
};

inline GreenEntry green_restricted(const ScalarMosaicModel& m, double theta, double E, long n1,
                                   long n2, long n, long msite) {
    if (n < n1 || n > n2 || msite < n1 || msite > n2)
        throw std::invalid_argument("green_restricted: indices outside interval");
    IntervalDets d = interval_dets(m, theta, E, n1, n2);
    int len = int(n2 - n1 + 1);
    ScaledReal full = d.leading[std::size_t(len)];
    if (full.is_zero()) throw EigenvalueCollisionError("green_restricted: determinant underflow");
    long a = std::min(n, msite), b = std::max(n, msite);
    ScaledReal g = d.leading[std::size_t(a - n1)] * d.trailing[std::size_t(n2 - b)];
    for (long l = a; l < b; ++l) g = g * ScaledReal(sample_scalar(m, theta, l).c);
    g = g / full;
    if (((n + msite) % 2 + 2) % 2 == 1) g.m = -g.m;
    GreenEntry out;
    out.log_abs = g.is_zero() ? -std::numeric_limits<double>::infinity() : g.log_abs();
    out.value = g.value();
    return out;
}

inline cplx green_restricted(const StripModel& m, double omega, double E, int n1, int n2, int n,
                             int msite) {
    if (n < n1 || n > n2 || msite < n1 || msite > n2)
        throw std::invalid_argument("green_restricted: indices outside interval");
    int N = n2 - n1 + 1;
    // blocks [n1, n2] equal blocks [1, N] at a shifted phase
    FiniteRestriction r = build_restriction(m, omega + 2.0 * double(n1 - 1) * m.alpha(), N);
    int dim = 2 * N;
    BandedLU lu(dim, 2, [&](int i, int j) {
        cplx v = r.mat.get(i, j);
        if (i == j) v -= E;
        return v;
    });
    if (lu.singular || lu.min_pivot < 1e-280)
        throw EigenvalueCollisionError("green_restricted: (S - E) numerically singular");
    std::vector<cplx> e(std::size_t(dim), cplx(0.0));
    e[std::size_t(2 * (msite - n1))] = 1.0;
    auto col = lu.solve(std::move(e));
    return col[std::size_t(2 * (n - n1))];
}

// ---------------------------------------------------------------------------
// Interlacing of S|[1,N] against S|[1,N-1] (dense-oracle verification).
// ---------------------------------------------------------------------------
struct InterlacingReport {
    bool pass = false;
    bool case2 = false;  // V22(N) is an eigenvalue of S|[1,N]
    int K = 0;           // eigenvalues with nonzero a(N) overlap
    int m_split = 0;     // Case 1: # of overlap eigenvalues below V22(N)
    std::string violation;
};

struct OmegaOutsideOmega0Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline InterlacingReport interlacing_verify(const StripModel& model, double omega, int N,
                                            double degen_tol = 1e-9, double match_tol = 1e-7) {
    InterlacingReport rep;
    if (N < 2) throw std::invalid_argument("interlacing_verify: N >= 2");

    // Omega_0 membership: nonzero V12, pairwise distinct V22 over [1, N]
    std::vector<double> v22(std::size_t(N) + 1, 0.0);
    for (int i = 1; i <= N; ++i) {
        Mat2C V = model.potential_at_site(omega, i);
        if (std::abs(V.a12) < 1e-9)
            throw OmegaOutsideOmega0Error("interlacing_verify: V12 vanishes on the window");
        v22[std::size_t(i)] = V.a22.real();
    }
    for (int i = 1; i <= N; ++i)
        for (int j = i + 1; j <= N; ++j)
            if (std::fabs(v22[std::size_t(i)] - v22[std::size_t(j)]) < 1e-9)
                throw OmegaOutsideOmega0Error("interlacing_verify: V22 values collide");

    HermitianEigen big = jacobi_hermitian_eigen(build_restriction(model, omega, N).mat.to_dense());
    HermitianEigen small =
        jacobi_hermitian_eigen(build_restriction(model, omega, N - 1).mat.to_dense());
    const double v22N = v22[std::size_t(N)];
    const int dim = 2 * N;
    const int arow = 2 * N - 2;  // a(N) component

    auto fail = [&](const std::string& why) {
        rep.pass = false;
        rep.violation = why;
        return rep;
    };

    // overlaps; rotate degenerate pairs so one member has zero overlap
    std::vector<double> overlap(std::size_t(dim));
    std::vector<int> degenerate_partner(std::size_t(dim), -1);
    for (int j = 0; j < dim; ++j)
        overlap[std::size_t(j)] = std::abs(big.vectors(arow, j));
    for (int j = 0; j + 1 < dim; ++j) {
        if (std::fabs(big.values[std::size_t(j)] - big.values[std::size_t(j + 1)]) < degen_tol) {
            degenerate_partner[std::size_t(j)] = j + 1;
            degenerate_partner[std::size_t(j + 1)] = j;
            cplx c1 = big.vectors(arow, j), c2 = big.vectors(arow, j + 1);
            double nrm = std::sqrt(std::norm(c1) + std::norm(c2));
            overlap[std::size_t(j)] = nrm;  // rotated basis: (nrm, 0)
            overlap[std::size_t(j + 1)] = 0.0;
        }
    }

    const double split_tol = 1e-7;
    std::vector<int> with_overlap;
    std::vector<double> inherited;  // must reappear in sigma(S|[1,N-1])
    for (int j = 0; j < dim; ++j) {
        double E = big.values[std::size_t(j)];
        bool is_v22N = std::fabs(E - v22N) < match_tol;
        if (overlap[std::size_t(j)] > split_tol) {
            with_overlap.push_back(j);
        } else {
            if (is_v22N) {
                rep.case2 = true;
                // case (i): V22(N) not an eigenvalue of the smaller restriction
                for (double e : small.values)
                    if (std::fabs(e - v22N) < match_tol)
                        return fail("V22(N) eigenvalue shared with S|[1,N-1]");
                continue;
            }
            // cases (ii)/(iii): the value reappears simply in S|[1,N-1]
            inherited.push_back(E);
        }
    }
    rep.K = int(with_overlap.size());
    if (rep.K < 3) return fail("K < 3");

    // match inherited values into sigma(S|[1,N-1])
    std::vector<double> rest = small.values;
    std::vector<bool> used(rest.size(), false);
    for (double e : inherited) {
        int best = -1;
        double bd = match_tol;
        for (std::size_t i = 0; i < rest.size(); ++i) {
            if (used[i]) continue;
            double d = std::fabs(rest[i] - e);
            if (d < bd) {
                bd = d;
                best = int(i);
            }
        }
        if (best < 0) return fail("zero-overlap eigenvalue missing from S|[1,N-1]");
        used[std::size_t(best)] = true;
    }
    std::vector<double> fresh;  // eigenvalues of the smaller matrix not inherited
    for (std::size_t i = 0; i < rest.size(); ++i)
        if (!used[i]) fresh.push_back(rest[i]);

    // case-(iv) spot check: simple overlap eigenvalues must not be in the small spectrum
    for (int j : with_overlap) {
        if (degenerate_partner[std::size_t(j)] >= 0) continue;
        double E = big.values[std::size_t(j)];
        for (double e : fresh)
            if (std::fabs(e - E) < 1e-10) return fail("overlap eigenvalue repeated in S|[1,N-1]");
    }

    // strict interlacing of the fresh eigenvalues between consecutive
    // overlap eigenvalues, with the V22(N) gap skipped in Case 1
    std::vector<double> ev;
    for (int j : with_overlap) ev.push_back(big.values[std::size_t(j)]);
    rep.m_split = 0;
    if (!rep.case2) {
        for (double e : ev)
            if (e < v22N) ++rep.m_split;
        if (rep.m_split < 1 || rep.m_split > rep.K - 1)
            return fail("V22(N) not bracketed by overlap eigenvalues");
    }

    int expected_fresh = rep.case2 ? rep.K - 1 : rep.K - 2;
    if (int(fresh.size()) != expected_fresh)
        return fail("wrong number of new eigenvalues in S|[1,N-1]: got " +
                    std::to_string(fresh.size()) + ", expected " + std::to_string(expected_fresh));

    std::sort(fresh.begin(), fresh.end());
    std::size_t fi = 0;
    for (int g = 0; g + 1 < rep.K; ++g) {
        bool skip = (!rep.case2 && g + 1 == rep.m_split);  // gap containing V22(N)
        if (skip) continue;
        if (fi >= fresh.size()) return fail("missing interlacing eigenvalue");
        double x = fresh[fi++];
        if (!(ev[std::size_t(g)] < x && x < ev[std::size_t(g + 1)]))
            return fail("interlacing violated in gap " + std::to_string(g));
    }
    if (fi != fresh.size()) return fail("extra eigenvalue outside interlacing gaps");

    rep.pass = true;
    return rep;
}

// ---------------------------------------------------------------------------
// Green's-function regularity of a point: search for a length-k interval
// around y whose boundary Green entries decay like e^{-xi |y - n_i|}.
// ---------------------------------------------------------------------------
enum class Regularity { regular, singular };

inline Regularity regularity_classify(const ScalarMosaicModel& m, double theta, double E, long y,
                                      int k, double xi) {
    if (k < 7) throw std::invalid_argument("regularity_classify: k >= 7");
    double margin = double(k) / 7.0;
    for (long n1 = y - k + 1; n1 <= y; ++n1) {
        long n2 = n1 + k - 1;
        double dl = double(y - n1), dr = double(n2 - y);
        if (dl < margin || dr < margin) continue;
        GreenEntry g1 = green_restricted(m, theta, E, n1, n2, y, n1);
        if (!(g1.log_abs < -xi * dl)) continue;
        GreenEntry g2 = green_restricted(m, theta, E, n1, n2, y, n2);
        if (!(g2.log_abs < -xi * dr)) continue;
        return Regularity::regular;
    }
    return Regularity::singular;
}

// ---------------------------------------------------------------------------
// Eigenpair diagnostics: inverse participation ratio and exponential decay
// rate of eigenvectors in an energy window.
// ---------------------------------------------------------------------------
struct LocalizationRecord {
    double E = 0.0;
    double ipr = 0.0;         // sum u^4 / (sum u^2)^2
    double decay_rate = 0.0;  // fitted from the tail envelope, NaN if no fit
    double le_closed_form = 0.0;
    int center = 0;
};

inline std::vector<LocalizationRecord> localization_scan(const ScalarMosaicModel& m, double theta,
                                                         int N, double e_lo, double e_hi,
                                                         std::uint64_t seed = 7) {
    SymTridiagonal t = scalar_tridiagonal(m, theta, N);
    auto clusters = t.eigenvalues_in(e_lo, e_hi, 1e-11);
    std::vector<LocalizationRecord> out;
    Rng rng(seed);
    for (const auto& c : clusters) {
        std::vector<double> u = t.eigenvector(c.value, rng.fork(out.size()));
        LocalizationRecord rec;
        rec.E = c.value;
        rec.le_closed_form = closed_form_le(c.value, m.lambda);
        double s2 = 0.0, s4 = 0.0;
        int nc = 0;
        double best = 0.0;
        for (int i = 0; i < N; ++i) {
            double a = u[std::size_t(i)] * u[std::size_t(i)];
            s2 += a;
            s4 += a * a;
            if (a > best) {
                best = a;
                nc = i;
            }
        }
        rec.ipr = s4 / (s2 * s2);
        rec.center = nc;

        // envelope fit on 2-site cells to absorb the even/odd modulation
        std::vector<double> xs, ys;
        int reach = std::min(nc, N - 1 - nc);
        for (int d = 4; d + 1 < reach - 2; d += 2) {
            double amp = 0.0;
            for (int side = -1; side <= 1; side += 2)
                for (int off = 0; off < 2; ++off) {
                    int idx = nc + side * (d + off);
                    amp = std::max(amp, std::fabs(u[std::size_t(idx)]));
                }
            if (amp < 1e-13) break;
            xs.push_back(double(d));
            ys.push_back(std::log(amp));
        }
        rec.decay_rate = xs.size() >= 3 ? -linear_fit(xs, ys).slope
                                        : std::numeric_limits<double>::quiet_NaN();
        out.push_back(rec);
    }
    return out;
}

// ---------------------------------------------------------------------------
// epsilon-uniformity of interpolation nodes {theta_j} on [-1,1]:
// max_x max_i prod_{j != i} |x - cos 2pi theta_j| / |cos 2pi theta_i - cos 2pi theta_j|
// compared against e^{k eps}, k = #nodes - 1.
// ---------------------------------------------------------------------------
struct CoincidentNodesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EpsilonUniformReport {
    bool uniform = false;
    double max_log_product = 0.0;
    double threshold = 0.0;  // k * eps
};

inline EpsilonUniformReport epsilon_uniform_check(const std::vector<double>& theta_set, double eps,
                                                  int x_grid = 1000) {
    std::size_t kk = theta_set.size();
    if (kk < 2) throw std::invalid_argument("epsilon_uniform_check: need at least 2 nodes");
    std::vector<double> nodes(kk);
    for (std::size_t j = 0; j < kk; ++j) nodes[j] = std::cos(two_pi * theta_set[j]);

    std::vector<double> denom(kk, 0.0);
    for (std::size_t i = 0; i < kk; ++i)
        for (std::size_t j = 0; j < kk; ++j) {
            if (i == j) continue;
            double d = std::fabs(nodes[i] - nodes[j]);
            if (d < 1e-13) throw CoincidentNodesError("epsilon_uniform_check: coincident nodes");
            denom[i] += std::log(d);
        }

    EpsilonUniformReport rep;
    rep.threshold = double(kk - 1) * eps;
    rep.max_log_product = -std::numeric_limits<double>::infinity();
    for (int g = 0; g <= x_grid; ++g) {
        double x = -1.0 + 2.0 * double(g) / x_grid;
        double total = 0.0;
        bool zero = false;
        for (std::size_t j = 0; j < kk; ++j) {
            double d = std::fabs(x - nodes[j]);
            if (d < 1e-300) {
                zero = true;
                break;
            }
            total += std::log(d);
        }
        if (zero) continue;  // product vanishes at a node for every i except that node
        for (std::size_t i = 0; i < kk; ++i) {
            double lp = total - std::log(std::fabs(x - nodes[i])) - denom[i];
            rep.max_log_product = std::max(rep.max_log_product, lp);
        }
    }
    rep.uniform = rep.max_log_product < rep.threshold;
    return rep;
}

}  // namespace quasispec
