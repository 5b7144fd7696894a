#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "quasispec/mat2.hpp"
#include "quasispec/models.hpp"
#include "quasispec/util.hpp"

namespace quasispec {

// ---------------------------------------------------------------------------
// Two-step transfer matrix of the TypeII chain.  The product of the two
// site matrices at phases (theta, site 0) and (theta, site 1) collapses to
//   B(theta) = [[E^2 - 2E c, -lambda E + lambda c], [lambda E - lambda c, -lambda^2]],
//   A(theta) = B(theta) / (lambda c),            c = cos 2pi theta,
// and (2a, A) is a quasiperiodic cocycle with det A = 1 off the poles.
// ---------------------------------------------------------------------------
inline Mat2C two_step_b(const ScalarMosaicModel& m, cplx E, cplx theta) {
    if (m.kind != ScalarKind::TypeII)
        throw std::invalid_argument("two_step_matrix: defined for the TypeII chain");
    double l = m.lambda;
    cplx c = std::cos(two_pi * theta);
    return {E * E - 2.0 * E * c, -l * E + l * c, l * E - l * c, cplx(-l * l, 0.0)};
}

inline Mat2C two_step_a(const ScalarMosaicModel& m, cplx E, cplx theta, double pole_tol = 1e-12) {
    double l = m.lambda;
    cplx c = std::cos(two_pi * theta);
    if (std::abs(l * c) < pole_tol)
        throw PoleError("two_step_matrix: cos 2pi theta too close to zero");
    Mat2C b = two_step_b(m, E, theta);
    return (1.0 / (l * c)) * b;
}

// sampler form, for iterate()/lyapunov()
struct TwoStepSampler {
    const ScalarMosaicModel* model = nullptr;
    cplx E{0.0, 0.0};
    Mat2C operator()(cplx theta) const { return two_step_b(*model, E, theta); }
};

struct TwoStepNormalizedSampler {
    const ScalarMosaicModel* model = nullptr;
    cplx E{0.0, 0.0};
    double pole_tol = 1e-12;
    Mat2C operator()(cplx theta) const { return two_step_a(*model, E, theta, pole_tol); }
};

// log of the pole factor so the normalized exponent can be recovered from the
// polynomial cocycle along the same orbit
inline double log_abs_lambda_cos(double lambda, cplx theta) {
    return std::log(std::abs(lambda * std::cos(two_pi * theta)));
}

// ---------------------------------------------------------------------------
// Renormalized cocycle products A_n(x) = A(x+(n-1)s) ... A(x+s) A(x)
// ---------------------------------------------------------------------------
template <class Sampler>
LogProduct iterate(const Sampler& sampler, double base_step, cplx x0, long n) {
    LogProduct prod;
    for (long k = 0; k < n; ++k) {
        cplx x = x0 + cplx(double(k) * base_step, 0.0);
        try {
            prod.push(sampler(x));
        } catch (PoleError& e) {
            throw PoleError(std::string(e.what()) + " (orbit index " + std::to_string(k) + ")", k);
        }
    }
    return prod;
}

struct LeEstimate {
    double value = 0.0;
    double stderr_boot = 0.0;
    std::vector<double> per_phase;
};

// Average of (1/n) ln||A_n|| over equidistributed initial phases, with a
// bootstrap error bar over the phase ensemble.
template <class Sampler>
LeEstimate lyapunov(const Sampler& sampler, double base_step, long n_steps, int n_phases,
                    cplx x0 = cplx(0.1371, 0.0), std::uint64_t seed = 1) {
    if (n_phases < 1) throw std::invalid_argument("lyapunov: n_phases must be >= 1");
    LeEstimate est;
    est.per_phase.resize(std::size_t(n_phases));
    parallel_for(std::size_t(n_phases), [&](std::size_t j) {
        cplx x = x0 + cplx(double(j) / n_phases, 0.0);
        LogProduct p = iterate(sampler, base_step, x, n_steps);
        est.per_phase[j] = p.total_log_norm() / double(n_steps);
    });
    est.value = mean(est.per_phase);
    est.stderr_boot = bootstrap_stderr(est.per_phase, Rng(seed));
    return est;
}

// L at complexified phase x + i eps
template <class Sampler>
LeEstimate lyapunov_complexified(const Sampler& sampler, double base_step, double eps,
                                 long n_steps, int n_phases, double x0 = 0.1371,
                                 std::uint64_t seed = 1) {
    return lyapunov(sampler, base_step, n_steps, n_phases, cplx(x0, eps), seed);
}

// ---------------------------------------------------------------------------
// Acceleration: omega = (1/2pi) dL/d eps, quantized to half-integers for
// M(2,C) cocycles with non-vanishing determinant and to integers in SL(2,C).
// ---------------------------------------------------------------------------
struct Acceleration {
    double omega_raw = 0.0;
    double omega_rounded = 0.0;  // nearest half-integer
    double disagreement = 0.0;
    bool quantized = false;  // |raw - rounded| <= 0.1
};

inline Acceleration acceleration_from_les(double le_plus, double le_minus, double delta) {
    Acceleration a;
    a.omega_raw = (le_plus - le_minus) / (2.0 * two_pi * delta);
    a.omega_rounded = std::round(2.0 * a.omega_raw) / 2.0;
    a.disagreement = std::fabs(a.omega_raw - a.omega_rounded);
    a.quantized = a.disagreement <= 0.1;
    return a;
}

// symmetric finite difference at eps +- delta
template <class Sampler>
Acceleration acceleration(const Sampler& sampler, double base_step, double eps, double delta,
                          long n_steps, int n_phases, double x0 = 0.1371) {
    LeEstimate lp = lyapunov(sampler, base_step, n_steps, n_phases, cplx(x0, eps + delta));
    LeEstimate lm = lyapunov(sampler, base_step, n_steps, n_phases, cplx(x0, eps - delta));
    return acceleration_from_les(lp.value, lm.value, delta);
}

inline Acceleration acceleration_type2(const ScalarMosaicModel& m, double E, double eps,
                                       double delta, long n_steps, int n_phases) {
    TwoStepSampler s{&m, cplx(E, 0.0)};
    return acceleration(s, frac(2.0 * m.alpha()), eps, delta, n_steps, n_phases);
}

// ---------------------------------------------------------------------------
// Fibered rotation number of the reduced strip cocycle at real E with
// dist(E, Ran V22) > 0.  The projective angle of Z_n = (Delta_n, Delta_{n-1})
// is unwrapped by nearest-branch continuation; normalization rho(+inf) = 0,
// rho(-inf) = 1/2.
// ---------------------------------------------------------------------------
inline double rotation_number(const StripModel& m, double E, long n, double omega0 = 0.1371) {
    ReducedStripSampler samp = reduce_strip_to_scalar(m, cplx(E, 0.0));
    double a2 = 2.0 * m.alpha();
    double x = 1.0, y = 0.0;  // Z_0
    double total = 0.0;
    for (long k = 1; k <= n; ++k) {
        double v = samp.effective_potential(cplx(omega0 + double(k) * a2, 0.0)).real();
        double nx = v * x - y;
        double ny = x;
        double cross = x * ny - y * nx;
        double dot = x * nx + y * ny;
        total += std::atan2(cross, dot);
        double nn = std::sqrt(nx * nx + ny * ny);
        x = nx / nn;
        y = ny / nn;
    }
    double rho = std::fabs(total / (two_pi * double(n)));
    return std::min(rho, 0.5);
}

// ---------------------------------------------------------------------------
// Uniform disk contraction under the Moebius action conjugated to the unit
// disk.  radius < 1 over all phases certifies L >= -ln(radius)/2 for the
// sampled cocycle.
// ---------------------------------------------------------------------------
inline double mobius_disk_radius(const Mat2C& m) {
    // conjugation by Q0 = [[1,-i],[1,i]] (Moebius-equal to the paper's Q)
    const cplx i(0.0, 1.0);
    Mat2C q0{1.0, -i, 1.0, i};
    Mat2C q0inv = q0.inverse();
    Mat2C t = q0 * m * q0inv;
    double d2 = std::norm(t.a22) - std::norm(t.a21);
    if (d2 <= 0.0) return std::numeric_limits<double>::infinity();
    cplx w0 = (t.a12 * std::conj(t.a22) - t.a11 * std::conj(t.a21)) / d2;
    double r2 = std::norm(w0) - (std::norm(t.a12) - std::norm(t.a11)) / d2;
    double r = std::sqrt(std::max(r2, 0.0));
    return std::abs(w0) + r;
}

template <class SecondIterateSampler>
double disk_contraction(const SecondIterateSampler& sampler, int n_samples,
                        double phase0 = 0.1371) {
    double sup = 0.0;
    for (int j = 0; j < n_samples; ++j) {
        cplx x(phase0 + double(j) / n_samples, 0.0);
        sup = std::max(sup, mobius_disk_radius(sampler(x)));
    }
    return sup;
}

// second iterate of a one-step sampler
template <class Sampler>
struct SecondIterate {
    Sampler one_step;
    double base_step = 0.0;
    Mat2C operator()(cplx x) const {
        return one_step(x + cplx(base_step, 0.0)) * one_step(x);
    }
};

// ---------------------------------------------------------------------------
// Least-squares slope of ln sup_{s<=n} ||A_s|| against ln n, the power-law
// growth diagnostic separating bounded from critical cocycles.
// ---------------------------------------------------------------------------
template <class Sampler>
double growth_exponent(const Sampler& sampler, double base_step, long n_lo, long n_hi,
                       int n_phases = 4, int checkpoints = 24, double x0 = 0.1371) {
    std::vector<long> ns(std::size_t(checkpoints));
    double ratio = std::log(double(n_hi) / double(n_lo)) / double(checkpoints - 1);
    for (int k = 0; k < checkpoints; ++k)
        ns[std::size_t(k)] = std::lround(double(n_lo) * std::exp(ratio * k));

    std::vector<std::vector<double>> sup_logs(std::size_t(n_phases));
    parallel_for(std::size_t(n_phases), [&](std::size_t j) {
        cplx x0j = cplx(x0 + double(j) / n_phases, 0.0);
        LogProduct prod;
        double running_sup = 0.0;  // ln||A_0|| with A_0 = Id gives ln sqrt(2) > 0; start from 0
        std::size_t next = 0;
        auto& out = sup_logs[j];
        out.resize(ns.size());
        for (long s = 1; s <= n_hi; ++s) {
            prod.push(sampler(x0j + cplx(double(s - 1) * base_step, 0.0)));
            running_sup = std::max(running_sup, prod.total_log_norm());
            while (next < ns.size() && ns[next] == s) out[next++] = running_sup;
        }
        while (next < ns.size()) out[next++] = running_sup;
    });

    std::vector<double> lx(ns.size()), ly(ns.size(), 0.0);
    for (std::size_t k = 0; k < ns.size(); ++k) {
        lx[k] = std::log(double(ns[k]));
        for (int j = 0; j < n_phases; ++j) ly[k] += sup_logs[std::size_t(j)][k] / n_phases;
    }
    return linear_fit(lx, ly).slope;
}

}  // namespace quasispec
