#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "quasispec/arithmetic.hpp"
#include "quasispec/mat2.hpp"
#include "quasispec/util.hpp"

namespace quasispec {

struct PoleError : std::runtime_error {
    long orbit_index = -1;
    explicit PoleError(const std::string& what, long idx = -1)
        : std::runtime_error(what), orbit_index(idx) {}
};

// ---------------------------------------------------------------------------
// Scalar quasiperiodic Jacobi chains on l^2(Z).
//
// Mosaic:  v(n) = 2 lambda cos 2pi(theta + n a) on even n, 0 otherwise, c = 1.
// TypeII:  v(theta,n) = cos 2pi((n-1)a + theta)   (n odd)
//                       cos 2pi(n a + theta)      (n even)
//          c(theta,n) = lambda                    (n odd)
//                       cos 2pi(n a + theta)      (n even)
// ---------------------------------------------------------------------------
enum class ScalarKind { Mosaic, TypeII };

struct ScalarMosaicModel {
    ScalarKind kind = ScalarKind::TypeII;
    double lambda = 1.0;
    Frequency freq;  // the chain frequency alpha

    double alpha() const { return freq.value(); }
};

inline ScalarMosaicModel make_mosaic(double lambda, const Frequency& freq) {
    if (lambda <= 0) throw std::invalid_argument("mosaic: lambda must be positive");
    return {ScalarKind::Mosaic, lambda, freq};
}

inline ScalarMosaicModel make_type2(double lambda, const Frequency& freq) {
    if (lambda <= 0) throw std::invalid_argument("type2: lambda must be positive");
    return {ScalarKind::TypeII, lambda, freq};
}

inline bool is_even_site(long n) { return ((n % 2) + 2) % 2 == 0; }

struct ScalarSample {
    double v = 0.0;
    double c = 0.0;
};

inline ScalarSample sample_scalar(const ScalarMosaicModel& m, double theta, long n) {
    double a = m.alpha();
    ScalarSample s;
    if (m.kind == ScalarKind::Mosaic) {
        s.c = 1.0;
        s.v = is_even_site(n) ? 2.0 * m.lambda * std::cos(two_pi * (theta + double(n) * a)) : 0.0;
    } else {
        if (is_even_site(n)) {
            double x = std::cos(two_pi * (double(n) * a + theta));
            s.v = x;
            s.c = x;
        } else {
            s.v = std::cos(two_pi * (double(n - 1) * a + theta));
            s.c = m.lambda;
        }
    }
    return s;
}

// Reject phases whose orbit comes too close to a hopping zero within the run
// window (the T0 membership check).
inline bool phase_in_T0(double theta, double alpha, long n_run, double tol = 1e-8) {
    for (long n = -n_run; n <= n_run; ++n)
        if (std::fabs(std::cos(two_pi * (theta + double(n) * alpha))) < tol) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Singular Jacobi operators on the strip:
//   [S u](n) = C u(n+1) + C* u(n-1) + V(omega + 2 n alpha) u(n),   det C = 0.
//
// V is a trigonometric polynomial, stored by its Fourier coefficients for
// k >= 0; V^(-k) is the adjoint of V^(k).
// ---------------------------------------------------------------------------
enum class StripPreset { Custom, MosaicStrip, TypeIIStrip, TypeIII };

inline Mat2C adjoint(const Mat2C& a) {
    return {std::conj(a.a11), std::conj(a.a21), std::conj(a.a12), std::conj(a.a22)};
}

struct StripModel {
    StripPreset preset = StripPreset::Custom;
    double lambda = 0.0;  // coupling of the named presets
    Mat2C hop;            // C
    std::vector<Mat2C> fourier;  // V^(0), V^(1), ..., V^(K)
    Frequency freq;          // expansion of alpha
    Frequency freq_doubled;  // expansion of frac(2 alpha), the strip step

    double alpha() const { return freq.value(); }
    double step() const { return frac(2.0 * freq.value()); }

    // V(omega), with the analytic continuation used for complex phases
    Mat2C potential(cplx omega) const {
        Mat2C v = fourier[0];
        for (std::size_t k = 1; k < fourier.size(); ++k) {
            cplx ep = std::exp(cplx(0.0, two_pi * double(k)) * omega);
            cplx em = 1.0 / ep;
            Mat2C vk = fourier[k];
            Mat2C vmk = adjoint(fourier[k]);
            v.a11 += ep * vk.a11 + em * vmk.a11;
            v.a12 += ep * vk.a12 + em * vmk.a12;
            v.a21 += ep * vk.a21 + em * vmk.a21;
            v.a22 += ep * vk.a22 + em * vmk.a22;
        }
        return v;
    }

    Mat2C potential_at_site(double omega, long n) const {
        return potential(cplx(omega + 2.0 * double(n) * alpha(), 0.0));
    }

    // range of V22 over the torus (sampled)
    void v22_range(double& lo, double& hi, int samples = 4096) const {
        lo = std::numeric_limits<double>::infinity();
        hi = -lo;
        for (int i = 0; i < samples; ++i) {
            double w = double(i) / samples;
            double x = potential(cplx(w, 0.0)).a22.real();
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    }
};

inline void validate_strip(const StripModel& m) {
    if (std::abs(m.hop.det()) > 1e-14) throw std::invalid_argument("strip: hop matrix must be singular");
    if (m.fourier.empty()) throw std::invalid_argument("strip: empty Fourier data");
    if (m.fourier[0].max_abs_diff(adjoint(m.fourier[0])) > 1e-14)
        throw std::invalid_argument("strip: V^(0) must be Hermitian");
}

// Eq. (3) operator: C = J = [[1,0],[0,0]],
// V(w) = lambda [[cos 2pi w, i sin 2pi w], [-i sin 2pi w, -cos 2pi w]].
inline StripModel make_type3(double lambda, const Frequency& freq, const Frequency& freq_doubled) {
    if (lambda <= 0) throw std::invalid_argument("type3: lambda must be positive");
    StripModel m;
    m.preset = StripPreset::TypeIII;
    m.lambda = lambda;
    m.hop = {1.0, 0.0, 0.0, 0.0};
    double h = 0.5 * lambda;
    m.fourier = {Mat2C{0, 0, 0, 0}, Mat2C{h, h, -h, -h}};
    m.freq = freq;
    m.freq_doubled = freq_doubled;
    validate_strip(m);
    return m;
}

// strip form of the TypeII chain: C = [[0,0],[lambda,0]], V(w) = cos 2pi w * ones
inline StripModel make_type2_strip(double lambda, const Frequency& freq,
                                   const Frequency& freq_doubled) {
    StripModel m;
    m.preset = StripPreset::TypeIIStrip;
    m.lambda = lambda;
    m.hop = {0.0, 0.0, lambda, 0.0};
    m.fourier = {Mat2C{0, 0, 0, 0}, Mat2C{0.5, 0.5, 0.5, 0.5}};
    m.freq = freq;
    m.freq_doubled = freq_doubled;
    validate_strip(m);
    return m;
}

// strip form of the Mosaic chain: C = [[0,0],[1,0]],
// V(w) = [[2 lambda cos 2pi w, 1],[1, 0]]
inline StripModel make_mosaic_strip(double lambda, const Frequency& freq,
                                    const Frequency& freq_doubled) {
    StripModel m;
    m.preset = StripPreset::MosaicStrip;
    m.lambda = lambda;
    m.hop = {0.0, 0.0, 1.0, 0.0};
    m.fourier = {Mat2C{0, 1, 1, 0}, Mat2C{lambda, 0, 0, 0}};
    m.freq = freq;
    m.freq_doubled = freq_doubled;
    validate_strip(m);
    return m;
}

inline StripModel make_custom_strip(const Mat2C& hop, std::vector<Mat2C> fourier,
                                    const Frequency& freq, const Frequency& freq_doubled) {
    StripModel m;
    m.preset = StripPreset::Custom;
    m.hop = hop;
    m.fourier = std::move(fourier);
    m.freq = freq;
    m.freq_doubled = freq_doubled;
    validate_strip(m);
    return m;
}

inline Mat2C strip_potential(const StripModel& m, double omega, long n) {
    return m.potential_at_site(omega, n);
}

// ---------------------------------------------------------------------------
// Closed-form Lyapunov exponent of the TypeII chain on its spectrum:
// (1/2) ln |(|E| + sqrt(E^2 - lambda^2)) / lambda|, zero for |E| <= lambda.
// ---------------------------------------------------------------------------
inline double closed_form_le(double E, double lambda) {
    double a = std::fabs(E);
    if (a <= lambda) return 0.0;
    return 0.5 * std::log((a + std::sqrt(E * E - lambda * lambda)) / lambda);
}

// ---------------------------------------------------------------------------
// W = sigma \ [-lambda, lambda]: the subcritical window of the strip models.
// Spectrum membership is approximated by distance to finite-restriction
// eigenvalues supplied by the caller.
// ---------------------------------------------------------------------------
struct SubcriticalWindow {
    double lambda = 0.0;
    std::vector<double> spectrum_samples;  // sorted finite-restriction eigenvalues
    double spectrum_tol = 0.02;

    bool in_spectrum(double E) const {
        auto it = std::lower_bound(spectrum_samples.begin(), spectrum_samples.end(), E);
        double d = std::numeric_limits<double>::infinity();
        if (it != spectrum_samples.end()) d = std::min(d, std::fabs(*it - E));
        if (it != spectrum_samples.begin()) d = std::min(d, std::fabs(*(it - 1) - E));
        return d <= spectrum_tol;
    }

    bool operator()(double E) const { return std::fabs(E) > lambda && in_spectrum(E); }
};

inline SubcriticalWindow subcritical_window(const StripModel& m, std::vector<double> spectrum,
                                            double tol = 0.02) {
    std::sort(spectrum.begin(), spectrum.end());
    return SubcriticalWindow{m.lambda, std::move(spectrum), tol};
}

// ---------------------------------------------------------------------------
// Scalar reduction of the strip cocycle:
//   A^z(w) = [[z - V11(w) - V12(w) V21(w)/(z - V22(w)), -1], [1, 0]],
// stepping w by 2 alpha.  For the TypeIII model the upper-left entry is
// (z^2 - lambda^2)/(z + lambda cos 2pi w).
// ---------------------------------------------------------------------------
struct ReducedStripSampler {
    const StripModel* model = nullptr;
    cplx z{0.0, 0.0};
    double pole_tol = 0.0;

    cplx effective_potential(cplx omega) const {
        Mat2C V = model->potential(omega);
        cplx den = z - V.a22;
        if (std::abs(den) < pole_tol)
            throw PoleError("reduce_strip_to_scalar: z too close to Ran(V22) on the orbit");
        return z - V.a11 - V.a12 * V.a21 / den;
    }

    Mat2C operator()(cplx omega) const {
        return Mat2C{effective_potential(omega), cplx(-1.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.0)};
    }
};

inline ReducedStripSampler reduce_strip_to_scalar(const StripModel& m, cplx z,
                                                  double rel_pole_tol = 1e-10) {
    double scale = std::max(1.0, std::fabs(m.lambda));
    return ReducedStripSampler{&m, z, rel_pole_tol * scale};
}

}  // namespace quasispec
