#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace quasispec {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;
// (sqrt(5)-1)/2
inline constexpr double golden_mean = 0.6180339887498948482;

inline double frac(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f -= 1.0;
    return f;
}

// ---------------------------------------------------------------------------
// Deterministic RNG. std::uniform_real_distribution is implementation
// defined, so draws are derived from raw 64-bit output directly.
// ---------------------------------------------------------------------------
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + int(next_u64() % std::uint64_t(hi - lo + 1));
    }

    // derive an independent stream, e.g. one per grid point
    Rng fork(std::uint64_t salt) const {
        Rng r(state_ ^ (0xd1342543de82ef95ull * (salt + 1)));
        r.next_u64();
        return r;
    }

private:
    std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Scaled real/complex values m * 2^e, for determinant recurrences whose
// magnitudes overflow doubles.
// ---------------------------------------------------------------------------
struct ScaledReal {
    double m = 0.0;  // 0, or |m| in [1,2)
    long e = 0;

    ScaledReal() = default;
    ScaledReal(double value) { set(value, 0); }
    ScaledReal(double mm, long ee) { set(mm, ee); }

    void set(double value, long ee) {
        if (value == 0.0 || !std::isfinite(value)) {
            m = value;
            e = 0;
            return;
        }
        int k;
        m = std::frexp(value, &k);  // m in [0.5,1)
        m *= 2.0;
        e = ee + k - 1;
    }

    double value() const { return std::ldexp(m, int(std::clamp(e, -2000L, 2000L))); }
    double log_abs() const { return std::log(std::fabs(m)) + double(e) * std::log(2.0); }
    int sign() const { return (m > 0) - (m < 0); }
    bool is_zero() const { return m == 0.0; }

    friend ScaledReal operator*(const ScaledReal& a, const ScaledReal& b) {
        ScaledReal r;
        r.set(a.m * b.m, a.e + b.e);
        return r;
    }
    friend ScaledReal operator/(const ScaledReal& a, const ScaledReal& b) {
        ScaledReal r;
        r.set(a.m / b.m, a.e - b.e);
        return r;
    }
    friend ScaledReal operator+(const ScaledReal& a, const ScaledReal& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        long d = a.e - b.e;
        if (d > 80) return a;
        if (d < -80) return b;
        ScaledReal r;
        if (d >= 0)
            r.set(a.m + std::ldexp(b.m, int(-d)), a.e);
        else
            r.set(std::ldexp(a.m, int(d)) + b.m, b.e);
        return r;
    }
    friend ScaledReal operator-(const ScaledReal& a, const ScaledReal& b) {
        ScaledReal nb = b;
        nb.m = -nb.m;
        return a + nb;
    }
};

struct ScaledComplex {
    cplx m{0.0, 0.0};
    long e = 0;

    ScaledComplex() = default;
    ScaledComplex(cplx value) { set(value, 0); }
    ScaledComplex(cplx mm, long ee) { set(mm, ee); }

    void set(cplx value, long ee) {
        double a = std::abs(value);
        if (a == 0.0 || !std::isfinite(a)) {
            m = value;
            e = 0;
            return;
        }
        int k;
        std::frexp(a, &k);
        m = cplx(std::ldexp(value.real(), -k + 1), std::ldexp(value.imag(), -k + 1));
        e = ee + k - 1;
    }

    cplx value() const {
        int k = int(std::clamp(e, -2000L, 2000L));
        return cplx(std::ldexp(m.real(), k), std::ldexp(m.imag(), k));
    }
    double log_abs() const { return std::log(std::abs(m)) + double(e) * std::log(2.0); }
    bool is_zero() const { return m == cplx(0.0, 0.0); }

    friend ScaledComplex operator*(const ScaledComplex& a, const ScaledComplex& b) {
        ScaledComplex r;
        r.set(a.m * b.m, a.e + b.e);
        return r;
    }
    friend ScaledComplex operator/(const ScaledComplex& a, const ScaledComplex& b) {
        ScaledComplex r;
        r.set(a.m / b.m, a.e - b.e);
        return r;
    }
    friend ScaledComplex operator+(const ScaledComplex& a, const ScaledComplex& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        long d = a.e - b.e;
        if (d > 80) return a;
        if (d < -80) return b;
        ScaledComplex r;
        if (d >= 0)
            r.set(a.m + cplx(std::ldexp(b.m.real(), int(-d)), std::ldexp(b.m.imag(), int(-d))), a.e);
        else
            r.set(cplx(std::ldexp(a.m.real(), int(d)), std::ldexp(a.m.imag(), int(d))) + b.m, b.e);
        return r;
    }
    friend ScaledComplex operator-(const ScaledComplex& a, const ScaledComplex& b) {
        ScaledComplex nb = b;
        nb.m = -nb.m;
        return a + nb;
    }
};

// ---------------------------------------------------------------------------
// Small parallel map. Tasks write to index-addressed slots so assembly order
// never depends on scheduling.
// ---------------------------------------------------------------------------
inline int default_thread_count() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : int(hc);
}

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                         int n_threads = 0) {
    if (n_threads <= 0) n_threads = default_thread_count();
    if (n_threads == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (n + std::size_t(n_threads) - 1) / std::size_t(n_threads);
    for (int t = 0; t < n_threads; ++t) {
        std::size_t lo = std::size_t(t) * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Statistics helpers
// ---------------------------------------------------------------------------
inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / double(v.size());
}

// bootstrap standard error of the mean
inline double bootstrap_stderr(const std::vector<double>& v, Rng rng, int resamples = 200) {
    if (v.size() < 2) return 0.0;
    std::vector<double> means(resamples);
    for (int r = 0; r < resamples; ++r) {
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) s += v[rng.uniform_int(0, int(v.size()) - 1)];
        means[r] = s / double(v.size());
    }
    double mu = mean(means), s2 = 0.0;
    for (double x : means) s2 += (x - mu) * (x - mu);
    return std::sqrt(s2 / double(resamples - 1));
}

// least-squares slope and intercept of y against x
struct LineFit {
    double slope = 0.0, intercept = 0.0;
};

inline LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::size_t n = std::min(x.size(), y.size());
    if (n < 2) throw std::invalid_argument("linear_fit: need at least 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double den = double(n) * sxx - sx * sx;
    LineFit f;
    f.slope = (double(n) * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / double(n);
    return f;
}

// periodic trapezoidal rule on [0,1)
template <class F>
double integrate_periodic(const F& f, int n_points) {
    double s = 0.0;
    for (int k = 0; k < n_points; ++k) s += f(double(k) / n_points);
    return s / n_points;
}

}  // namespace quasispec
