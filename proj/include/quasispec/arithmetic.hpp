#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "quasispec/util.hpp"

namespace quasispec {

struct RationalFrequencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateOrbitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// distance to the nearest integer, in [0, 1/2]
inline double torus_norm(double x) { return std::fabs(x - std::round(x)); }

// ---------------------------------------------------------------------------
// Continued-fraction data of an irrational in (0,1).
//
// x_k = floor(1/y_{k-1}), y_k = 1/y_{k-1} - x_k,
// p_k = x_k p_{k-1} + p_{k-2},  q_k = x_k q_{k-1} + q_{k-2},
// with p_0=0, p_1=1, q_0=1, q_1=x_1.  Convergents are stored from n=0, so
// convergent n=0 is p_0/q_0 = 0/1.
// ---------------------------------------------------------------------------
class Frequency {
public:
    Frequency() = default;

    double value() const { return value_; }
    const std::vector<std::int64_t>& cf_coeffs() const { return coeffs_; }
    int depth() const { return int(coeffs_.size()); }

    int num_convergents() const { return int(q_.size()); }
    std::int64_t p(int n) const { return p_.at(std::size_t(n)); }
    std::int64_t q(int n) const { return q_.at(std::size_t(n)); }

    static Frequency expand(double alpha, int depth);

private:
    double value_ = 0.0;
    std::vector<std::int64_t> coeffs_;   // x_1 .. x_depth
    std::vector<std::int64_t> p_, q_;    // indices 0 .. depth
};

inline Frequency cf_expand(double alpha, int depth) { return Frequency::expand(alpha, depth); }

inline Frequency Frequency::expand(double alpha, int depth) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("cf_expand: alpha must be in (0,1)");
    if (depth < 1) throw std::invalid_argument("cf_expand: depth must be >= 1");

    constexpr double rational_tol = 1e-14;

    Frequency f;
    f.value_ = alpha;
    f.p_ = {0};
    f.q_ = {1};
    std::int64_t pm1 = 1, qm1 = 0;  // p_{-1}, q_{-1}

    double y = alpha;
    for (int k = 1; k <= depth; ++k) {
        if (y < rational_tol)
            throw RationalFrequencyError("cf_expand: input is rational at working precision");
        double inv = 1.0 / y;
        auto x = std::int64_t(std::floor(inv));
        if (x < 1 || x > (std::int64_t(1) << 52))
            throw RationalFrequencyError("cf_expand: coefficient overflow, input close to rational");
        y = inv - double(x);

        std::int64_t pk = x * f.p_.back() + pm1;
        std::int64_t qk = x * f.q_.back() + qm1;
        pm1 = f.p_.back();
        qm1 = f.q_.back();
        f.coeffs_.push_back(x);
        f.p_.push_back(pk);
        f.q_.push_back(qk);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Diophantine diagnostic: margin = min_{0<k<=k_max} ||k a|| |k|^sigma / gamma.
// margin >= 1 certifies DC(gamma,sigma) among the tested k.
// ---------------------------------------------------------------------------
struct DiophantineReport {
    double margin = 0.0;
    std::int64_t worst_k = 0;
    double worst_norm = 0.0;  // ||k alpha||
};

inline DiophantineReport diophantine_margin(const Frequency& freq, double gamma, double sigma,
                                            std::int64_t k_max) {
    if (gamma <= 0 || sigma <= 0 || k_max < 1)
        throw std::invalid_argument("diophantine_margin: bad parameters");
    DiophantineReport rep;
    rep.margin = std::numeric_limits<double>::infinity();
    double alpha = freq.value();
    for (std::int64_t k = 1; k <= k_max; ++k) {
        double nrm = torus_norm(double(k) * alpha);
        double val = nrm * std::pow(double(k), sigma) / gamma;
        if (val < rep.margin) {
            rep.margin = val;
            rep.worst_k = k;
            rep.worst_norm = nrm;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// sum_{0<=l<=q_n-1, l!=l0} ln|sin pi(x+l a)|, l0 the index of minimal |sin|.
// The sum plus (q_n-1) ln 2 stays within C ln q_n of zero.
// ---------------------------------------------------------------------------
struct LnSinSum {
    double sum_excluding_min = 0.0;
    std::int64_t l0 = 0;
};

inline LnSinSum ln_sin_sum(double x, const Frequency& freq, int n) {
    if (n < 0 || n >= freq.num_convergents())
        throw std::invalid_argument("ln_sin_sum: convergent index out of range");
    std::int64_t qn = freq.q(n);
    double alpha = freq.value();

    LnSinSum out;
    double min_abs = std::numeric_limits<double>::infinity();
    std::vector<double> vals(std::size_t(qn));
    for (std::int64_t l = 0; l < qn; ++l) {
        double s = std::fabs(std::sin(pi * (x + double(l) * alpha)));
        if (s < 1e-300) throw DegenerateOrbitError("ln_sin_sum: orbit point hits an integer");
        vals[std::size_t(l)] = s;
        if (s < min_abs) {
            min_abs = s;
            out.l0 = l;
        }
    }
    for (std::int64_t l = 0; l < qn; ++l)
        if (l != out.l0) out.sum_excluding_min += std::log(vals[std::size_t(l)]);
    return out;
}

}  // namespace quasispec
