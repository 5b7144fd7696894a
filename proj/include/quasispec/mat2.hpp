#pragma once

#include <cmath>
#include <complex>

#include "quasispec/util.hpp"

namespace quasispec {

// 2x2 complex matrix, the cocycle step type.
struct Mat2C {
    cplx a11{0}, a12{0}, a21{0}, a22{0};

    static Mat2C identity() { return {1.0, 0.0, 0.0, 1.0}; }

    cplx det() const { return a11 * a22 - a12 * a21; }
    double norm_fro() const {
        return std::sqrt(std::norm(a11) + std::norm(a12) + std::norm(a21) + std::norm(a22));
    }

    Mat2C inverse() const {
        cplx d = det();
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }

    friend Mat2C operator*(const Mat2C& a, const Mat2C& b) {
        return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
                a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
    }
    friend Mat2C operator*(cplx s, const Mat2C& a) {
        return {s * a.a11, s * a.a12, s * a.a21, s * a.a22};
    }
    friend Mat2C operator-(const Mat2C& a, const Mat2C& b) {
        return {a.a11 - b.a11, a.a12 - b.a12, a.a21 - b.a21, a.a22 - b.a22};
    }

    void apply(cplx& x, cplx& y) const {
        cplx nx = a11 * x + a12 * y;
        cplx ny = a21 * x + a22 * y;
        x = nx;
        y = ny;
    }

    double max_abs_diff(const Mat2C& o) const {
        return std::max(std::max(std::abs(a11 - o.a11), std::abs(a12 - o.a12)),
                        std::max(std::abs(a21 - o.a21), std::abs(a22 - o.a22)));
    }
};

// Running cocycle product kept as exp(log_norm) * normalized_product, with
// ||normalized_product|| held in [1/2, 2] by renormalization.
struct LogProduct {
    double accumulated_log_norm = 0.0;
    Mat2C normalized_product = Mat2C::identity();
    long steps = 0;

    void push(const Mat2C& a) {
        normalized_product = a * normalized_product;
        ++steps;
        double n = normalized_product.norm_fro();
        if (n > 2.0 || n < 0.5) {
            accumulated_log_norm += std::log(n);
            cplx inv(1.0 / n, 0.0);
            normalized_product = inv * normalized_product;
        }
    }

    double total_log_norm() const {
        return accumulated_log_norm + std::log(normalized_product.norm_fro());
    }

    // log|det| of the full product
    double log_abs_det() const {
        return 2.0 * accumulated_log_norm + std::log(std::abs(normalized_product.det()));
    }

    // compose: this := other_later * this  (other spans the subsequent steps)
    void compose_after(const LogProduct& later) {
        normalized_product = later.normalized_product * normalized_product;
        accumulated_log_norm += later.accumulated_log_norm;
        steps += later.steps;
        double n = normalized_product.norm_fro();
        if (n > 2.0 || n < 0.5) {
            accumulated_log_norm += std::log(n);
            cplx inv(1.0 / n, 0.0);
            normalized_product = inv * normalized_product;
        }
    }
};

}  // namespace quasispec
