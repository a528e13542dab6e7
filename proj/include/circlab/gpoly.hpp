// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "circlab/types.hpp"

namespace circlab::gpoly
{

enum class Law
{
    gaussian,
    rademacher
};

std::string_view to_string(Law law);
Law parse_law(std::string_view text);

/*!
 * Coefficients eps_0 .. eps_n of f(z) = sum eps_k z^k for one draw.
 *
 * Sampled vectors always have degree >= 1. Hand-built vectors (tests,
 * planted-root constructions) may be of any length >= 1.
 */
class CoefficientVector
{
  public:
    CoefficientVector() = default;

    //! Wrap explicit coefficients (constant term first).
    static CoefficientVector from_coeffs(std::vector<double> coeffs,
                                         Law law = Law::gaussian,
                                         std::uint64_t seed = 0);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    std::vector<double> const& coeffs() const { return coeffs_; }
    double operator[](std::size_t k) const { return coeffs_[k]; }
    Law law() const { return law_; }
    std::uint64_t seed() const { return seed_; }

    //! Multiply every coefficient by a nonzero constant.
    CoefficientVector scaled(double factor) const;

    bool operator==(CoefficientVector const&) const = default;

  private:
    std::vector<double> coeffs_;
    Law law_ = Law::gaussian;
    std::uint64_t seed_ = 0;
};

//! X^(j), Y^(j) at one angle.
struct TrigDerivative
{
    double x = 0.0;
    double y = 0.0;
};

/*!
 * Values of X = Re f(e^{i t}) and Y = Im f(e^{i t}) on m uniform angles.
 *
 * Holds a copy of the coefficients so refinement (zero finding) can
 * evaluate between grid points.
 */
struct CircleSample
{
    CoefficientVector poly;
    int m = 0;
    std::vector<double> angles;
    std::vector<double> x_values;
    std::vector<double> y_values;
    //! order -> (X^(j), Y^(j)) on the grid, for orders >= 1 requested.
    std::map<int, std::pair<std::vector<double>, std::vector<double>>>
        derivative_orders;
};

//! Draw eps_0..eps_n iid from the given law; deterministic in (n, seed, law).
CoefficientVector sample_polynomial(int n, std::uint64_t seed, Law law);

//! Horner evaluation of f at z.
std::complex<double> eval_complex(CoefficientVector const& f,
                                  std::complex<double> z);

//! f(e^{i x}) = X(x) + i Y(x).
std::complex<double> eval_on_circle(CoefficientVector const& f, double x);

//! Grid evaluation via a real-to-complex FFT of the zero-padded coefficients.
CircleSample eval_circle_grid(CoefficientVector const& f, int m,
                              int max_derivative_order = 0);

/*!
 * Direct summation of X^(j)(x) = sum eps_k k^j cos(kx + j pi/2) and the
 * matching Y^(j), for j = 0..max_order (max_order <= 6).
 */
std::vector<TrigDerivative> eval_derivatives(CoefficientVector const& f,
                                             double x, int max_order);

//! X'(x) and Y'(x) only; the hot path of zero refinement.
TrigDerivative eval_first_derivative(CoefficientVector const& f, double x);

/*!
 * max_{|z|=1} |f(z)|: argmax over 16(n+1) grid points, refined by a
 * golden-section ascent within one grid cell on either side.
 */
double sup_norm_circle(CoefficientVector const& f);

}  // namespace circlab::gpoly
