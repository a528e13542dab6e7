// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "circlab/types.hpp"

namespace circlab::kacrice
{

//! X, Y are the finite-n trigonometric sums; W, Z the limit process.
enum class Field
{
    X,
    Y,
    W,
    Z
};

std::string to_string(Field f);

//! One row of a covariance matrix: a derivative of a field at a location.
struct RowLabel
{
    Field field = Field::X;
    int order = 0;
    double location = 0.0;

    bool operator==(RowLabel const&) const = default;
};

struct CovarianceMatrix
{
    Eigen::MatrixXd entries;
    std::vector<RowLabel> labels;

    int dim() const { return static_cast<int>(entries.rows()); }
    double min_eigenvalue() const;
    //! Smallest eigenvalue at least -1e-9 times the largest diagonal entry.
    bool is_psd() const;
    bool is_symmetric(double rel_tol = 1e-12) const;
};

struct ConditionedGaussian
{
    CovarianceMatrix base;
    std::vector<int> conditioned_indices;
    std::vector<int> free_indices;
    //! Schur complement on the free indices.
    CovarianceMatrix reduced;
};

enum class DensityMethod
{
    closed_form_expectation,
    gauss_hermite,
    monte_carlo
};

std::string to_string(DensityMethod m);

struct DensityEval
{
    double value = 0.0;
    double numerator = 0.0;
    double det_sigma = 0.0;
    DensityMethod method = DensityMethod::closed_form_expectation;
    double rel_error_estimate = 0.0;
    //! Coincident points: the density is set to zero.
    bool degenerate = false;
};

struct DirichletSum
{
    //! sum_{k=0}^n k^d cos(kx)
    double d = 0.0;
    //! sum_{k=0}^n k^d sin(kx)
    double s = 0.0;
};

DirichletSum dirichlet_sum(int n, int d, double x);

//! Cov(F^(a)(x), G^(b)(y)) for F, G in {X, Y}, exact at degree n.
double cov_finite(int n, Field F, int a, Field G, int b, double x, double y);

//! Cov(F^(a)(t), G^(b)(s)) for F, G in {W, Z}.
double limit_cov(Field F, int a, Field G, int b, double t, double s);

/*!
 * Covariance of X/Y derivative rows at degree n. With `normalized`, the
 * order-j rows are divided by n^{j+1/2}. Rows must be distinct.
 */
CovarianceMatrix covariance_block(int n, std::vector<RowLabel> const& spec,
                                  bool normalized = false);

//! Covariance of W/Z derivative rows.
CovarianceMatrix limit_block(std::vector<RowLabel> const& spec);

/*!
 * Condition on the pinned coordinates being zero (Schur complement).
 * Throws std::domain_error naming the most correlated pinned rows when the
 * pinned block is numerically singular.
 */
ConditionedGaussian condition_on_zeros(CovarianceMatrix const& block,
                                       std::vector<int> const& pinned);

struct P1Options
{
    DensityMethod method = DensityMethod::closed_form_expectation;
    //! Gauss-Hermite nodes per dimension.
    int nodes = 64;
    //! Replace the exact conditioned covariance by n^3/24 I and det by n^2/4.
    bool idealized = false;
    double cutoff_multiplier = 1.0;
};

/*!
 * p_1(x, y, U): E[|X'(x) Y'(y)| 1(gamma in U) | X(x) = Y(y) = 0] divided by
 * 2 pi det(Cov(X(x), Y(y)))^{1/2}. Zero when |x - y| exceeds the pair cutoff.
 *
 * The default method integrates the conditioned Gaussian in polar
 * coordinates: gamma depends on the angle only, the radial integral is
 * exact, and the angular integral runs over the arcs where gamma lies in U.
 */
DensityEval p1_density(int n, double x, double y, IntervalSet const& U,
                       P1Options const& opts = {});

struct MeanMuOptions
{
    //! Panels of the composite 4-point Gauss-Legendre rule in x.
    int x_panels = 32;
    //! Gauss-Legendre nodes per r segment.
    int r_nodes = 16;
    double cutoff_multiplier = 1.0;
};

//! Integral of p_1 over x in T0 and |x - y| < n^{-2} (log n)^4.
double mean_mu_integral(int n, IntervalSet const& U,
                        MeanMuOptions const& opts = {});

struct MonteCarloOptions
{
    std::uint64_t seed = 0x5EEDull;
    int samples = 100000;
};

/*!
 * p_k(x, y) for k <= 3: Monte Carlo numerator over the conditioned 2k-dim
 * Gaussian of (X'(x_j), Y'(y_j)) and exact determinant. Coincident points
 * give value 0 with the degenerate flag.
 */
DensityEval pk_density(int n, std::vector<double> const& xs,
                       std::vector<double> const& ys,
                       MonteCarloOptions const& opts = {});

//! Expected number of zeros of X or Y in the interval (Kac-Rice intensity).
double kacrice_zero_count(int n, Field which, Interval interval);

//! Kac-Rice intensity of zeros of X or Y at x.
double zero_intensity(int n, Field which, double x);

//! Top row [y0], [y0, y1], ..., [y0..yk] of the divided-difference table.
std::vector<double> divided_differences(std::vector<double> const& xs,
                                        std::vector<double> const& ys);

//! Matrix of the linear map y -> divided_differences(xs, y).
Eigen::MatrixXd delta_matrix(std::vector<double> const& xs);

//! prod_{i<j} (x_j - x_i)^{-1}, accumulated in log space.
double delta_det(std::vector<double> const& xs);

//! log of prod_{i<j} min(|a_j - a_i|, 1/n)^2.
double log_min_gap_product(std::vector<double> const& a, int n);

struct DetMonitor
{
    double det = 0.0;
    double log_det = 0.0;
    double bound_ratio = 0.0;
};

//! det Cov(X(x_i), Y(y_i)) over n^{2k^2} prod min(gap, 1/n)^2.
DetMonitor det_lower_bound_monitor(int n, std::vector<double> const& xs,
                                   std::vector<double> const& ys);

struct NumeratorMonitor
{
    double alpha = 0.0;
    double ratio = 0.0;
    double rel_error = 0.0;
};

//! alpha_k by conditioned Monte Carlo over n^{2k^2+k} prod min(gap, 1/n)^2.
NumeratorMonitor numerator_bound_monitor(int n, std::vector<double> const& xs,
                                         std::vector<double> const& ys,
                                         MonteCarloOptions const& opts = {});

struct QuadraticForm
{
    double lhs = 0.0;
    double rhs = 0.0;
};

/*!
 * v^T Sigma v for the limit covariance of W^(j)(z_i), Z^(j)(z_i),
 * j = 0..s, against half the integral of |F_v|^2 over [0, 1].
 * v holds the W coefficients (index i (s+1) + j) followed by the Z ones.
 */
QuadraticForm quadratic_form_integral(std::vector<double> const& zs, int s,
                                      std::vector<double> const& v);

//! Row labels W^(j)(z_i) then Z^(j)(z_i), matching quadratic_form_integral.
std::vector<RowLabel> limit_labels(std::vector<double> const& zs, int s);

/*!
 * Smallest eigenvalue of the limit covariance of W^(j), Z^(j) at zs.
 * Computed as the squared smallest singular value of the quadrature-sampled
 * integral form, which resolves eigenvalues far below the rounding level of
 * a direct eigensolve of the assembled matrix.
 */
double min_eig_limit(std::vector<double> const& zs, int s);

struct LimitSample
{
    std::vector<double> w;
    std::vector<double> z;
};

//! One path of (W, Z) on the grid from a Gauss-Legendre spectral sum.
LimitSample simulate_limit_process(std::vector<double> const& grid,
                                   int spectral_nodes, std::uint64_t seed);

}  // namespace circlab::kacrice
