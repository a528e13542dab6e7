// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "circlab/kacrice.hpp"
#include "circlab/types.hpp"

namespace circlab::experiments
{

//! Largest |normalized finite covariance - limit covariance| over a T0 grid.
struct KernelError
{
    int n = 0;
    double max_error = 0.0;
    double x = 0.0;
    double y = 0.0;
    std::string entry;
};

/*!
 * Grid of `grid` points spanning T0 (endpoints at the margin), all ordered
 * pairs, fields (X,X), (X,Y), (Y,Y) and orders 0..1. The finite entry is
 * normalized by n^{a+b+1}; the limit is taken at (n x, n y) with X -> W,
 * Y -> Z.
 */
KernelError kernel_error(int n, int grid = 24);

//! Normalized Cov(X'(x), Y(y), Y'(y), X(x)) against the near-diagonal limit.
struct EarlyApprox
{
    Eigen::Matrix4d finite;
    Eigen::Matrix4d reference;
    double max_entry_error = 0.0;
    //! Var(X'(x) n^{-3/2} | X(x) = Y(y) = 0).
    double conditional_variance = 0.0;
    double conditional_error = 0.0;
};

Eigen::Matrix4d early_approx_reference();

EarlyApprox early_approx_block(int n, double x, double y);

struct ZeroCountCheck
{
    int n = 0;
    int trials = 0;
    kacrice::Field which = kacrice::Field::X;
    Interval interval;
    double empirical_mean = 0.0;
    double empirical_std_error = 0.0;
    double kacrice = 0.0;
    //! |empirical - kacrice| / kacrice.
    double rel_diff = 0.0;
    //! Both counts scaled by pi / |interval|.
    double empirical_full = 0.0;
    double kacrice_full = 0.0;
    //! n / sqrt(3).
    double reference_full = 0.0;
};

ZeroCountCheck zero_count_check(int n, int trials, std::uint64_t base_seed,
                                kacrice::Field which, Interval interval,
                                int workers = 1);

struct CovarianceCheck
{
    std::string name;
    double empirical = 0.0;
    double expected = 0.0;
    double std_error = 0.0;
    bool passed = false;
};

/*!
 * Empirical covariances of the spectral (W, Z) simulator over `seeds`
 * independent paths against limit_cov, each within `sigmas` standard errors.
 */
std::vector<CovarianceCheck> limit_process_check(int seeds,
                                                 std::uint64_t base_seed,
                                                 int spectral_nodes = 128,
                                                 double sigmas = 3.0);

struct RootCertification
{
    int n = 0;
    int draws = 0;
    int count_failures = 0;
    int closure_failures = 0;
    int residual_failures = 0;
    int convergence_failures = 0;
    //! Largest |f(root)| / (sup_norm max(1, |root|)^n) over |root| in [0.5, 2].
    double max_rel_residual = 0.0;
    //! Largest distance from a root to its nearest conjugate partner.
    double max_conjugate_mismatch = 0.0;
};

RootCertification certify_roots(int n, int draws, std::uint64_t base_seed,
                                int workers = 1);

struct PlantedRecovery
{
    int n = 0;
    int trials = 0;
    double max_error = 0.0;
};

/*!
 * Conjugate-closed roots at radius 1 + c/n^2 (|c| <= 3) and stratified
 * arguments, expanded into real coefficients and solved again.
 */
PlantedRecovery planted_root_recovery(int n, int trials, std::uint64_t seed);

struct BoundsOptions
{
    std::uint64_t seed = 0xB0B0ull;
    int p1_configs = 64;
    int p2_configs = 16;
    int det2_configs = 1000;
    int num2_configs = 8;
    int mc_samples = 100000;
};

struct BoundsRow
{
    int n = 0;
    //! max p_1 n^{-2} over sampled pairs within the cutoff.
    double p1_sup = 0.0;
    //! max p_2 n^{-4} over separated configurations.
    double p2_sup = 0.0;
    double det1_min = 0.0;
    double det1_max = 0.0;
    double det2_min = 0.0;
    //! min bound ratio over a shrinking-gap sweep of a coincident pair.
    double det2_sweep_floor = 0.0;
    double det2_sweep_start = 0.0;
    double num1_mean = 0.0;
    double num2_separated = 0.0;
    //! x pair at distance 1/(2n), y pair separated.
    double num2_clustered = 0.0;
};

/*!
 * Density, determinant and numerator monitors at one degree. Locations are
 * drawn in scaled coordinates (offsets in units of 1/n and 1/n^2) from a
 * fixed seed, so every n sees the same configurations.
 */
BoundsRow bounds_row(int n, BoundsOptions const& opts = {});

}  // namespace circlab::experiments
