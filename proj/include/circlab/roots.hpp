// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <vector>

#include "circlab/gpoly.hpp"
#include "circlab/types.hpp"

namespace circlab::roots
{

//! All complex roots of one draw.
struct RootSet
{
    std::vector<std::complex<double>> roots;
    //! |f(root)| per root, after polishing.
    std::vector<double> residuals;
    int iterations = 0;
    bool converged = false;
};

enum class Target
{
    X,
    Y
};

//! Zeros of X or Y on the circle, restricted to T0, sorted.
struct CircleZeroSet
{
    std::vector<double> zeros;
    std::vector<double> derivative_at_zero;
    Target which = Target::X;
    //! Grid angles where a double zero is suspected (no sign change but a
    //! near-zero local extremum).
    std::vector<double> suspected_double_zeros;
};

//! Scaled distance (|z| - 1) n^2 and argument of one annulus root.
struct AnnulusPoint
{
    double scaled_distance = 0.0;
    double arg = 0.0;
};

struct RootFinderOptions
{
    double tol = 1e-13;
    int max_sweeps = 500;
};

/*!
 * Aberth-Ehrlich simultaneous iteration.
 *
 * Starts from n points on the circle of radius (|eps_0| / |eps_n|)^{1/n}
 * with equispaced, irrationally offset arguments; updates in place
 * (Gauss-Seidel order) and freezes roots whose relative correction drops
 * below tol. Every root is then polished with two Newton steps.
 * Throws std::invalid_argument when eps_n == 0.
 */
RootSet find_all_roots(gpoly::CoefficientVector const& f,
                       double tol = RootFinderOptions{}.tol,
                       int max_sweeps = RootFinderOptions{}.max_sweeps);

//! Divide out the factor z^j for all zero low-order coefficients.
gpoly::CoefficientVector deflate_zero_roots(gpoly::CoefficientVector const& f,
                                            int* removed = nullptr);

/*!
 * Upper-half-plane roots with (|z| - 1) n^2 in the window. Real roots
 * (|Im z| <= 1e-12) are included once.
 */
std::vector<AnnulusPoint> annulus_roots(RootSet const& rs, int n,
                                        Interval window);

//! True when z is kept as an upper-half-plane representative.
bool upper_half_representative(std::complex<double> z);

/*!
 * Zeros of X or Y in T0 from a circle sample.
 *
 * Sign changes between adjacent grid points are refined by Newton steps
 * kept inside the bracket (bisection fallback) until the bracket or the
 * step drops below 1e-14, then finished with one Newton step. Requires m >= 8(n+1); throws
 * std::domain_error when the target vanishes identically.
 */
CircleZeroSet trig_zeros(gpoly::CircleSample const& sample, Target which,
                         int n, double t0_multiplier = 1.0);

/*!
 * Minimum pairwise distance times n^2 among roots of the annulus window
 * (both half planes); +infinity with fewer than two roots.
 */
double min_root_gap(RootSet const& rs, int n, Interval window);

}  // namespace circlab::roots
