// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "circlab/roots.hpp"
#include "circlab/types.hpp"

namespace circlab::process
{

//! Scaled upper-half roots of one draw.
struct NuMeasure
{
    std::vector<roots::AnnulusPoint> points;
    int n = 0;

    std::size_t count(Interval const& s) const;
    std::size_t count(IntervalSet const& s) const;
};

//! One (x, y) pair of zeros of X and Y within the proximity cutoff.
struct MuPair
{
    double x = 0.0;
    double y = 0.0;
    //! X'(x) and Y'(y).
    double dx = 0.0;
    double dy = 0.0;
    double gamma = 0.0;
    bool regular = false;
};

struct MuMeasure
{
    std::vector<MuPair> pairs;
    int n = 0;
    //! Proximity cutoff n^{-2} (log n)^4 times the multiplier.
    double cutoff = 0.0;
    double cutoff_multiplier = 1.0;

    std::size_t count(Interval const& s) const;
    std::size_t count(IntervalSet const& s) const;
};

//! One unmatched point with the circle distance to the nearest point of the
//! other process (infinity when the other side is empty).
struct Mismatch
{
    double angle = 0.0;
    double value = 0.0;
    double nearest_distance = 0.0;
};

struct PairingReport
{
    Interval interval;
    int nu_count = 0;
    int mu_count = 0;
    bool agreed = false;
    std::vector<Mismatch> unmatched_roots;
    std::vector<Mismatch> unmatched_pairs;
};

//! (x - y) X'(x) Y'(y) n^2 / (X'(x)^2 + Y'(y)^2); zero when x == y.
double collision_statistic(double x, double y, double dx, double dy, int n);

NuMeasure nu_measure(roots::RootSet const& rs, int n);

/*!
 * All pairs of X-zeros and Y-zeros closer than the proximity cutoff,
 * found by a two-pointer sweep over the sorted lists.
 */
MuMeasure mu_measure(roots::CircleZeroSet const& zx,
                     roots::CircleZeroSet const& zy, int n,
                     double cutoff_multiplier = 1.0);

PairingReport pairing_check(NuMeasure const& nu, MuMeasure const& mu,
                            Interval const& interval);

/*!
 * Root predicted by a regular pair: (1 + gamma/n^2) e^{i theta} with theta
 * the X'^2, Y'^2 weighted mean of x and y. Throws std::invalid_argument if
 * either derivative is below the floor n^{3/2}/log n.
 */
std::complex<double> predict_root_from_pair(double x, double y, double dx,
                                            double dy, int n);

/*!
 * Linearized zeros (x, y) of X and Y next to a root at angle theta, from
 * X'(theta) and Y'(theta). Throws when the derivative floor fails.
 */
std::pair<double, double> predict_pair_from_root(std::complex<double> zeta,
                                                 double dx, double dy, int n);

//! Minimum |scaled distance|; +infinity for an empty measure.
double min_scaled_distance(NuMeasure const& nu);

//! Upper-half roots with scaled distance in [-M, M] and argument within
//! n^{-eps} of 0 or pi.
int near_axis_scan(roots::RootSet const& rs, int n, double M, double eps);

}  // namespace circlab::process
