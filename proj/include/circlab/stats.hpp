// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "circlab/types.hpp"

namespace circlab::stats
{

//! Per-trial summary used by every Monte Carlo aggregation.
struct TrialRecord
{
    int n = 0;
    std::uint64_t index = 0;
    std::uint64_t seed = 0;
    double min_scaled = kInfinity;
    std::map<Interval, long> window_counts;
    bool pairing_agreed = false;
    int pairing_nu = 0;
    int pairing_mu = 0;
    //! Arguments of annulus roots and their scaled distances.
    std::vector<double> args;
    std::vector<double> arg_scaled;
    bool ok = true;
    std::string error;
};

struct SubTest
{
    std::string name;
    double value = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

//! passed iff statistic <= threshold.
struct TestReport
{
    double statistic = 0.0;
    double threshold = 0.0;
    bool passed = false;
    std::size_t sample_size = 0;
    std::string notes;
    std::vector<SubTest> details;
};

//! Streaming mean and variance (Welford), mergeable.
class RunningStats
{
  public:
    void add(double x);
    void merge(RunningStats const& other);

    std::size_t count() const { return count_; }
    double mean() const { return mean_; }
    double variance() const;
    double std_error() const;

  private:
    std::size_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

//! 1 - exp(-t / mean).
double exp_cdf(double t, double mean);

//! Kolmogorov-Smirnov distance between the samples and a cdf.
double ks_statistic(std::vector<double> samples,
                    std::function<double(double)> const& cdf);

//! Mean of N (N - 1) ... (N - k + 1) over the counts.
double factorial_moment(std::vector<long> const& counts, int k);

//! Sample standard error of the k-th factorial moment.
double factorial_moment_std_error(std::vector<long> const& counts, int k);

//! Pearson correlation; zero when either sample has no variance.
double correlation(std::vector<long> const& a, std::vector<long> const& b);

//! Counts of one window over all records (throws if a record lacks it).
std::vector<long> window_series(std::vector<TrialRecord> const& records,
                                Interval const& window);

inline constexpr double kIntensity = 1.0 / 12.0;

struct PoissonTestOptions
{
    double intensity = kIntensity;
    std::size_t min_trials = 500;
    double model_slack = 0.10;
    double sigmas = 3.0;
};

/*!
 * Factorial moments k = 1, 2 of each window against (intensity |U|)^k
 * within sigmas standard errors plus model_slack of the target, and the
 * correlation of every disjoint window pair within sigmas / sqrt(N).
 * The statistic is the largest deviation over its tolerance (threshold 1).
 */
TestReport poisson_window_test(std::vector<TrialRecord> const& records,
                               IntervalSet const& windows,
                               PoissonTestOptions const& opts = {});

/*!
 * KS test of pooled annulus-root arguments with scaled distance in the
 * window against the uniform law on [delta, pi - delta], delta = n^{-1/2}.
 * Threshold coefficient / sqrt(N).
 */
TestReport arg_uniformity_test(std::vector<TrialRecord> const& records,
                               Interval const& window,
                               double coefficient = 1.95,
                               std::size_t min_trials = 500);

}  // namespace circlab::stats
