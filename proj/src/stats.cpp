// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#include "circlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace circlab::stats
{

void RunningStats::add(double x)
{
    ++count_;
    double const delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
}

void RunningStats::merge(RunningStats const& other)
{
    if (other.count_ == 0)
        return;
    if (count_ == 0)
    {
        *this = other;
        return;
    }
    double const na = static_cast<double>(count_);
    double const nb = static_cast<double>(other.count_);
    double const delta = other.mean_ - mean_;
    double const total = na + nb;
    mean_ += delta * nb / total;
    m2_ += other.m2_ + delta * delta * na * nb / total;
    count_ += other.count_;
}

double RunningStats::variance() const
{
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
}

double RunningStats::std_error() const
{
    return count_ > 1 ? std::sqrt(variance() / static_cast<double>(count_))
                      : kInfinity;
}

double exp_cdf(double t, double mean)
{
    if (!(mean > 0.0))
        throw std::invalid_argument("exponential mean must be positive");
    if (t <= 0.0)
        return 0.0;
    return -std::expm1(-t / mean);
}

double ks_statistic(std::vector<double> samples,
                    std::function<double(double)> const& cdf)
{
    if (samples.empty())
        throw std::invalid_argument("KS statistic of an empty sample");
    std::sort(samples.begin(), samples.end());
    double const m = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
        double const f = cdf(samples[i]);
        d = std::max({d, static_cast<double>(i + 1) / m - f,
                      f - static_cast<double>(i) / m});
    }
    return d;
}

namespace
{
double falling(long c, int k)
{
    double v = 1.0;
    for (int j = 0; j < k; ++j)
        v *= static_cast<double>(c - j);
    return v;
}

RunningStats falling_stats(std::vector<long> const& counts, int k)
{
    if (k < 1)
        throw std::invalid_argument("factorial moment order must be >= 1");
    RunningStats rs;
    for (long c : counts)
        rs.add(falling(c, k));
    return rs;
}

}  // namespace

double factorial_moment(std::vector<long> const& counts, int k)
{
    if (counts.empty())
        throw std::invalid_argument("factorial moment of an empty sample");
    return falling_stats(counts, k).mean();
}

double factorial_moment_std_error(std::vector<long> const& counts, int k)
{
    return falling_stats(counts, k).std_error();
}

double correlation(std::vector<long> const& a, std::vector<long> const& b)
{
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("correlation needs equal non-empty samples");
    double const m = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        ma += static_cast<double>(a[i]);
        mb += static_cast<double>(b[i]);
    }
    ma /= m;
    mb /= m;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        double const da = static_cast<double>(a[i]) - ma;
        double const db = static_cast<double>(b[i]) - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0)
        return 0.0;
    return sab / std::sqrt(saa * sbb);
}

std::vector<long> window_series(std::vector<TrialRecord> const& records,
                                Interval const& window)
{
    std::vector<long> out;
    out.reserve(records.size());
    for (auto const& r : records)
    {
        auto it = r.window_counts.find(window);
        if (it == r.window_counts.end())
            throw std::invalid_argument("record has no count for window " +
                                        to_string(window));
        out.push_back(it->second);
    }
    return out;
}

TestReport poisson_window_test(std::vector<TrialRecord> const& records,
                               IntervalSet const& windows,
                               PoissonTestOptions const& opts)
{
    TestReport report;
    report.threshold = 1.0;
    report.sample_size = records.size();
    if (windows.empty())
        throw std::invalid_argument("no windows to test");
    if (records.size() < opts.min_trials)
    {
        std::ostringstream os;
        os << "need at least " << opts.min_trials << " trials, got "
           << records.size();
        report.notes = os.str();
        report.statistic = kInfinity;
        return report;
    }

    std::vector<std::vector<long>> series;
    for (auto const& w : windows)
        series.push_back(window_series(records, w));

    double worst = 0.0;
    for (std::size_t i = 0; i < windows.size(); ++i)
    {
        double const lam = opts.intensity * windows[i].length();
        for (int k = 1; k <= 2; ++k)
        {
            SubTest t;
            t.name = "E[N_k] k=" + std::to_string(k) + " " +
                     to_string(windows[i]);
            t.value = factorial_moment(series[i], k);
            t.target = std::pow(lam, k);
            t.tolerance = opts.sigmas * factorial_moment_std_error(series[i], k) +
                          opts.model_slack * t.target;
            double const dev = std::abs(t.value - t.target);
            t.passed = dev <= t.tolerance;
            worst = std::max(worst, t.tolerance > 0.0 ? dev / t.tolerance
                                                      : (dev > 0 ? kInfinity : 0.0));
            report.details.push_back(t);
        }
    }
    double const corr_tol =
        opts.sigmas / std::sqrt(static_cast<double>(records.size()));
    for (std::size_t i = 0; i < windows.size(); ++i)
    {
        for (std::size_t j = i + 1; j < windows.size(); ++j)
        {
            if (!windows[i].disjoint_from(windows[j]))
                continue;
            SubTest t;
            t.name = "corr " + to_string(windows[i]) + " " + to_string(windows[j]);
            t.value = correlation(series[i], series[j]);
            t.tolerance = corr_tol;
            t.passed = std::abs(t.value) <= corr_tol;
            worst = std::max(worst, std::abs(t.value) / corr_tol);
            report.details.push_back(t);
        }
    }
    report.statistic = worst;
    report.passed = report.statistic <= report.threshold;
    return report;
}

TestReport arg_uniformity_test(std::vector<TrialRecord> const& records,
                               Interval const& window, double coefficient,
                               std::size_t min_trials)
{
    TestReport report;
    if (records.empty())
    {
        report.notes = "no trials";
        report.statistic = kInfinity;
        return report;
    }
    int const n = records.front().n;
    double const delta = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> pooled;
    for (auto const& r : records)
    {
        if (r.n != n)
            throw std::invalid_argument("records mix polynomial degrees");
        for (std::size_t i = 0; i < r.args.size(); ++i)
        {
            double const a = r.args[i];
            if (window.contains(r.arg_scaled[i]) && a >= delta && a <= kPi - delta)
                pooled.push_back(a);
        }
    }
    report.sample_size = pooled.size();
    if (records.size() < min_trials)
    {
        report.notes = "need at least " + std::to_string(min_trials) +
                       " trials, got " + std::to_string(records.size());
        report.statistic = kInfinity;
        return report;
    }
    if (pooled.empty())
    {
        report.notes = "no arguments in the window";
        report.statistic = kInfinity;
        return report;
    }
    double const span = kPi - 2.0 * delta;
    report.statistic = ks_statistic(pooled, [&](double a) {
        return std::clamp((a - delta) / span, 0.0, 1.0);
    });
    report.threshold = coefficient / std::sqrt(static_cast<double>(pooled.size()));
    report.passed = report.statistic <= report.threshold;
    return report;
}

}  // namespace circlab::stats
