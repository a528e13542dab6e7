// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#include "circlab/process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace circlab::process
{
namespace
{
template<class Range, class Value>
std::size_t count_in(Range const& items, Value value, IntervalSet const& s)
{
    std::size_t total = 0;
    for (auto const& item : items)
    {
        if (contains(s, value(item)))
            ++total;
    }
    return total;
}

double circle_distance(double a, double b)
{
    double d = std::fmod(std::abs(a - b), 2.0 * kPi);
    return std::min(d, 2.0 * kPi - d);
}

void require_floor(double dx, double dy, int n)
{
    double const floor = derivative_floor(n);
    if (!(std::abs(dx) > floor && std::abs(dy) > floor))
        throw std::invalid_argument("derivatives below n^{3/2}/log n");
}

}  // namespace

std::size_t NuMeasure::count(Interval const& s) const
{
    return count(IntervalSet{s});
}

std::size_t NuMeasure::count(IntervalSet const& s) const
{
    return count_in(
        points, [](auto const& p) { return p.scaled_distance; }, s);
}

std::size_t MuMeasure::count(Interval const& s) const
{
    return count(IntervalSet{s});
}

std::size_t MuMeasure::count(IntervalSet const& s) const
{
    return count_in(pairs, [](auto const& p) { return p.gamma; }, s);
}

double collision_statistic(double x, double y, double dx, double dy, int n)
{
    double const r = x - y;
    if (r == 0.0)
        return 0.0;
    double const n2 = static_cast<double>(n) * n;
    return r * dx * dy * n2 / (dx * dx + dy * dy);
}

NuMeasure nu_measure(roots::RootSet const& rs, int n)
{
    NuMeasure nu;
    nu.n = n;
    nu.points = roots::annulus_roots(rs, n, {-kInfinity, kInfinity});
    return nu;
}

MuMeasure mu_measure(roots::CircleZeroSet const& zx,
                     roots::CircleZeroSet const& zy, int n,
                     double cutoff_multiplier)
{
    MuMeasure mu;
    mu.n = n;
    mu.cutoff_multiplier = cutoff_multiplier;
    mu.cutoff = pair_cutoff(n, cutoff_multiplier);
    double const floor = derivative_floor(n);

    auto const& xs = zx.zeros;
    auto const& ys = zy.zeros;
    std::size_t start = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        while (start < ys.size() && ys[start] < xs[i] - mu.cutoff)
            ++start;
        for (std::size_t j = start; j < ys.size(); ++j)
        {
            if (ys[j] > xs[i] + mu.cutoff)
                break;
            MuPair p;
            p.x = xs[i];
            p.y = ys[j];
            p.dx = zx.derivative_at_zero[i];
            p.dy = zy.derivative_at_zero[j];
            p.gamma = collision_statistic(p.x, p.y, p.dx, p.dy, n);
            p.regular = std::abs(p.dx) > floor && std::abs(p.dy) > floor;
            mu.pairs.push_back(p);
        }
    }
    return mu;
}

PairingReport pairing_check(NuMeasure const& nu, MuMeasure const& mu,
                            Interval const& interval)
{
    PairingReport report;
    report.interval = interval;

    std::vector<roots::AnnulusPoint> root_pts;
    for (auto const& p : nu.points)
    {
        if (interval.contains(p.scaled_distance))
            root_pts.push_back(p);
    }
    std::vector<MuPair> pair_pts;
    for (auto const& p : mu.pairs)
    {
        if (interval.contains(p.gamma))
            pair_pts.push_back(p);
    }
    report.nu_count = static_cast<int>(root_pts.size());
    report.mu_count = static_cast<int>(pair_pts.size());
    report.agreed = report.nu_count == report.mu_count;
    if (report.agreed)
        return report;

    auto pair_angle = [](MuPair const& p) { return 0.5 * (p.x + p.y); };

    // Greedy matching, closest (root, pair) first.
    std::vector<std::tuple<double, std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < root_pts.size(); ++i)
    {
        for (std::size_t j = 0; j < pair_pts.size(); ++j)
        {
            edges.emplace_back(
                circle_distance(root_pts[i].arg, pair_angle(pair_pts[j])), i,
                j);
        }
    }
    std::sort(edges.begin(), edges.end());
    std::vector<char> root_used(root_pts.size(), 0);
    std::vector<char> pair_used(pair_pts.size(), 0);
    for (auto const& [d, i, j] : edges)
    {
        if (root_used[i] || pair_used[j])
            continue;
        root_used[i] = pair_used[j] = 1;
    }

    for (std::size_t i = 0; i < root_pts.size(); ++i)
    {
        if (root_used[i])
            continue;
        double nearest = kInfinity;
        for (auto const& p : pair_pts)
            nearest = std::min(nearest,
                               circle_distance(root_pts[i].arg, pair_angle(p)));
        report.unmatched_roots.push_back(
            {root_pts[i].arg, root_pts[i].scaled_distance, nearest});
    }
    for (std::size_t j = 0; j < pair_pts.size(); ++j)
    {
        if (pair_used[j])
            continue;
        double nearest = kInfinity;
        for (auto const& p : root_pts)
            nearest = std::min(nearest,
                               circle_distance(p.arg, pair_angle(pair_pts[j])));
        report.unmatched_pairs.push_back(
            {pair_angle(pair_pts[j]), pair_pts[j].gamma, nearest});
    }
    return report;
}

std::complex<double> predict_root_from_pair(double x, double y, double dx,
                                            double dy, int n)
{
    require_floor(dx, dy, n);
    double const wx = dx * dx;
    double const wy = dy * dy;
    double const theta = (wx * x + wy * y) / (wx + wy);
    double const gamma = collision_statistic(x, y, dx, dy, n);
    double const n2 = static_cast<double>(n) * n;
    return std::polar(1.0 + gamma / n2, theta);
}

std::pair<double, double> predict_pair_from_root(std::complex<double> zeta,
                                                 double dx, double dy, int n)
{
    require_floor(dx, dy, n);
    double const theta = std::arg(zeta);
    double const rho = std::abs(zeta) - 1.0;
    return {theta + rho * dy / dx, theta - rho * dx / dy};
}

double min_scaled_distance(NuMeasure const& nu)
{
    double best = kInfinity;
    for (auto const& p : nu.points)
        best = std::min(best, std::abs(p.scaled_distance));
    return best;
}

int near_axis_scan(roots::RootSet const& rs, int n, double M, double eps)
{
    if (!(M > 0.0))
        throw std::invalid_argument("M must be positive");
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("eps must lie in (0, 1)");
    double const width = std::pow(static_cast<double>(n), -eps);
    int count = 0;
    for (auto const& p : roots::annulus_roots(rs, n, {-M, M}))
    {
        if (p.arg <= width || p.arg >= kPi - width)
            ++count;
    }
    return count;
}

}  // namespace circlab::process
