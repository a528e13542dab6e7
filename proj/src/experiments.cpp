// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#include "circlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "circlab/gpoly.hpp"
#include "circlab/parallel.hpp"
#include "circlab/roots.hpp"
#include "circlab/stats.hpp"

namespace circlab::experiments
{
namespace
{
using kacrice::Field;

Field limit_field(Field f)
{
    return f == Field::X ? Field::W : Field::Z;
}

}  // namespace

KernelError kernel_error(int n, int grid)
{
    if (grid < 2)
        throw std::invalid_argument("grid needs at least two points");
    double const m = t0_margin(n);
    double const nd = static_cast<double>(n);
    std::vector<double> pts(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i)
        pts[i] = m + (kPi - 2.0 * m) * i / (grid - 1);

    KernelError worst;
    worst.n = n;
    std::pair<Field, Field> const combos[] = {
        {Field::X, Field::X}, {Field::X, Field::Y}, {Field::Y, Field::Y}};
    for (auto [F, G] : combos)
    {
        for (int a = 0; a <= 1; ++a)
        {
            for (int b = 0; b <= 1; ++b)
            {
                double const norm = std::pow(nd, a + b + 1);
                for (double x : pts)
                {
                    for (double y : pts)
                    {
                        double const fin =
                            kacrice::cov_finite(n, F, a, G, b, x, y) / norm;
                        double const lim = kacrice::limit_cov(
                            limit_field(F), a, limit_field(G), b, nd * x, nd * y);
                        double const err = std::abs(fin - lim);
                        if (err > worst.max_error)
                        {
                            worst.max_error = err;
                            worst.x = x;
                            worst.y = y;
                            worst.entry = kacrice::to_string(F) + "^(" +
                                          std::to_string(a) + ") " +
                                          kacrice::to_string(G) + "^(" +
                                          std::to_string(b) + ")";
                        }
                    }
                }
            }
        }
    }
    return worst;
}

Eigen::Matrix4d early_approx_reference()
{
    Eigen::Matrix4d ref;
    ref << 1.0 / 6.0, -0.25, 0.0, 0.0,
           -0.25, 0.5, 0.0, 0.0,
           0.0, 0.0, 1.0 / 6.0, 0.25,
           0.0, 0.0, 0.25, 0.5;
    return ref;
}

EarlyApprox early_approx_block(int n, double x, double y)
{
    std::vector<kacrice::RowLabel> const spec = {{Field::X, 1, x},
                                                 {Field::Y, 0, y},
                                                 {Field::Y, 1, y},
                                                 {Field::X, 0, x}};
    auto const block = kacrice::covariance_block(n, spec, true);
    EarlyApprox out;
    out.finite = block.entries;
    out.reference = early_approx_reference();
    out.max_entry_error = (out.finite - out.reference).cwiseAbs().maxCoeff();
    auto const cond = kacrice::condition_on_zeros(block, {1, 3});
    out.conditional_variance = cond.reduced.entries(0, 0);
    out.conditional_error = std::abs(out.conditional_variance - 1.0 / 24.0);
    return out;
}

ZeroCountCheck zero_count_check(int n, int trials, std::uint64_t base_seed,
                                Field which, Interval interval, int workers)
{
    if (which != Field::X && which != Field::Y)
        throw std::invalid_argument("zero counts need field X or Y");
    if (trials < 2)
        throw std::invalid_argument("need at least two trials");
    std::vector<double> counts(static_cast<std::size_t>(trials));
    auto const target = which == Field::X ? roots::Target::X : roots::Target::Y;
    parallel_for(counts.size(), workers, [&](std::size_t t) {
        auto const f = gpoly::sample_polynomial(n, trial_seed(base_seed, t),
                                                gpoly::Law::gaussian);
        auto const grid = gpoly::eval_circle_grid(f, 8 * (n + 1));
        auto const zs = roots::trig_zeros(grid, target, n);
        counts[t] = static_cast<double>(std::count_if(
            zs.zeros.begin(), zs.zeros.end(),
            [&](double z) { return interval.contains(z); }));
    });
    stats::RunningStats rs;
    for (double c : counts)
        rs.add(c);

    ZeroCountCheck out;
    out.n = n;
    out.trials = trials;
    out.which = which;
    out.interval = interval;
    out.empirical_mean = rs.mean();
    out.empirical_std_error = rs.std_error();
    out.kacrice = kacrice::kacrice_zero_count(n, which, interval);
    out.rel_diff = std::abs(out.empirical_mean - out.kacrice) / out.kacrice;
    double const scale = kPi / interval.length();
    out.empirical_full = out.empirical_mean * scale;
    out.kacrice_full = out.kacrice * scale;
    out.reference_full = n / std::sqrt(3.0);
    return out;
}

std::vector<CovarianceCheck> limit_process_check(int seeds,
                                                 std::uint64_t base_seed,
                                                 int spectral_nodes,
                                                 double sigmas)
{
    if (seeds < 2)
        throw std::invalid_argument("need at least two seeds");
    std::vector<double> const grid = {0.0, 1.0, 2.5, kPi};
    struct Probe
    {
        Field F;
        int i;
        Field G;
        int j;
    };
    // Index pairs into the grid.
    std::vector<Probe> const probes = {
        {Field::W, 0, Field::W, 0}, {Field::Z, 0, Field::Z, 0},
        {Field::W, 0, Field::Z, 0}, {Field::W, 1, Field::W, 0},
        {Field::W, 2, Field::W, 0}, {Field::Z, 1, Field::Z, 0},
        {Field::W, 3, Field::Z, 0}, {Field::W, 0, Field::Z, 3},
        {Field::W, 1, Field::Z, 0}};

    std::vector<stats::RunningStats> acc(probes.size());
    for (int s = 0; s < seeds; ++s)
    {
        auto const path = kacrice::simulate_limit_process(
            grid, spectral_nodes, trial_seed(base_seed, static_cast<std::uint64_t>(s)));
        for (std::size_t p = 0; p < probes.size(); ++p)
        {
            auto const& pr = probes[p];
            double const u = pr.F == Field::W ? path.w[pr.i] : path.z[pr.i];
            double const v = pr.G == Field::W ? path.w[pr.j] : path.z[pr.j];
            acc[p].add(u * v);
        }
    }
    std::vector<CovarianceCheck> out;
    for (std::size_t p = 0; p < probes.size(); ++p)
    {
        auto const& pr = probes[p];
        CovarianceCheck c;
        c.name = "Cov(" + kacrice::to_string(pr.F) + "(" +
                 std::to_string(grid[pr.i]) + "), " + kacrice::to_string(pr.G) +
                 "(" + std::to_string(grid[pr.j]) + "))";
        c.empirical = acc[p].mean();
        c.std_error = acc[p].std_error();
        c.expected = kacrice::limit_cov(pr.F, 0, pr.G, 0, grid[pr.i], grid[pr.j]);
        c.passed = std::abs(c.empirical - c.expected) <= sigmas * c.std_error;
        out.push_back(c);
    }
    return out;
}

RootCertification certify_roots(int n, int draws, std::uint64_t base_seed,
                                int workers)
{
    std::vector<RootCertification> per(static_cast<std::size_t>(draws));
    parallel_for(per.size(), workers, [&](std::size_t d) {
        auto& rec = per[d];
        auto const f = gpoly::sample_polynomial(n, trial_seed(base_seed, d),
                                                gpoly::Law::gaussian);
        auto const rs = roots::find_all_roots(f);
        if (!rs.converged)
            rec.convergence_failures = 1;
        if (static_cast<int>(rs.roots.size()) != n)
            rec.count_failures = 1;
        double const sup = gpoly::sup_norm_circle(f);
        double max_rel = 0.0;
        double max_conj = 0.0;
        for (auto const& z : rs.roots)
        {
            double nearest = kInfinity;
            for (auto const& w : rs.roots)
                nearest = std::min(nearest, std::abs(std::conj(z) - w));
            max_conj = std::max(max_conj, nearest);
            double const r = std::abs(z);
            if (r >= 0.5 && r <= 2.0)
            {
                // Outside the unit circle, scale by the sup norm on |w| = r.
                double const scale =
                    sup * std::exp(n * std::log(std::max(1.0, r)));
                max_rel = std::max(max_rel,
                                   std::abs(gpoly::eval_complex(f, z)) / scale);
            }
        }
        rec.max_rel_residual = max_rel;
        rec.max_conjugate_mismatch = max_conj;
        rec.closure_failures = max_conj > 1e-8 ? 1 : 0;
        rec.residual_failures = max_rel > 1e-8 ? 1 : 0;
    });
    RootCertification out;
    out.n = n;
    out.draws = draws;
    for (auto const& r : per)
    {
        out.count_failures += r.count_failures;
        out.closure_failures += r.closure_failures;
        out.residual_failures += r.residual_failures;
        out.convergence_failures += r.convergence_failures;
        out.max_rel_residual = std::max(out.max_rel_residual, r.max_rel_residual);
        out.max_conjugate_mismatch =
            std::max(out.max_conjugate_mismatch, r.max_conjugate_mismatch);
    }
    return out;
}

PlantedRecovery planted_root_recovery(int n, int trials, std::uint64_t seed)
{
    if (n < 1)
        throw std::invalid_argument("degree must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double const n2 = static_cast<double>(n) * n;
    PlantedRecovery out;
    out.n = n;
    out.trials = trials;
    for (int t = 0; t < trials; ++t)
    {
        std::vector<std::complex<double>> planted;
        int const pairs = n / 2;
        for (int j = 0; j < pairs; ++j)
        {
            double const arg = (j + 0.2 + 0.6 * unit(rng)) * kPi / pairs;
            double const radius = 1.0 + (6.0 * unit(rng) - 3.0) / n2;
            auto const z = std::polar(radius, arg);
            planted.push_back(z);
            planted.push_back(std::conj(z));
        }
        if (n % 2 == 1)
        {
            double const radius = 1.0 + (6.0 * unit(rng) - 3.0) / n2;
            planted.emplace_back(unit(rng) < 0.5 ? radius : -radius, 0.0);
        }
        // Coefficients of prod (z - r) by a DFT of its values at the m-th
        // roots of unity; direct expansion cancels badly for roots on the
        // circle.
        int const m = n + 1;
        std::vector<std::complex<double>> values(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j)
        {
            auto const w = std::polar(1.0, 2.0 * kPi * j / m);
            std::complex<double> v = 1.0;
            for (auto const& r : planted)
                v *= w - r;
            values[j] = v;
        }
        std::vector<double> c(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k)
        {
            std::complex<double> acc = 0.0;
            for (int j = 0; j < m; ++j)
                acc += values[j] * std::polar(1.0, -2.0 * kPi * (static_cast<long>(j) * k % m) / m);
            c[k] = acc.real() / m;
        }
        c[static_cast<std::size_t>(n)] = 1.0;

        auto const f = gpoly::CoefficientVector::from_coeffs(c);
        auto const rs = roots::find_all_roots(f);
        for (auto const& p : planted)
        {
            double nearest = kInfinity;
            for (auto const& z : rs.roots)
                nearest = std::min(nearest, std::abs(z - p));
            out.max_error = std::max(out.max_error, nearest);
        }
        if (!rs.converged)
            out.max_error = kInfinity;
    }
    return out;
}

BoundsRow bounds_row(int n, BoundsOptions const& opts)
{
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    double const nd = static_cast<double>(n);
    double const n2 = nd * nd;
    double const lo = 0.3;
    double const hi = kPi - 0.3;
    IntervalSet const everything = {{-kInfinity, kInfinity}};
    kacrice::MonteCarloOptions mc;
    mc.samples = opts.mc_samples;

    BoundsRow row;
    row.n = n;

    // k = 1 density and numerator on pairs inside the cutoff.
    double num1_sum = 0.0;
    for (int i = 0; i < opts.p1_configs; ++i)
    {
        double const x = uniform(lo, hi);
        double const y = x - uniform(-20.0, 20.0) / n2;
        auto const p1 = kacrice::p1_density(n, x, y, everything);
        row.p1_sup = std::max(row.p1_sup, p1.value / n2);
        mc.seed = opts.seed + static_cast<std::uint64_t>(i);
        num1_sum += kacrice::numerator_bound_monitor(n, {x}, {y}, mc).ratio;
    }
    row.num1_mean = num1_sum / opts.p1_configs;

    // k = 1 determinant on separated locations.
    row.det1_min = kInfinity;
    for (int i = 0; i < opts.p1_configs; ++i)
    {
        double const x = uniform(lo, hi);
        double y = uniform(lo, hi);
        while (std::abs(x - y) < 0.2)
            y = uniform(lo, hi);
        double const r = kacrice::det_lower_bound_monitor(n, {x}, {y}).bound_ratio;
        row.det1_min = std::min(row.det1_min, r);
        row.det1_max = std::max(row.det1_max, r);
    }

    // k = 2 density on separated configurations.
    for (int i = 0; i < opts.p2_configs; ++i)
    {
        double const x1 = uniform(lo, 1.5);
        double const x2 = x1 + uniform(0.2, 1.2);
        double const y1 = x1 - uniform(-10.0, 10.0) / n2;
        double const y2 = x2 - uniform(-10.0, 10.0) / n2;
        mc.seed = opts.seed + 1000u + static_cast<std::uint64_t>(i);
        auto const p2 = kacrice::pk_density(n, {x1, x2}, {y1, y2}, mc);
        row.p2_sup = std::max(row.p2_sup, p2.value / (n2 * n2));
    }

    // k = 2 determinant on random configurations, gaps log-uniform in
    // [0.01, 5] / n.
    row.det2_min = kInfinity;
    auto gap = [&] { return std::exp(uniform(std::log(0.01), std::log(5.0))) / nd; };
    for (int i = 0; i < opts.det2_configs; ++i)
    {
        double const x1 = uniform(lo, hi - 0.3);
        double const x2 = x1 + gap();
        double const y1 = x1 + uniform(-3.0, 3.0) / nd;
        double const y2 = y1 + gap();
        double const r =
            kacrice::det_lower_bound_monitor(n, {x1, x2}, {y1, y2}).bound_ratio;
        row.det2_min = std::min(row.det2_min, r);
    }

    // Coincident limit: both gaps shrink together.
    row.det2_sweep_floor = kInfinity;
    for (int j = 0; j <= 12; ++j)
    {
        double const g = std::ldexp(1.0, -j) / nd;
        double const x1 = 1.0;
        double const y1 = 1.0 + 0.3 / nd;
        double const r =
            kacrice::det_lower_bound_monitor(n, {x1, x1 + g}, {y1, y1 + g})
                .bound_ratio;
        if (j == 0)
            row.det2_sweep_start = r;
        row.det2_sweep_floor = std::min(row.det2_sweep_floor, r);
    }

    // k = 2 numerator, separated and with the x pair at distance 1/(2n).
    double sep = 0.0;
    double clu = 0.0;
    for (int i = 0; i < opts.num2_configs; ++i)
    {
        double const x1 = uniform(lo, 1.5);
        double const y1 = x1 - uniform(-10.0, 10.0) / n2;
        double const x2 = x1 + uniform(0.2, 1.2);
        double const y2 = x2 - uniform(-10.0, 10.0) / n2;
        mc.seed = opts.seed + 2000u + static_cast<std::uint64_t>(i);
        sep += kacrice::numerator_bound_monitor(n, {x1, x2}, {y1, y2}, mc).ratio;
        double const c = 0.5 / nd;
        clu += kacrice::numerator_bound_monitor(n, {x1, x1 + c}, {y1, y2}, mc)
                   .ratio;
    }
    row.num2_separated = sep / opts.num2_configs;
    row.num2_clustered = clu / opts.num2_configs;
    return row;
}

}  // namespace circlab::experiments
