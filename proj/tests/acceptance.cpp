// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
//
// One PASS/FAIL line per acceptance criterion; nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "circlab/experiments.hpp"
#include "circlab/kacrice.hpp"
#include "circlab/stats.hpp"
#include "circlab/trials.hpp"

using namespace circlab;

namespace
{

struct Outcome
{
    bool passed = false;
    std::string detail;
};

int workers()
{
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::uint64_t seed_for(int criterion)
{
    return trial_seed(trials::default_base_seed(), 1000 + criterion);
}

std::string fmt(char const* format, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

std::vector<stats::TrialRecord> batch(int n, int count, trials::Source source,
                                      IntervalSet windows, std::uint64_t seed,
                                      trials::TrialPlan const& plan, int& failed)
{
    trials::RunConfig cfg;
    cfg.n = n;
    cfg.trials = count;
    cfg.base_seed = seed;
    cfg.source = source;
    cfg.windows = std::move(windows);
    cfg.workers = workers();
    auto const all = trials::run_trials(cfg, plan);
    auto ok = trials::successful(all);
    failed = static_cast<int>(all.size() - ok.size());
    return ok;
}

Outcome closest_root_law()
{
    int failed = 0;
    auto const recs = batch(500, 4000, trials::Source::nu, {{0, 12}},
                            seed_for(1), {}, failed);
    std::vector<double> mins;
    for (auto const& r : recs)
        mins.push_back(r.min_scaled);
    double mean = 0.0;
    for (double m : mins)
        mean += m;
    mean /= double(mins.size());
    double const ks = stats::ks_statistic(
        mins, [](double t) { return stats::exp_cdf(t, 6.0); });
    bool const ok = failed == 0 && mean >= 5.5 && mean <= 6.5 && ks <= 0.05;
    return {ok, fmt("mean %.4f in [5.5,6.5], KS %.4f <= 0.05, failed trials %d",
                    mean, ks, failed)};
}

Outcome poisson_intensity()
{
    IntervalSet const windows{{0, 12}, {-6, 6}, {0, 24}, {-6, 0}, {0, 6}};
    int failed = 0;
    auto const recs = batch(500, 4000, trials::Source::mu, windows,
                            seed_for(2), {}, failed);
    auto const rep = stats::poisson_window_test(recs, windows);
    std::ostringstream os;
    os << "max deviation/tolerance " << fmt("%.3f", rep.statistic)
       << ", failed trials " << failed;
    for (auto const& t : rep.details)
    {
        os << "; " << t.name << " = " << fmt("%.4f", t.value);
        if (!t.passed)
            os << " (off by more than " << fmt("%.4f", t.tolerance) << ")";
    }
    return {rep.passed && failed == 0, os.str()};
}

Outcome circle_reduction()
{
    std::vector<double> frac;
    int failed_total = 0;
    trials::TrialPlan plan;
    plan.pairing = true;
    plan.pairing_interval = {0.0, 2.0};
    for (int n : {250, 500, 1000})
    {
        int failed = 0;
        auto const recs = batch(n, 1000, trials::Source::nu, {{0, 2}},
                                seed_for(3) + n, plan, failed);
        failed_total += failed;
        auto const agreed = std::count_if(recs.begin(), recs.end(),
                                          [](auto const& r) {
                                              return r.pairing_agreed;
                                          });
        frac.push_back(double(agreed) / 1000.0);
    }
    bool ok = failed_total == 0;
    for (std::size_t i = 0; i < frac.size(); ++i)
    {
        ok = ok && frac[i] >= 0.90;
        if (i > 0)
            ok = ok && frac[i] >= frac[i - 1] - 0.02;
    }
    return {ok, fmt("agreement %.3f / %.3f / %.3f at n = 250 / 500 / 1000, "
                    "failed trials %d",
                    frac[0], frac[1], frac[2], failed_total)};
}

Outcome kacrice_mean()
{
    IntervalSet const U{{0.0, 6.0}};
    double const v250 = kacrice::mean_mu_integral(250, U);
    double const v500 = kacrice::mean_mu_integral(500, U);
    double const v1000 = kacrice::mean_mu_integral(1000, U);
    bool const ok = v500 >= 0.45 && v500 <= 0.55 &&
                    std::abs(v1000 - 0.5) < std::abs(v250 - 0.5);
    return {ok, fmt("E mu(0,6) = %.4f / %.4f / %.4f at n = 250 / 500 / 1000",
                    v250, v500, v1000)};
}

Outcome zero_counts()
{
    bool ok = true;
    std::string detail;
    int const n = 500;
    for (auto which : {kacrice::Field::X, kacrice::Field::Y})
    {
        auto const c = experiments::zero_count_check(
            n, 500, seed_for(5), which, {0.5, kPi - 0.5}, workers());
        bool const here =
            c.rel_diff <= 0.02 &&
            std::abs(c.empirical_full / c.reference_full - 1.0) <= 0.10 &&
            std::abs(c.kacrice_full / c.reference_full - 1.0) <= 0.10;
        ok = ok && here;
        detail += fmt("%s: empirical %.2f vs Kac-Rice %.2f (rel %.4f), "
                      "full %.1f / %.1f vs n/sqrt3 %.1f; ",
                      kacrice::to_string(which).c_str(), c.empirical_mean,
                      c.kacrice, c.rel_diff, c.empirical_full, c.kacrice_full,
                      c.reference_full);
    }
    return {ok, detail};
}

Outcome covariance_limits()
{
    int const n = 10000;
    double const tol = 5.0 / std::sqrt(double(n));
    auto const e = experiments::early_approx_block(n, 1.2, 1.2 - 1e-8);
    auto const k1 = experiments::kernel_error(1000);
    auto const k4 = experiments::kernel_error(4000);
    double const ratio = k4.max_error / k1.max_error;
    bool const ok = e.max_entry_error <= tol && e.conditional_error <= tol &&
                    ratio <= 0.75;
    return {ok, fmt("block error %.2e, conditional variance %.6f (1/24 = %.6f), "
                    "tolerance %.2e; kernel error %.5f -> %.5f, ratio %.3f <= 0.75",
                    e.max_entry_error, e.conditional_variance, 1.0 / 24.0, tol,
                    k1.max_error, k4.max_error, ratio)};
}

Outcome exact_identities()
{
    std::mt19937_64 gen(seed_for(7));
    std::uniform_real_distribution<double> gap(0.05, 1.0);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> pos(-20.0, 20.0);

    double det_worst = 0.0;
    for (int t = 0; t < 500; ++t)
    {
        int const k = 1 + static_cast<int>(gen() % 6);
        std::vector<double> xs{gap(gen)};
        for (int i = 1; i < k; ++i)
            xs.push_back(xs.back() + gap(gen));
        double const dense = kacrice::delta_matrix(xs).determinant();
        det_worst = std::max(det_worst,
                             std::abs(kacrice::delta_det(xs) - dense) /
                                 std::abs(dense));
    }

    double quad_worst = 0.0;
    for (int t = 0; t < 200; ++t)
    {
        int const r = 1 + static_cast<int>(gen() % 4);
        int const s = static_cast<int>(gen() % 4);
        std::vector<double> zs;
        for (int i = 0; i < r; ++i)
            zs.push_back(pos(gen));
        std::vector<double> v(2 * r * (s + 1));
        for (double& c : v)
            c = normal(gen);
        auto const q = kacrice::quadratic_form_integral(zs, s, v);
        quad_worst = std::max(quad_worst,
                              std::abs(q.lhs - q.rhs) / (1.0 + std::abs(q.lhs)));
    }

    double dd_worst = 0.0;
    for (int t = 0; t < 500; ++t)
    {
        int const d = 1 + static_cast<int>(gen() % 6);
        std::vector<double> coef(d + 1);
        for (double& c : coef)
            c = normal(gen);
        std::vector<double> xs{gap(gen)};
        for (int i = 0; i < d; ++i)
            xs.push_back(xs.back() + gap(gen));
        std::vector<double> ys;
        for (double x : xs)
        {
            double acc = 0.0;
            for (int k = d; k >= 0; --k)
                acc = acc * x + coef[k];
            ys.push_back(acc);
        }
        double const top = kacrice::divided_differences(xs, ys).back();
        dd_worst = std::max(dd_worst, std::abs(top - coef[d]) /
                                          std::max(1.0, std::abs(coef[d])));
    }

    auto const checks = experiments::limit_process_check(10000, seed_for(7));
    int bad = 0;
    double worst_z = 0.0;
    for (auto const& c : checks)
    {
        bad += !c.passed;
        worst_z = std::max(worst_z,
                           std::abs(c.empirical - c.expected) / c.std_error);
    }
    bool const ok = det_worst <= 1e-10 && quad_worst <= 1e-8 &&
                    dd_worst <= 1e-9 && bad == 0;
    return {ok, fmt("delta_det rel %.1e, quadratic form %.1e, divided "
                    "differences %.1e, simulator %d/%zu probes within 3 SE "
                    "(worst %.2f SE)",
                    det_worst, quad_worst, dd_worst,
                    int(checks.size()) - bad, checks.size(), worst_z)};
}

double spread(std::vector<double> const& v)
{
    auto const [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo;
}

Outcome bound_monitors()
{
    std::vector<experiments::BoundsRow> rows;
    for (int n : {250, 500, 1000})
        rows.push_back(experiments::bounds_row(n));
    auto col = [&](auto field) {
        std::vector<double> out;
        for (auto const& r : rows)
            out.push_back(r.*field);
        return out;
    };
    auto within = [](std::vector<double> const& v, double rel) {
        double const mid = v[1];
        return std::all_of(v.begin(), v.end(), [&](double x) {
            return x > 0.0 && std::abs(x / mid - 1.0) <= rel;
        });
    };
    using R = experiments::BoundsRow;
    auto const p1 = col(&R::p1_sup);
    auto const p2 = col(&R::p2_sup);
    auto const det2 = col(&R::det2_min);
    auto const det1_lo = col(&R::det1_min);
    auto const det1_hi = col(&R::det1_max);
    auto const floor = col(&R::det2_sweep_floor);
    auto const num1 = col(&R::num1_mean);
    auto const sep = col(&R::num2_separated);
    auto const clu = col(&R::num2_clustered);

    bool const p1_ok = within(p1, 0.20);
    bool const p2_ok = spread(p2) <= 2.0;
    bool const det2_ok = det2[0] > 0 && det2[1] > 0 && det2[2] > 0 &&
                         spread(det2) <= 3.0;
    bool det1_ok = true;
    for (std::size_t i = 0; i < rows.size(); ++i)
        det1_ok = det1_ok && std::abs(det1_lo[i] / 0.25 - 1.0) <= 0.10 &&
                  std::abs(det1_hi[i] / 0.25 - 1.0) <= 0.10;
    bool const floor_ok = std::all_of(floor.begin(), floor.end(),
                                      [](double f) { return f > 0.0; });
    bool const num1_ok = within(num1, 0.20);
    bool const sep_ok = sep[0] > 0 && spread(sep) <= 2.0;
    bool clu_ok = true;
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        double const r = clu[i] / sep[i];
        clu_ok = clu_ok && r >= 0.2 && r <= 5.0;
    }
    bool const ok = p1_ok && p2_ok && det2_ok && det1_ok && floor_ok &&
                    num1_ok && sep_ok && clu_ok;
    std::ostringstream os;
    os << fmt("p1 n^-2 %.5f/%.5f/%.5f%s; ", p1[0], p1[1], p1[2], p1_ok ? "" : " UNSTABLE")
       << fmt("p2 n^-4 %.2e/%.2e/%.2e%s; ", p2[0], p2[1], p2[2], p2_ok ? "" : " UNSTABLE")
       << fmt("det k=1 ratio %.4f..%.4f%s; ", *std::min_element(det1_lo.begin(), det1_lo.end()),
              *std::max_element(det1_hi.begin(), det1_hi.end()), det1_ok ? "" : " OFF")
       << fmt("det k=2 min %.2e/%.2e/%.2e%s; ", det2[0], det2[1], det2[2], det2_ok ? "" : " UNSTABLE")
       << fmt("sweep floor %.2e/%.2e/%.2e; ", floor[0], floor[1], floor[2])
       << fmt("num k=1 %.5f/%.5f/%.5f%s; ", num1[0], num1[1], num1[2], num1_ok ? "" : " UNSTABLE")
       << fmt("num k=2 separated %.2e/%.2e/%.2e%s, clustered %.2e/%.2e/%.2e%s",
              sep[0], sep[1], sep[2], sep_ok ? "" : " UNSTABLE", clu[0], clu[1],
              clu[2], clu_ok ? "" : " OFF");
    return {ok, os.str()};
}

Outcome root_certification()
{
    auto const c = experiments::certify_roots(200, 500, seed_for(9), workers());
    double planted = 0.0;
    for (int n : {5, 10, 20, 30, 40, 50})
        planted = std::max(planted,
                           experiments::planted_root_recovery(n, 50, seed_for(9) + n)
                               .max_error);
    bool const ok = c.count_failures == 0 && c.closure_failures == 0 &&
                    c.residual_failures == 0 && c.convergence_failures == 0 &&
                    planted <= 1e-6;
    return {ok, fmt("count/closure/residual/convergence failures %d/%d/%d/%d over "
                    "%d draws, max residual %.1e, conjugate mismatch %.1e; "
                    "planted recovery %.1e <= 1e-6",
                    c.count_failures, c.closure_failures, c.residual_failures,
                    c.convergence_failures, c.draws, c.max_rel_residual,
                    c.max_conjugate_mismatch, planted)};
}

}  // namespace

int main()
{
    struct Criterion
    {
        char const* name;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> const criteria{
        {"closest root law Exp(mean 6), n=500, 4000 trials", closest_root_law},
        {"Poisson intensity 1/12 via circle pairs, n=500, 4000 trials",
         poisson_intensity},
        {"root/pair agreement on (0,2), n=250/500/1000", circle_reduction},
        {"Kac-Rice mean of mu(0,6)", kacrice_mean},
        {"zero counts of X and Y, n=500", zero_counts},
        {"covariance limits, n=10^4 and kernel decay", covariance_limits},
        {"exact identities and limit-process simulator", exact_identities},
        {"density, determinant and numerator bound monitors", bound_monitors},
        {"root-finder certification, n=200, 500 draws", root_certification},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        auto const start = std::chrono::steady_clock::now();
        Outcome out;
        try
        {
            out = criteria[i].run();
        }
        catch (std::exception const& e)
        {
            out = {false, std::string("exception: ") + e.what()};
        }
        double const secs = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start)
                                .count();
        failures += !out.passed;
        std::printf("%s %zu: %s | %s [%.1fs]\n", out.passed ? "PASS" : "FAIL",
                    i + 1, criteria[i].name, out.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
