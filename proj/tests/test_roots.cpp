// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#include "circlab/roots.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "circlab/experiments.hpp"
#include "doctest.h"

using namespace circlab;
using namespace circlab::roots;
using gpoly::CoefficientVector;
using gpoly::Law;
using cd = std::complex<double>;

namespace
{

double nearest(std::vector<cd> const& set, cd z)
{
    double best = kInfinity;
    for (auto const& w : set)
        best = std::min(best, std::abs(w - z));
    return best;
}

std::vector<cd> companion_roots(CoefficientVector const& f)
{
    int const n = f.degree();
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i)
        C(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i)
        C(i, n - 1) = -f[i] / f[n];
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    std::vector<cd> out;
    for (int i = 0; i < n; ++i)
        out.push_back(es.eigenvalues()[i]);
    return out;
}

}  // namespace

TEST_CASE("small polynomials")
{
    auto const rs = find_all_roots(CoefficientVector::from_coeffs({-1, 0, 1}));
    REQUIRE(rs.converged);
    REQUIRE(rs.roots.size() == 2);
    CHECK(nearest(rs.roots, 1.0) < 1e-12);
    CHECK(nearest(rs.roots, -1.0) < 1e-12);

    int removed = 0;
    auto const g = deflate_zero_roots(
        CoefficientVector::from_coeffs({0, -1, 0, 1}), &removed);
    CHECK(removed == 1);
    CHECK(g.degree() == 2);
    auto const rg = find_all_roots(g);
    CHECK(nearest(rg.roots, 1.0) < 1e-12);
    CHECK(nearest(rg.roots, -1.0) < 1e-12);

    CHECK_THROWS_AS(find_all_roots(CoefficientVector::from_coeffs({1, 1, 0})),
                    std::invalid_argument);
    CHECK_THROWS_AS(find_all_roots(CoefficientVector::from_coeffs({1, 1}), 0.0),
                    std::invalid_argument);
}

TEST_CASE("agrees with companion eigenvalues")
{
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 10; ++trial)
    {
        int const n = 8 + static_cast<int>(gen() % 57);
        auto const f = gpoly::sample_polynomial(n, gen(), Law::gaussian);
        auto const rs = find_all_roots(f);
        REQUIRE(rs.converged);
        auto const ref = companion_roots(f);
        double worst = 0.0;
        for (auto const& z : ref)
            worst = std::max(worst, nearest(rs.roots, z) / std::max(1.0, std::abs(z)));
        CAPTURE(n);
        CHECK(worst < 1e-7);
    }
}

TEST_CASE("random draw certificate")
{
    int const n = 200;
    auto const f = gpoly::sample_polynomial(n, 2718, Law::gaussian);
    auto const rs = find_all_roots(f);
    REQUIRE(rs.converged);
    CHECK(rs.roots.size() == std::size_t(n));
    double const sup = gpoly::sup_norm_circle(f);
    for (std::size_t i = 0; i < rs.roots.size(); ++i)
    {
        cd const z = rs.roots[i];
        CHECK(nearest(rs.roots, std::conj(z)) < 1e-8);
        double const r = std::abs(z);
        if (r >= 0.5 && r <= 1.0)
            CHECK(rs.residuals[i] <= 1e-8 * sup);
    }

    auto const cert = experiments::certify_roots(n, 20, 99);
    CHECK(cert.count_failures == 0);
    CHECK(cert.closure_failures == 0);
    CHECK(cert.residual_failures == 0);
    CHECK(cert.convergence_failures == 0);
}

TEST_CASE("planted roots are recovered")
{
    for (int n : {5, 12, 25, 50})
    {
        auto const rec = experiments::planted_root_recovery(n, 10, 1234 + n);
        CAPTURE(n);
        CHECK(rec.max_error <= 1e-6);
    }
}

TEST_CASE("annulus mapping")
{
    int const n = 10;
    double const n2 = n * n;
    RootSet rs;
    rs.converged = true;
    cd const a = std::polar(1.0 + 1.0 / n2, 1.0);
    cd const b = std::polar(1.0 - 3.0 / n2, 2.0);
    rs.roots = {a, std::conj(a), b, std::conj(b), cd(1.0 + 2.0 / n2, 0.0)};
    auto const pts = annulus_roots(rs, n, {-4.0, 4.0});
    REQUIRE(pts.size() == 3);
    std::vector<double> dists;
    for (auto const& p : pts)
    {
        dists.push_back(p.scaled_distance);
        CHECK(p.arg >= 0.0);
        CHECK(p.arg <= kPi);
    }
    std::sort(dists.begin(), dists.end());
    CHECK(dists[0] == doctest::Approx(-3.0));
    CHECK(dists[1] == doctest::Approx(1.0));
    CHECK(dists[2] == doctest::Approx(2.0));
    CHECK(annulus_roots(rs, n, {5.0, 6.0}).empty());

    rs.converged = false;
    CHECK_THROWS(annulus_roots(rs, n, {-4.0, 4.0}));
}

TEST_CASE("annulus count matches the limiting intensity")
{
    int const n = 200;
    int const trials = 2000;
    long total = 0;
    for (int t = 0; t < trials; ++t)
    {
        auto const f = gpoly::sample_polynomial(n, trial_seed(555, t),
                                                Law::gaussian);
        auto const rs = find_all_roots(f);
        REQUIRE(rs.converged);
        total += static_cast<long>(annulus_roots(rs, n, {-20.0, 20.0}).size());
    }
    double const mean = double(total) / trials;
    CHECK(mean == doctest::Approx(40.0 / 12.0).epsilon(0.10));
}

TEST_CASE("trig zeros")
{
    SUBCASE("cosine")
    {
        auto const f = CoefficientVector::from_coeffs({0.0, 1.0});
        auto const s = gpoly::eval_circle_grid(f, 16);
        auto const z = trig_zeros(s, Target::X, 1);
        REQUIRE(z.zeros.size() == 1);
        CHECK(z.zeros[0] == doctest::Approx(kPi / 2).epsilon(1e-14));
        CHECK(z.derivative_at_zero[0] == doctest::Approx(-1.0));
    }
    SUBCASE("vanishing target")
    {
        auto const f = CoefficientVector::from_coeffs({1.0});
        auto const s = gpoly::eval_circle_grid(f, 16);
        CHECK_THROWS_AS(trig_zeros(s, Target::Y, 1), std::domain_error);
    }
    SUBCASE("grid too coarse")
    {
        auto const f = gpoly::sample_polynomial(20, 1, Law::gaussian);
        auto const s = gpoly::eval_circle_grid(f, 100);
        CHECK_THROWS_AS(trig_zeros(s, Target::X, 20), std::invalid_argument);
    }
    SUBCASE("random draws: residuals, ordering, T0, derivatives")
    {
        std::mt19937_64 gen(8);
        for (int trial = 0; trial < 15; ++trial)
        {
            int const n = 20 + static_cast<int>(gen() % 800);
            auto const f = gpoly::sample_polynomial(n, gen(), Law::gaussian);
            auto const s = gpoly::eval_circle_grid(f, 8 * (n + 1));
            CAPTURE(n);
            for (auto which : {Target::X, Target::Y})
            {
                auto const z = trig_zeros(s, which, n);
                REQUIRE(z.zeros.size() == z.derivative_at_zero.size());
                double const margin = t0_margin(n);
                for (std::size_t i = 0; i < z.zeros.size(); ++i)
                {
                    double const t = z.zeros[i];
                    CHECK(t > margin);
                    CHECK(t < kPi - margin);
                    if (i > 0)
                        CHECK(t > z.zeros[i - 1]);
                    auto const d = gpoly::eval_derivatives(f, t, 1);
                    double const v = which == Target::X ? d[0].x : d[0].y;
                    double const dv = which == Target::X ? d[1].x : d[1].y;
                    CHECK(std::abs(v) <= 1e-9 * std::sqrt(double(n)));
                    CHECK(z.derivative_at_zero[i] ==
                          doctest::Approx(dv).epsilon(1e-9));
                }
            }
        }
    }
    SUBCASE("count near n / sqrt 3")
    {
        int const n = 500;
        double total = 0.0;
        int const trials = 20;
        for (int t = 0; t < trials; ++t)
        {
            auto const f = gpoly::sample_polynomial(n, trial_seed(3, t),
                                                    Law::gaussian);
            auto const s = gpoly::eval_circle_grid(f, 8 * (n + 1));
            total += double(trig_zeros(s, Target::X, n).zeros.size());
        }
        CHECK(total / trials ==
              doctest::Approx(n / std::sqrt(3.0)).epsilon(0.10));
    }
}

TEST_CASE("minimum root gap")
{
    int const n = 30;
    double const n2 = n * n;
    RootSet rs;
    rs.converged = true;
    rs.roots = {cd(1.0, 2.0 / n2), cd(1.0, -2.0 / n2), cd(0.2, 0.0)};
    CHECK(min_root_gap(rs, n, {-5.0, 5.0}) == doctest::Approx(4.0));
    rs.roots = {cd(1.0, 2.0 / n2)};
    CHECK(min_root_gap(rs, n, {-5.0, 5.0}) == kInfinity);
}
