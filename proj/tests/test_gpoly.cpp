// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#include "circlab/gpoly.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

using namespace circlab;
using namespace circlab::gpoly;
using cd = std::complex<double>;

namespace
{

// Direct O(n) sums; the oracle for every transform-based evaluation.
void direct_xy(CoefficientVector const& f, double x, double& X, double& Y)
{
    X = 0.0;
    Y = 0.0;
    for (int k = 0; k <= f.degree(); ++k)
    {
        X += f[k] * std::cos(k * x);
        Y += f[k] * std::sin(k * x);
    }
}

double direct_derivative(CoefficientVector const& f, double x, int j, bool y)
{
    double acc = 0.0;
    double const shift = j * kPi / 2 - (y ? kPi / 2 : 0.0);
    for (int k = 0; k <= f.degree(); ++k)
        acc += f[k] * std::pow(double(k), j) * std::cos(k * x + shift);
    return acc;
}

}  // namespace

TEST_CASE("sampling")
{
    SUBCASE("rademacher entries are signs")
    {
        auto const f = sample_polynomial(3, 11, Law::rademacher);
        REQUIRE(f.coeffs().size() == 4);
        for (double c : f.coeffs())
            CHECK(std::abs(c) == 1.0);
    }
    SUBCASE("deterministic")
    {
        for (auto law : {Law::gaussian, Law::rademacher})
            CHECK(sample_polynomial(50, 99, law) ==
                  sample_polynomial(50, 99, law));
        CHECK_FALSE(sample_polynomial(50, 99, Law::gaussian) ==
                    sample_polynomial(50, 100, Law::gaussian));
    }
    SUBCASE("gaussian mean concentration")
    {
        // Resample many draws; nearly all means lie within 4/sqrt(101).
        int inside = 0;
        for (std::uint64_t s = 0; s < 200; ++s)
        {
            auto const f = sample_polynomial(100, s, Law::gaussian);
            double mean = 0.0;
            for (double c : f.coeffs())
                mean += c;
            mean /= 101.0;
            inside += std::abs(mean) <= 4.0 / std::sqrt(101.0);
        }
        CHECK(inside >= 199);
    }
    SUBCASE("gaussian variance")
    {
        double sum2 = 0.0;
        int count = 0;
        for (std::uint64_t s = 0; s < 50; ++s)
            for (double c : sample_polynomial(200, s, Law::gaussian).coeffs())
            {
                sum2 += c * c;
                ++count;
            }
        CHECK(sum2 / count == doctest::Approx(1.0).epsilon(0.05));
    }
    CHECK_THROWS_AS(sample_polynomial(0, 1, Law::gaussian),
                    std::invalid_argument);
    CHECK(parse_law("rademacher") == Law::rademacher);
    CHECK(to_string(Law::gaussian) == "gaussian");
    CHECK_THROWS(parse_law("cauchy"));
    CHECK_THROWS(CoefficientVector::from_coeffs({0.5}, Law::rademacher));
}

TEST_CASE("complex evaluation")
{
    auto const f = CoefficientVector::from_coeffs({-1.0, 0.0, 1.0});
    CHECK(std::abs(eval_complex(f, 1.0)) == 0.0);
    CHECK(std::abs(eval_complex(f, cd(0.0, 1.0)) - cd(-2.0, 0.0)) < 1e-15);

    auto const g = sample_polynomial(80, 5, Law::gaussian);
    for (double x : {0.1, 1.3, 2.9, 4.4})
    {
        double X = 0, Y = 0;
        direct_xy(g, x, X, Y);
        cd const v = eval_on_circle(g, x);
        CHECK(std::abs(v - cd(X, Y)) < 1e-10);
    }
}

TEST_CASE("circle grid")
{
    SUBCASE("single term")
    {
        auto const f = CoefficientVector::from_coeffs({0.0, 1.0});
        auto const s = eval_circle_grid(f, 8);
        for (int j = 0; j < 8; ++j)
        {
            CHECK(s.x_values[j] == doctest::Approx(std::cos(s.angles[j])));
            CHECK(s.y_values[j] ==
                  doctest::Approx(std::sin(s.angles[j])).scale(1.0));
        }
    }
    SUBCASE("matches direct summation")
    {
        auto const f = sample_polynomial(50, 3, Law::gaussian);
        auto const s = eval_circle_grid(f, 256);
        double dev = 0.0;
        for (int j = 0; j < 256; ++j)
        {
            double X = 0, Y = 0;
            direct_xy(f, s.angles[j], X, Y);
            dev = std::max({dev, std::abs(X - s.x_values[j]),
                            std::abs(Y - s.y_values[j])});
        }
        CHECK(dev <= 1e-9);
    }
    SUBCASE("grid derivatives match direct sums")
    {
        auto const f = sample_polynomial(40, 8, Law::gaussian);
        auto const s = eval_circle_grid(f, 328, 3);
        for (int order = 1; order <= 3; ++order)
        {
            auto const& [dx, dy] = s.derivative_orders.at(order);
            double scale = std::pow(40.0, order + 0.5);
            for (int j = 0; j < 328; j += 17)
            {
                CHECK(std::abs(dx[j] - direct_derivative(f, s.angles[j], order,
                                                         false)) <
                      1e-10 * scale);
                CHECK(std::abs(dy[j] - direct_derivative(f, s.angles[j], order,
                                                         true)) <
                      1e-10 * scale);
            }
        }
    }
    SUBCASE("below margin rejected")
    {
        auto const f = sample_polynomial(10, 1, Law::gaussian);
        CHECK_THROWS_AS(eval_circle_grid(f, 21), std::invalid_argument);
        CHECK_NOTHROW(eval_circle_grid(f, 22));
    }
}

TEST_CASE("grid properties over random draws")
{
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 40; ++trial)
    {
        int const n = 1 + static_cast<int>(gen() % 300);
        int const m = 2 * (n + 1) + static_cast<int>(gen() % 64);
        auto const law = (gen() & 1) ? Law::gaussian : Law::rademacher;
        auto const f = sample_polynomial(n, gen(), law);
        auto const s = eval_circle_grid(f, m);
        CAPTURE(n);
        CAPTURE(m);

        double sum_eps = 0.0, energy = 0.0;
        for (double c : f.coeffs())
        {
            sum_eps += c;
            energy += c * c;
        }
        CHECK(s.x_values[0] == doctest::Approx(sum_eps));
        CHECK(std::abs(s.y_values[0]) < 1e-12 * (n + 1));

        // Parseval
        double power = 0.0;
        for (int j = 0; j < m; ++j)
            power += s.x_values[j] * s.x_values[j] +
                     s.y_values[j] * s.y_values[j];
        CHECK(power / m == doctest::Approx(energy).epsilon(1e-8));

        // conjugate symmetry: angle_{m-j} = -angle_j
        double sym = 0.0;
        for (int j = 1; j < m; ++j)
            sym = std::max({sym,
                            std::abs(s.x_values[j] - s.x_values[m - j]),
                            std::abs(s.y_values[j] + s.y_values[m - j])});
        CHECK(sym < 1e-10 * std::sqrt(double(n + 1)));

        // |f|^2 consistency at spot checks
        for (int j = 0; j < m; j += std::max(1, m / 7))
        {
            double const mod2 = std::norm(eval_on_circle(f, s.angles[j]));
            double const grid2 = s.x_values[j] * s.x_values[j] +
                                 s.y_values[j] * s.y_values[j];
            CHECK(std::abs(grid2 - mod2) <= 1e-10 * std::max(1.0, mod2));
        }
    }
}

TEST_CASE("derivatives")
{
    auto const unit = CoefficientVector::from_coeffs({0.0, 1.0});
    auto const d = eval_derivatives(unit, 0.0, 1);
    CHECK(d[1].x == doctest::Approx(0.0));
    CHECK(d[1].y == doctest::Approx(1.0));

    auto const f = sample_polynomial(60, 17, Law::gaussian);
    auto const s = eval_circle_grid(f, 128);
    for (int j = 0; j < 128; j += 9)
    {
        auto const v = eval_derivatives(f, s.angles[j], 0);
        CHECK(v[0].x == doctest::Approx(s.x_values[j]).epsilon(1e-9));
        CHECK(v[0].y == doctest::Approx(s.y_values[j]).epsilon(1e-9));
    }

    auto const first = eval_first_derivative(f, 0.77);
    auto const all = eval_derivatives(f, 0.77, 1);
    CHECK(first.x == doctest::Approx(all[1].x));
    CHECK(first.y == doctest::Approx(all[1].y));

    CHECK_THROWS_AS(eval_derivatives(f, 0.0, 7), std::invalid_argument);
}

TEST_CASE("derivative orders agree with finite differences")
{
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
    double const h = 1e-5;
    for (int trial = 0; trial < 20; ++trial)
    {
        int const n = 5 + static_cast<int>(gen() % 96);
        auto const f = sample_polynomial(n, gen(), Law::gaussian);
        double const x = angle(gen);
        auto const hi = eval_derivatives(f, x + h, 6);
        auto const lo = eval_derivatives(f, x - h, 6);
        auto const mid = eval_derivatives(f, x, 6);
        for (int j = 1; j <= 6; ++j)
        {
            double const fdx = (hi[j - 1].x - lo[j - 1].x) / (2 * h);
            double const fdy = (hi[j - 1].y - lo[j - 1].y) / (2 * h);
            // relative to the natural scale n^{j+1/2} of the j-th derivative
            double const scale = std::pow(double(n), j + 0.5);
            CAPTURE(n);
            CAPTURE(j);
            CHECK(std::abs(fdx - mid[j].x) <= 1e-4 * scale);
            CHECK(std::abs(fdy - mid[j].y) <= 1e-4 * scale);
        }
    }
}

TEST_CASE("sup norm")
{
    CHECK(sup_norm_circle(CoefficientVector::from_coeffs({1.0})) ==
          doctest::Approx(1.0));
    CHECK(sup_norm_circle(CoefficientVector::from_coeffs({0.0, 1.0})) ==
          doctest::Approx(1.0));
    // (1 + z)^2 peaks at z = 1 with value 4
    CHECK(sup_norm_circle(CoefficientVector::from_coeffs({1.0, 2.0, 1.0})) ==
          doctest::Approx(4.0).epsilon(1e-10));

    int const n = 500;
    int within = 0;
    int const draws = 1000;
    double const envelope = 3.0 * std::sqrt(n * std::log(double(n)));
    for (int s = 0; s < draws; ++s)
        within += sup_norm_circle(sample_polynomial(n, 1000 + s,
                                                    Law::gaussian)) <= envelope;
    CHECK(within >= 990);
}

TEST_CASE("scaling")
{
    auto const f = sample_polynomial(20, 4, Law::rademacher);
    auto const g = f.scaled(-1.0);
    CHECK(g.law() == Law::rademacher);
    CHECK(f.scaled(2.5).law() == Law::gaussian);
    CHECK(g[3] == -f[3]);
    CHECK_THROWS(f.scaled(0.0));
}
