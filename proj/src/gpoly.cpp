// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#include "circlab/gpoly.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <stdexcept>

#include <fftw3.h>

namespace circlab::gpoly
{
namespace
{
// FFTW planning is not thread safe; execution with new-array functions is.
std::mutex g_fftw_mutex;

struct FftPlan
{
    fftw_plan plan = nullptr;
    double* in = nullptr;
    fftw_complex* out = nullptr;

    explicit FftPlan(int m)
    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        in = fftw_alloc_real(static_cast<std::size_t>(m));
        out = fftw_alloc_complex(static_cast<std::size_t>(m / 2 + 1));
        plan = fftw_plan_dft_r2c_1d(m, in, out, FFTW_ESTIMATE);
    }
    ~FftPlan()
    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(out);
    }
    FftPlan(FftPlan const&) = delete;
    FftPlan& operator=(FftPlan const&) = delete;
};

// Fill (re, im) of sum_k w_k e^{i k t_j} on the m-grid, where w_k are real.
void circle_transform(std::vector<double> const& weights, int m,
                      std::vector<double>& re, std::vector<double>& im)
{
    FftPlan fft(m);
    std::fill(fft.in, fft.in + m, 0.0);
    std::copy(weights.begin(), weights.end(), fft.in);
    fftw_execute(fft.plan);

    re.assign(static_cast<std::size_t>(m), 0.0);
    im.assign(static_cast<std::size_t>(m), 0.0);
    // r2c computes sum w_k e^{-2 pi i jk/m}; conjugate to get e^{+i}.
    for (int j = 0; j <= m / 2; ++j)
    {
        re[j] = fft.out[j][0];
        im[j] = -fft.out[j][1];
    }
    for (int j = m / 2 + 1; j < m; ++j)
    {
        re[j] = re[m - j];
        im[j] = -im[m - j];
    }
    im[0] = 0.0;
    if (m % 2 == 0)
        im[m / 2] = 0.0;
}

}  // namespace

std::string_view to_string(Law law)
{
    return law == Law::gaussian ? "gaussian" : "rademacher";
}

Law parse_law(std::string_view text)
{
    if (text == "gaussian")
        return Law::gaussian;
    if (text == "rademacher")
        return Law::rademacher;
    throw std::invalid_argument("unknown coefficient law: "
                                + std::string(text));
}

CoefficientVector CoefficientVector::from_coeffs(std::vector<double> coeffs,
                                                 Law law,
                                                 std::uint64_t seed)
{
    if (coeffs.empty())
        throw std::invalid_argument("coefficient vector must be nonempty");
    for (double c : coeffs)
    {
        if (!std::isfinite(c))
            throw std::invalid_argument("coefficients must be finite");
        if (law == Law::rademacher && c != 1.0 && c != -1.0)
            throw std::invalid_argument("rademacher coefficients are +-1");
    }
    CoefficientVector result;
    result.coeffs_ = std::move(coeffs);
    result.law_ = law;
    result.seed_ = seed;
    return result;
}

CoefficientVector CoefficientVector::scaled(double factor) const
{
    if (factor == 0.0 || !std::isfinite(factor))
        throw std::invalid_argument("scale factor must be finite, nonzero");
    CoefficientVector result = *this;
    for (double& c : result.coeffs_)
        c *= factor;
    if (law_ == Law::rademacher && std::abs(factor) != 1.0)
        result.law_ = Law::gaussian;
    return result;
}

CoefficientVector sample_polynomial(int n, std::uint64_t seed, Law law)
{
    if (n < 1)
        throw std::invalid_argument("degree must be >= 1");
    std::mt19937_64 rng(seed);
    std::vector<double> coeffs(static_cast<std::size_t>(n) + 1);
    if (law == Law::gaussian)
    {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (double& c : coeffs)
            c = normal(rng);
    }
    else
    {
        for (double& c : coeffs)
            c = (rng() >> 63) ? 1.0 : -1.0;
    }
    return CoefficientVector::from_coeffs(std::move(coeffs), law, seed);
}

std::complex<double> eval_complex(CoefficientVector const& f,
                                  std::complex<double> z)
{
    auto const& c = f.coeffs();
    std::complex<double> acc = c.back();
    for (auto k = c.size() - 1; k-- > 0;)
        acc = acc * z + c[k];
    return acc;
}

std::complex<double> eval_on_circle(CoefficientVector const& f, double x)
{
    return eval_complex(f, std::polar(1.0, x));
}

CircleSample eval_circle_grid(CoefficientVector const& f, int m,
                              int max_derivative_order)
{
    int const n = f.degree();
    if (m < 2 * (n + 1))
        throw std::invalid_argument("grid size below 2(n+1)");
    if (max_derivative_order < 0 || max_derivative_order > 6)
        throw std::invalid_argument("derivative order must be in [0, 6]");

    CircleSample sample;
    sample.poly = f;
    sample.m = m;
    sample.angles.resize(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j)
        sample.angles[j] = 2.0 * kPi * j / m;
    circle_transform(f.coeffs(), m, sample.x_values, sample.y_values);

    // d^j/dt^j sum eps_k e^{ikt} = i^j sum eps_k k^j e^{ikt}
    for (int order = 1; order <= max_derivative_order; ++order)
    {
        std::vector<double> weights(f.coeffs());
        for (int k = 0; k <= n; ++k)
            weights[k] *= std::pow(static_cast<double>(k), order);
        std::vector<double> re, im;
        circle_transform(weights, m, re, im);
        std::vector<double> dx(re.size()), dy(re.size());
        for (std::size_t j = 0; j < re.size(); ++j)
        {
            switch (order % 4)
            {
                case 0: dx[j] = re[j]; dy[j] = im[j]; break;
                case 1: dx[j] = -im[j]; dy[j] = re[j]; break;
                case 2: dx[j] = -re[j]; dy[j] = -im[j]; break;
                default: dx[j] = im[j]; dy[j] = -re[j]; break;
            }
        }
        sample.derivative_orders.emplace(
            order, std::make_pair(std::move(dx), std::move(dy)));
    }
    return sample;
}

std::vector<TrigDerivative> eval_derivatives(CoefficientVector const& f,
                                             double x, int max_order)
{
    if (max_order < 0 || max_order > 6)
        throw std::invalid_argument("derivative order must be in [0, 6]");
    auto const& c = f.coeffs();
    int const n = f.degree();
    std::complex<double> const z = std::polar(1.0, x);

    std::vector<TrigDerivative> result;
    result.reserve(static_cast<std::size_t>(max_order) + 1);
    std::vector<double> weights(c);
    std::complex<double> ipow(1.0, 0.0);
    for (int j = 0; j <= max_order; ++j)
    {
        // Horner on the coefficients eps_k k^j.
        std::complex<double> acc = weights[n];
        for (int k = n; k-- > 0;)
            acc = acc * z + weights[k];
        std::complex<double> const v = ipow * acc;
        result.push_back({v.real(), v.imag()});
        ipow *= std::complex<double>(0.0, 1.0);
        for (int k = 0; k <= n; ++k)
            weights[k] *= k;
    }
    return result;
}

TrigDerivative eval_first_derivative(CoefficientVector const& f, double x)
{
    auto const& c = f.coeffs();
    int const n = f.degree();
    std::complex<double> const z = std::polar(1.0, x);
    std::complex<double> acc = c[n] * double(n);
    for (int k = n; k-- > 0;)
        acc = acc * z + c[k] * double(k);
    // i * acc
    return {-acc.imag(), acc.real()};
}

double sup_norm_circle(CoefficientVector const& f)
{
    int const n = f.degree();
    int const m = 16 * (n + 1);
    CircleSample const grid = eval_circle_grid(f, m);
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t j = 0; j < grid.x_values.size(); ++j)
    {
        double const v = std::hypot(grid.x_values[j], grid.y_values[j]);
        if (v > best_val)
        {
            best_val = v;
            best = j;
        }
    }
    auto modulus = [&f](double t) { return std::abs(eval_on_circle(f, t)); };

    double const h = 2.0 * kPi / m;
    double a = grid.angles[best] - h;
    double b = grid.angles[best] + h;
    double const invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c1 = b - invphi * (b - a);
    double c2 = a + invphi * (b - a);
    double f1 = modulus(c1);
    double f2 = modulus(c2);
    for (int it = 0; it < 80 && (b - a) > 1e-15; ++it)
    {
        if (f1 > f2)
        {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - invphi * (b - a);
            f1 = modulus(c1);
        }
        else
        {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + invphi * (b - a);
            f2 = modulus(c2);
        }
    }
    return std::max({best_val, f1, f2});
}

}  // namespace circlab::gpoly
