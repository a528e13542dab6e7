// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#include "circlab/roots.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace circlab::roots
{
namespace
{
using cplx = std::complex<double>;

constexpr double kRealTolerance = 1e-12;

// Newton ratio p(z) / p'(z). For |z| > 1 the reversed polynomial in 1/z is
// used so Horner never sees growing powers.
cplx newton_ratio(std::vector<double> const& c, cplx z)
{
    auto const n = c.size() - 1;
    if (std::norm(z) <= 1.0)
    {
        cplx p = c[n];
        cplx dp = 0.0;
        for (auto k = n; k-- > 0;)
        {
            dp = dp * z + p;
            p = p * z + c[k];
        }
        if (p == cplx(0.0))
            return 0.0;
        return p / dp;
    }
    // p(z) = z^n q(w), q(w) = sum_k c_k w^{n-k}, w = 1/z
    // p'/p = w (n - w q'(w) / q(w))
    cplx const w = 1.0 / z;
    cplx q = c[0];
    cplx dq = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
    {
        dq = dq * w + q;
        q = q * w + c[k];
    }
    if (q == cplx(0.0))
        return 0.0;
    cplx const logderiv = w * (static_cast<double>(n) - w * dq / q);
    return 1.0 / logderiv;
}

bool finite(cplx z)
{
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

struct Jet
{
    gpoly::TrigDerivative value;
    gpoly::TrigDerivative slope;
    gpoly::TrigDerivative curvature;
};

// (X, Y) and their first two derivatives at angle t in one Horner pass.
Jet local_jet(gpoly::CoefficientVector const& f, double t)
{
    auto const& c = f.coeffs();
    auto const n = c.size() - 1;
    cplx const z = std::polar(1.0, t);
    double const nd = static_cast<double>(n);
    cplx p = c[n];
    cplx q = c[n] * nd;
    cplx r = c[n] * nd * nd;
    for (auto k = n; k-- > 0;)
    {
        double const kd = static_cast<double>(k);
        p = p * z + c[k];
        q = q * z + c[k] * kd;
        r = r * z + c[k] * kd * kd;
    }
    return {{p.real(), p.imag()}, {-q.imag(), q.real()}, {-r.real(), -r.imag()}};
}

// Zero of g in [lo, hi] given opposite-sign end values. Newton steps are
// kept inside the shrinking bracket, with bisection as the fallback, until
// the bracket or the step drops below 1e-14; one final Newton step follows.
template<class F>
double bracketed_root(F&& g_and_slope, double lo, double hi, double vlo,
                      double vhi)
{
    bool const rising = vhi > 0.0;
    double t = lo + (hi - lo) * vlo / (vlo - vhi);
    double step_prev = hi - lo;
    for (int it = 0; it < 200; ++it)
    {
        auto const [g, dg] = g_and_slope(t);
        if (g == 0.0)
            return t;
        if ((g > 0.0) == rising)
            hi = t;
        else
            lo = t;
        double next = dg != 0.0 ? t - g / dg : lo - 1.0;
        if (!(next > lo && next < hi) || std::abs(next - t) > 0.5 * step_prev)
            next = 0.5 * (lo + hi);
        step_prev = std::abs(next - t);
        t = next;
        if (hi - lo <= 1e-14 || step_prev <= 1e-15)
            break;
    }
    auto const [g, dg] = g_and_slope(t);
    if (dg != 0.0)
    {
        double const step = g / dg;
        if (std::abs(step) <= std::max(hi - lo, 1e-14))
            t -= step;
    }
    return t;
}

}  // namespace

gpoly::CoefficientVector deflate_zero_roots(gpoly::CoefficientVector const& f,
                                            int* removed)
{
    auto const& c = f.coeffs();
    std::size_t lead = 0;
    while (lead + 1 < c.size() && c[lead] == 0.0)
        ++lead;
    if (removed)
        *removed = static_cast<int>(lead);
    std::vector<double> rest(c.begin() + static_cast<std::ptrdiff_t>(lead),
                             c.end());
    return gpoly::CoefficientVector::from_coeffs(std::move(rest), f.law(),
                                                 f.seed());
}

RootSet find_all_roots(gpoly::CoefficientVector const& f, double tol,
                       int max_sweeps)
{
    auto const& c = f.coeffs();
    int const n = f.degree();
    if (n < 1)
        throw std::invalid_argument("root finding needs degree >= 1");
    if (c.back() == 0.0)
        throw std::invalid_argument("leading coefficient is zero; deflate");
    if (!(tol > 0.0))
        throw std::invalid_argument("tolerance must be positive");

    double radius = 1.0;
    if (c.front() != 0.0)
        radius = std::pow(std::abs(c.front()) / std::abs(c.back()), 1.0 / n);
    // Equispaced arguments with an irrational offset keep the start
    // symmetric-free (no point exactly on the real axis).
    double const offset = (std::sqrt(5.0) - 1.0) * kPi / n;

    std::vector<cplx> z(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        z[k] = std::polar(radius, 2.0 * kPi * k / n + offset);

    std::vector<char> frozen(static_cast<std::size_t>(n), 0);
    std::vector<double> last_correction(static_cast<std::size_t>(n), kInfinity);
    RootSet result;
    int active = n;
    int sweep = 0;
    for (; sweep < max_sweeps && active > 0; ++sweep)
    {
        for (int i = 0; i < n; ++i)
        {
            if (frozen[i])
                continue;
            cplx const ratio = newton_ratio(c, z[i]);
            cplx sum = 0.0;
            for (int j = 0; j < n; ++j)
            {
                if (j == i)
                    continue;
                cplx const d = z[i] - z[j];
                sum += std::conj(d) / std::norm(d);
            }
            cplx w = ratio / (1.0 - ratio * sum);
            if (!finite(w))
                w = ratio;
            if (!finite(w))
                continue;
            z[i] -= w;
            double const rel = std::abs(w) / std::max(1.0, std::abs(z[i]));
            last_correction[i] = rel;
            if (rel < tol)
            {
                frozen[i] = 1;
                --active;
            }
        }
    }
    result.iterations = sweep;
    result.converged = active == 0;

    for (auto& root : z)
    {
        for (int step = 0; step < 2; ++step)
        {
            cplx const ratio = newton_ratio(c, root);
            if (finite(ratio))
                root -= ratio;
        }
    }
    result.residuals.reserve(z.size());
    for (auto const& root : z)
        result.residuals.push_back(std::abs(gpoly::eval_complex(f, root)));
    result.roots = std::move(z);
    return result;
}

bool upper_half_representative(std::complex<double> z)
{
    return z.imag() > kRealTolerance || std::abs(z.imag()) <= kRealTolerance;
}

std::vector<AnnulusPoint> annulus_roots(RootSet const& rs, int n,
                                        Interval window)
{
    if (!rs.converged)
        throw std::invalid_argument("annulus_roots needs a converged root set");
    double const n2 = static_cast<double>(n) * n;
    std::vector<AnnulusPoint> points;
    for (auto const& z : rs.roots)
    {
        if (!upper_half_representative(z))
            continue;
        double const scaled = (std::abs(z) - 1.0) * n2;
        if (!window.contains(scaled))
            continue;
        double arg = std::arg(z);
        if (arg < 0.0)
            arg = z.real() >= 0.0 ? 0.0 : kPi;
        points.push_back({scaled, arg});
    }
    return points;
}

CircleZeroSet trig_zeros(gpoly::CircleSample const& sample, Target which,
                         int n, double t0_multiplier)
{
    if (sample.m < 8 * (n + 1))
        throw std::invalid_argument("circle grid must have m >= 8(n+1)");
    auto const& values = which == Target::X ? sample.x_values
                                            : sample.y_values;
    bool const all_zero = std::all_of(values.begin(), values.end(),
                                      [](double v) { return v == 0.0; });
    if (all_zero)
        throw std::domain_error("target function vanishes identically");

    auto const& poly = sample.poly;
    bool const is_x = which == Target::X;
    auto value = [&](double t) {
        auto const j = local_jet(poly, t);
        return is_x ? std::pair{j.value.x, j.slope.x}
                    : std::pair{j.value.y, j.slope.y};
    };
    auto slope = [&](double t) {
        auto const j = local_jet(poly, t);
        return is_x ? std::pair{j.slope.x, j.curvature.x}
                    : std::pair{j.slope.y, j.curvature.y};
    };

    double const margin = t0_margin(n, t0_multiplier);
    double const double_zero_level = 1e-9 * std::sqrt(static_cast<double>(n));
    CircleZeroSet result;
    result.which = which;
    int const half = sample.m / 2;

    auto keep = [&](double lo, double hi, double vlo, double vhi) {
        double t = bracketed_root(value, lo, hi, vlo, vhi);
        if (t > margin && t < kPi - margin)
        {
            result.zeros.push_back(t);
            result.derivative_at_zero.push_back(value(t).second);
        }
    };

    for (int j = 0; j < half; ++j)
    {
        double const a = sample.angles[j];
        double const b = sample.angles[j + 1];
        double const va = values[j];
        double const vb = values[j + 1];
        if (b < margin || a > kPi - margin)
            continue;

        if (va == 0.0)
        {
            if (a > margin && a < kPi - margin)
            {
                result.zeros.push_back(a);
                result.derivative_at_zero.push_back(value(a).second);
            }
            continue;
        }
        if (va * vb < 0.0)
        {
            keep(a, b, va, vb);
            continue;
        }
        if (j == 0)
            continue;

        // A same-sign local minimum of |v| on the grid may hide two zeros
        // inside one cell: locate the extremum and test its sign.
        double const prev = values[j - 1];
        if (!(prev * va > 0.0 && std::abs(va) <= std::abs(prev)
              && std::abs(va) <= std::abs(vb)))
        {
            continue;
        }
        double const lo = sample.angles[j - 1];
        double const sl = slope(lo).first;
        double const sh = slope(b).first;
        if (!(sl * sh < 0.0))
            continue;
        double const c = bracketed_root(slope, lo, b, sl, sh);
        double const vc = value(c).first;
        if (vc * va < 0.0)
        {
            keep(lo, c, prev, vc);
            keep(c, b, vc, vb);
        }
        else if (std::abs(vc) < double_zero_level)
        {
            result.suspected_double_zeros.push_back(c);
        }
    }
    return result;
}

double min_root_gap(RootSet const& rs, int n, Interval window)
{
    double const n2 = static_cast<double>(n) * n;
    std::vector<cplx> in_window;
    for (auto const& z : rs.roots)
    {
        if (window.contains((std::abs(z) - 1.0) * n2))
            in_window.push_back(z);
    }
    double best = kInfinity;
    for (std::size_t i = 0; i < in_window.size(); ++i)
    {
        for (std::size_t j = i + 1; j < in_window.size(); ++j)
            best = std::min(best, std::abs(in_window[i] - in_window[j]) * n2);
    }
    return best;
}

}  // namespace circlab::roots
