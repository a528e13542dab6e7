// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#include "circlab/kacrice.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "circlab/quadrature.hpp"

namespace circlab::kacrice
{
namespace
{
constexpr int kMaxOrder = 12;

// cos(q pi / 2) and sin(q pi / 2) for integer q, exactly.
int quarter_cos(int q)
{
    static constexpr int table[4] = {1, 0, -1, 0};
    return table[((q % 4) + 4) % 4];
}

int quarter_sin(int q)
{
    return quarter_cos(q - 1);
}

// D_m(u), S_m(u) for m = 0..max_order in one pass over k.
struct Moments
{
    double u = 0.0;
    int max_order = 0;
    std::array<double, kMaxOrder + 1> d{};
    std::array<double, kMaxOrder + 1> s{};
};

Moments compute_moments(int n, double u, int max_order)
{
    Moments m;
    m.u = u;
    m.max_order = max_order;
    for (int k = 0; k <= n; ++k)
    {
        double const c = std::cos(k * u);
        double const sn = std::sin(k * u);
        double power = 1.0;
        for (int j = 0; j <= max_order; ++j)
        {
            m.d[j] += power * c;
            m.s[j] += power * sn;
            power *= k;
        }
    }
    return m;
}

// Small cache of moment tables keyed on the exact argument.
class MomentCache
{
  public:
    MomentCache(int n, int max_order) : n_(n), max_order_(max_order) {}

    // sum_k k^m cos(k u + q pi/2)
    double shifted(int m, double u, int q)
    {
        bool const flip = u < 0.0;
        Moments const& mo = get(std::abs(u));
        double const s = flip ? -mo.s[m] : mo.s[m];
        return mo.d[m] * quarter_cos(q) - s * quarter_sin(q);
    }

  private:
    Moments const& get(double u)
    {
        for (auto const& mo : cache_)
        {
            if (mo.u == u)
                return mo;
        }
        cache_.push_back(compute_moments(n_, u, max_order_));
        return cache_.back();
    }

    int n_;
    int max_order_;
    std::vector<Moments> cache_;
};

int phase_offset(Field f)
{
    return f == Field::Y ? -1 : 0;
}

void check_finite_field(Field f)
{
    if (f != Field::X && f != Field::Y)
        throw std::invalid_argument("finite covariance needs fields X or Y");
}

void check_order(int a)
{
    if (a < 0 || a > 6)
        throw std::invalid_argument("derivative order must be in [0, 6]");
}

double finite_entry(MomentCache& cache, Field F, int a, Field G, int b,
                    double x, double y)
{
    int const qa = a + phase_offset(F);
    int const qb = b + phase_offset(G);
    int const m = a + b;
    return 0.5 * (cache.shifted(m, x - y, qa - qb)
                  + cache.shifted(m, x + y, qa + qb));
}

// int_0^1 theta^m trig(u theta + q pi/2) d theta, trig = cos or sin.
double trig_moment(int m, bool cosine, double u, int q)
{
    auto phase = [cosine](int p) {
        return cosine ? quarter_cos(p) : quarter_sin(p);
    };
    if (std::abs(u) < 1e-4)
    {
        double sum = 0.0;
        double term = 1.0;
        for (int j = 0; j < 6; ++j)
        {
            sum += term * phase(q + j) / (m + j + 1);
            term *= u / (j + 1);
        }
        return sum;
    }
    if (std::abs(u) >= 16.0 + 2.0 * m)
    {
        // Upward recurrence I_m = (e^{iu} - m I_{m-1}) / (iu), stable for |u| > m.
        std::complex<double> const iu(0.0, u);
        std::complex<double> const e = std::polar(1.0, u);
        std::complex<double> im = (e - 1.0) / iu;
        for (int j = 1; j <= m; ++j)
            im = (e - static_cast<double>(j) * im) / iu;
        std::complex<double> const rot(quarter_cos(q), quarter_sin(q));
        std::complex<double> const v = rot * im;
        return cosine ? v.real() : v.imag();
    }
    auto integrand = [=](double th) {
        double const w = u * th;
        double const c = std::cos(w);
        double const s = std::sin(w);
        // trig(w + q pi/2) from cos w, sin w
        double const v = cosine ? c * quarter_cos(q) - s * quarter_sin(q)
                                : s * quarter_cos(q) + c * quarter_sin(q);
        return std::pow(th, m) * v;
    };
    // Panels of at most pi in phase, 24-point Gauss-Legendre on each.
    static quad::Rule const rule = quad::gauss_legendre(24, 0.0, 1.0);
    int const panels = std::max(1, static_cast<int>(std::ceil(std::abs(u) / kPi)));
    double sum = 0.0;
    for (int p = 0; p < panels; ++p)
    {
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            sum += rule.weights[i] * integrand((p + rule.nodes[i]) / panels);
    }
    return sum / panels;
}

void reject_duplicates(std::vector<RowLabel> const& spec)
{
    for (std::size_t i = 0; i < spec.size(); ++i)
    {
        for (std::size_t j = i + 1; j < spec.size(); ++j)
        {
            if (spec[i] == spec[j])
            {
                std::ostringstream os;
                os << "duplicate covariance row " << to_string(spec[i].field)
                   << "^(" << spec[i].order << ") at " << spec[i].location;
                throw std::invalid_argument(os.str());
            }
        }
    }
}

// log det of a symmetric positive definite matrix.
double log_det_spd(Eigen::MatrixXd const& m)
{
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success)
    {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            sum += 2.0 * std::log(llt.matrixL()(i, i));
        return sum;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
        double const ev = es.eigenvalues()[i];
        if (!(ev > 0.0))
            return -kInfinity;
        sum += std::log(ev);
    }
    return sum;
}

// Square root factor of a PSD matrix (Cholesky, else clipped eigenbasis).
Eigen::MatrixXd psd_factor(Eigen::MatrixXd const& m)
{
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success)
        return llt.matrixL();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal();
}

bool has_duplicates(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) != v.end();
}

// Rows X(x_i), Y(y_i), then X'(x_i), Y'(y_i).
std::vector<RowLabel> zero_rows(std::vector<double> const& xs,
                                std::vector<double> const& ys,
                                bool with_slopes)
{
    std::vector<RowLabel> spec;
    for (double x : xs)
        spec.push_back({Field::X, 0, x});
    for (double y : ys)
        spec.push_back({Field::Y, 0, y});
    if (with_slopes)
    {
        for (double x : xs)
            spec.push_back({Field::X, 1, x});
        for (double y : ys)
            spec.push_back({Field::Y, 1, y});
    }
    return spec;
}

struct ConditionedSlopes
{
    //! log det of the normalized pinned block.
    double log_det_norm = 0.0;
    //! Conditioned covariance of the normalized slopes.
    Eigen::MatrixXd reduced;
};

ConditionedSlopes conditioned_slopes(int n, std::vector<double> const& xs,
                                     std::vector<double> const& ys)
{
    auto const block = covariance_block(n, zero_rows(xs, ys, true), true);
    int const pinned_count = static_cast<int>(xs.size() + ys.size());
    std::vector<int> pinned(static_cast<std::size_t>(pinned_count));
    for (int i = 0; i < pinned_count; ++i)
        pinned[i] = i;
    auto const cond = condition_on_zeros(block, pinned);
    ConditionedSlopes result;
    result.log_det_norm = log_det_spd(
        block.entries.topLeftCorner(pinned_count, pinned_count));
    result.reduced = cond.reduced.entries;
    return result;
}

struct ProductMoment
{
    double mean = 0.0;
    double std_error = 0.0;
};

// E prod |w_i| for w ~ N(0, cov), plain Monte Carlo.
ProductMoment abs_product_moment(Eigen::MatrixXd const& cov,
                                 MonteCarloOptions const& opts)
{
    if (opts.samples < 2)
        throw std::invalid_argument("Monte Carlo needs at least 2 samples");
    Eigen::MatrixXd const factor = psd_factor(cov);
    auto const dim = cov.rows();
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(dim);
    double mean = 0.0;
    double m2 = 0.0;
    for (int i = 0; i < opts.samples; ++i)
    {
        for (Eigen::Index j = 0; j < dim; ++j)
            z[j] = normal(rng);
        Eigen::VectorXd const w = factor * z;
        double prod = 1.0;
        for (Eigen::Index j = 0; j < dim; ++j)
            prod *= std::abs(w[j]);
        double const delta = prod - mean;
        mean += delta / (i + 1);
        m2 += delta * (prod - mean);
    }
    double const var = m2 / (opts.samples - 1);
    return {mean, std::sqrt(var / opts.samples)};
}

// Arcs of psi in [0, 2 pi) where rho sin(psi) / 2 lies in U.
std::vector<std::pair<double, double>> gamma_arcs(double rho,
                                                  IntervalSet const& U)
{
    std::vector<std::pair<double, double>> arcs;
    if (rho == 0.0)
    {
        if (contains(U, 0.0))
        {
            arcs.emplace_back(0.0, kPi);
            arcs.emplace_back(kPi, 2.0 * kPi);
        }
        return arcs;
    }
    std::vector<double> cuts = {0.0, 0.5 * kPi, kPi, 1.5 * kPi, 2.0 * kPi};
    auto add_level = [&cuts](double c) {
        if (!(c > -1.0 && c < 1.0))
            return;
        double const a = std::asin(c);
        for (double p : {a, kPi - a})
        {
            double w = std::fmod(p, 2.0 * kPi);
            if (w < 0.0)
                w += 2.0 * kPi;
            cuts.push_back(w);
        }
    };
    for (auto const& iv : U)
    {
        if (std::isfinite(iv.lo))
            add_level(2.0 * iv.lo / rho);
        if (std::isfinite(iv.hi))
            add_level(2.0 * iv.hi / rho);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    {
        double const mid = 0.5 * (cuts[i] + cuts[i + 1]);
        if (contains(U, 0.5 * rho * std::sin(mid)))
            arcs.emplace_back(cuts[i], cuts[i + 1]);
    }
    return arcs;
}

// E[|s t| 1(rho s t / (s^2 + t^2) in U)] for (s, t) ~ N(0, C), reduced to
// a one-dimensional integral over the doubled polar angle psi.
struct PolarResult
{
    double value = 0.0;
    double rel_error = 0.0;
};

PolarResult polar_expectation(Eigen::Matrix2d const& C, double rho,
                              IntervalSet const& U)
{
    double const det = C.determinant();
    if (!(det > 0.0))
        throw std::domain_error("conditioned slope covariance is singular");
    Eigen::Matrix2d const inv = C.inverse();
    double const P = inv(0, 0);
    double const Q = inv(1, 1);
    double const R = inv(0, 1);
    auto integrand = [=](double psi) {
        double const q = 0.5 * ((P + Q) + (P - Q) * std::cos(psi))
                         + R * std::sin(psi);
        return std::abs(std::sin(psi)) / (q * q);
    };
    static quad::Rule const fine = quad::gauss_legendre(32, 0.0, 1.0);
    static quad::Rule const coarse = quad::gauss_legendre(16, 0.0, 1.0);
    double sum_fine = 0.0;
    double sum_coarse = 0.0;
    for (auto const& [lo, hi] : gamma_arcs(rho, U))
    {
        double const width = hi - lo;
        for (std::size_t i = 0; i < fine.nodes.size(); ++i)
            sum_fine += width * fine.weights[i]
                        * integrand(lo + width * fine.nodes[i]);
        for (std::size_t i = 0; i < coarse.nodes.size(); ++i)
            sum_coarse += width * coarse.weights[i]
                          * integrand(lo + width * coarse.nodes[i]);
    }
    double const scale = 1.0 / (2.0 * kPi * std::sqrt(det));
    PolarResult result;
    result.value = scale * sum_fine;
    result.rel_error = sum_fine != 0.0
                           ? std::abs(sum_fine - sum_coarse) / sum_fine
                           : 0.0;
    return result;
}

double hermite_expectation(Eigen::Matrix2d const& C, double rho,
                           IntervalSet const& U, int nodes)
{
    auto const rule = quad::gauss_hermite(nodes);
    Eigen::Matrix2d const L = psd_factor(C);
    double sum = 0.0;
    for (int i = 0; i < nodes; ++i)
    {
        for (int j = 0; j < nodes; ++j)
        {
            Eigen::Vector2d const u(std::sqrt(2.0) * rule.nodes[i],
                                    std::sqrt(2.0) * rule.nodes[j]);
            Eigen::Vector2d const w = L * u;
            double const prod = w[0] * w[1];
            double const norm = w[0] * w[0] + w[1] * w[1];
            double const gamma = norm > 0.0 ? rho * prod / norm : 0.0;
            if (contains(U, gamma))
                sum += rule.weights[i] * rule.weights[j] * std::abs(prod);
        }
    }
    return sum / kPi;
}

}  // namespace

std::string to_string(Field f)
{
    switch (f)
    {
        case Field::X: return "X";
        case Field::Y: return "Y";
        case Field::W: return "W";
        case Field::Z: return "Z";
    }
    return "?";
}

std::string to_string(DensityMethod m)
{
    switch (m)
    {
        case DensityMethod::closed_form_expectation:
            return "closed_form_expectation";
        case DensityMethod::gauss_hermite: return "gauss_hermite";
        case DensityMethod::monte_carlo: return "monte_carlo";
    }
    return "?";
}

double CovarianceMatrix::min_eigenvalue() const
{
    if (entries.size() == 0)
        return kInfinity;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(entries,
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
}

bool CovarianceMatrix::is_psd() const
{
    if (entries.size() == 0)
        return true;
    return min_eigenvalue() >= -1e-9 * entries.diagonal().maxCoeff();
}

bool CovarianceMatrix::is_symmetric(double rel_tol) const
{
    double const scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
    return (entries - entries.transpose()).cwiseAbs().maxCoeff()
           <= rel_tol * scale;
}

DirichletSum dirichlet_sum(int n, int d, double x)
{
    if (d < 0 || d > kMaxOrder)
        throw std::invalid_argument("Dirichlet order must be in [0, 12]");
    DirichletSum result;
    for (int k = 0; k <= n; ++k)
    {
        double const w = std::pow(static_cast<double>(k), d);
        result.d += w * std::cos(k * x);
        result.s += w * std::sin(k * x);
    }
    return result;
}

double cov_finite(int n, Field F, int a, Field G, int b, double x, double y)
{
    check_finite_field(F);
    check_finite_field(G);
    check_order(a);
    check_order(b);
    MomentCache cache(n, a + b);
    return finite_entry(cache, F, a, G, b, x, y);
}

double limit_cov(Field F, int a, Field G, int b, double t, double s)
{
    if ((F != Field::W && F != Field::Z) || (G != Field::W && G != Field::Z))
        throw std::invalid_argument("limit covariance needs fields W or Z");
    check_order(a);
    check_order(b);
    int const m = a + b;
    if (F == G)
        return 0.5 * trig_moment(m, true, t - s, a - b);
    if (F == Field::W)
        return 0.5 * trig_moment(m, false, s - t, b - a);
    return 0.5 * trig_moment(m, false, t - s, a - b);
}

CovarianceMatrix covariance_block(int n, std::vector<RowLabel> const& spec,
                                  bool normalized)
{
    reject_duplicates(spec);
    int max_order = 0;
    for (auto const& row : spec)
    {
        check_finite_field(row.field);
        check_order(row.order);
        max_order = std::max(max_order, row.order);
    }
    MomentCache cache(n, 2 * max_order);
    auto const dim = static_cast<Eigen::Index>(spec.size());
    CovarianceMatrix result;
    result.labels = spec;
    result.entries.resize(dim, dim);
    double const nd = static_cast<double>(n);
    for (Eigen::Index i = 0; i < dim; ++i)
    {
        for (Eigen::Index j = i; j < dim; ++j)
        {
            auto const& r = spec[i];
            auto const& c = spec[j];
            double v = finite_entry(cache, r.field, r.order, c.field, c.order,
                                    r.location, c.location);
            if (normalized)
                v /= std::pow(nd, r.order + c.order + 1);
            result.entries(i, j) = v;
            result.entries(j, i) = v;
        }
    }
    return result;
}

CovarianceMatrix limit_block(std::vector<RowLabel> const& spec)
{
    reject_duplicates(spec);
    auto const dim = static_cast<Eigen::Index>(spec.size());
    CovarianceMatrix result;
    result.labels = spec;
    result.entries.resize(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
    {
        for (Eigen::Index j = i; j < dim; ++j)
        {
            auto const& r = spec[i];
            auto const& c = spec[j];
            double const v = limit_cov(r.field, r.order, c.field, c.order,
                                       r.location, c.location);
            result.entries(i, j) = v;
            result.entries(j, i) = v;
        }
    }
    return result;
}

ConditionedGaussian condition_on_zeros(CovarianceMatrix const& block,
                                       std::vector<int> const& pinned)
{
    int const dim = block.dim();
    std::vector<char> is_pinned(static_cast<std::size_t>(dim), 0);
    for (int p : pinned)
    {
        if (p < 0 || p >= dim || is_pinned[p])
            throw std::invalid_argument("invalid pinned index set");
        is_pinned[p] = 1;
    }
    ConditionedGaussian result;
    result.base = block;
    result.conditioned_indices = pinned;
    for (int i = 0; i < dim; ++i)
    {
        if (!is_pinned[i])
            result.free_indices.push_back(i);
    }
    auto const& free = result.free_indices;
    auto const np = static_cast<Eigen::Index>(pinned.size());
    auto const nf = static_cast<Eigen::Index>(free.size());

    Eigen::MatrixXd C(np, np), B(nf, np), A(nf, nf);
    for (Eigen::Index i = 0; i < np; ++i)
        for (Eigen::Index j = 0; j < np; ++j)
            C(i, j) = block.entries(pinned[i], pinned[j]);
    for (Eigen::Index i = 0; i < nf; ++i)
    {
        for (Eigen::Index j = 0; j < np; ++j)
            B(i, j) = block.entries(free[i], pinned[j]);
        for (Eigen::Index j = 0; j < nf; ++j)
            A(i, j) = block.entries(free[i], free[j]);
    }

    if (np > 0)
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            C, Eigen::EigenvaluesOnly);
        if (!(es.eigenvalues()[0] > 1e-12 * C.diagonal().maxCoeff()))
        {
            Eigen::Index bi = 0, bj = std::min<Eigen::Index>(1, np - 1);
            double best = -1.0;
            for (Eigen::Index i = 0; i < np; ++i)
            {
                for (Eigen::Index j = i + 1; j < np; ++j)
                {
                    double const corr = std::abs(C(i, j))
                                        / std::sqrt(C(i, i) * C(j, j));
                    if (corr > best)
                    {
                        best = corr;
                        bi = i;
                        bj = j;
                    }
                }
            }
            auto const& li = block.labels[pinned[bi]];
            auto const& lj = block.labels[pinned[bj]];
            std::ostringstream os;
            os.precision(17);
            os << "pinned block is singular: " << to_string(li.field) << "^("
               << li.order << ")@" << li.location << " vs "
               << to_string(lj.field) << "^(" << lj.order << ")@"
               << lj.location;
            throw std::domain_error(os.str());
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(C);
        A -= B * ldlt.solve(B.transpose());
        A = 0.5 * (A + A.transpose()).eval();
    }
    result.reduced.entries = A;
    for (int i : free)
        result.reduced.labels.push_back(block.labels[i]);
    return result;
}

DensityEval p1_density(int n, double x, double y, IntervalSet const& U,
                       P1Options const& opts)
{
    DensityEval result;
    result.method = opts.method;
    double const nd = static_cast<double>(n);
    double const r = x - y;
    bool const empty_u = std::all_of(U.begin(), U.end(),
                                     [](Interval const& iv) {
                                         return iv.empty();
                                     });

    Eigen::Matrix2d C;
    if (opts.idealized)
    {
        result.det_sigma = nd * nd / 4.0;
        C = Eigen::Matrix2d::Identity() / 24.0;
    }
    else
    {
        auto const s = conditioned_slopes(n, {x}, {y});
        result.det_sigma = std::exp(s.log_det_norm) * nd * nd;
        C = s.reduced;
    }
    if (empty_u || std::abs(r) > pair_cutoff(n, opts.cutoff_multiplier))
        return result;

    double const rho = r * nd * nd;
    double const scale = nd * nd * nd;
    switch (opts.method)
    {
        case DensityMethod::closed_form_expectation:
        {
            auto const e = polar_expectation(C, rho, U);
            result.numerator = scale * e.value;
            result.rel_error_estimate = e.rel_error;
            break;
        }
        case DensityMethod::gauss_hermite:
        {
            double const base = hermite_expectation(C, rho, U, opts.nodes);
            double const refined
                = hermite_expectation(C, rho, U, 2 * opts.nodes);
            result.numerator = scale * refined;
            result.rel_error_estimate
                = refined != 0.0 ? std::abs(refined - base) / refined : 0.0;
            break;
        }
        case DensityMethod::monte_carlo:
            throw std::invalid_argument("p1 uses quadrature methods only");
    }
    result.value = result.numerator
                   / (2.0 * kPi * std::sqrt(result.det_sigma));
    return result;
}

double mean_mu_integral(int n, IntervalSet const& U, MeanMuOptions const& opts)
{
    for (auto const& iv : U)
    {
        if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi))
            throw std::invalid_argument("U must be bounded");
    }
    bool const empty_u = std::all_of(
        U.begin(), U.end(), [](Interval const& iv) { return iv.empty(); });
    if (empty_u)
        return 0.0;

    double const nd = static_cast<double>(n);
    double const n2 = nd * nd;
    double const rho_max = pair_cutoff(n, opts.cutoff_multiplier) * n2;

    // Segments in rho = r n^2: kinks at 2 * endpoints, then geometric.
    std::vector<double> cuts = {0.0, rho_max, -rho_max};
    double largest = 1.0;
    for (auto const& iv : U)
    {
        for (double e : {iv.lo, iv.hi})
        {
            if (e == 0.0)
                continue;
            for (double c : {2.0 * e, -2.0 * e})
            {
                if (std::abs(c) < rho_max)
                    cuts.push_back(c);
            }
            largest = std::max(largest, std::abs(2.0 * e));
        }
    }
    for (double c = 2.0 * largest; c < rho_max; c *= 2.0)
    {
        cuts.push_back(c);
        cuts.push_back(-c);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto const r_rule = quad::gauss_legendre(opts.r_nodes, 0.0, 1.0);
    auto const x_rule = quad::gauss_legendre(4, 0.0, 1.0);
    P1Options p1opts;
    p1opts.cutoff_multiplier = opts.cutoff_multiplier * (1.0 + 1e-12);

    double const margin = t0_margin(n);
    double const x_lo = margin;
    double const x_hi = kPi - margin;
    double const panel = (x_hi - x_lo) / opts.x_panels;
    double total = 0.0;
    for (int p = 0; p < opts.x_panels; ++p)
    {
        for (std::size_t ix = 0; ix < x_rule.nodes.size(); ++ix)
        {
            double const x = x_lo + panel * (p + x_rule.nodes[ix]);
            double inner = 0.0;
            for (std::size_t s = 0; s + 1 < cuts.size(); ++s)
            {
                double const width = cuts[s + 1] - cuts[s];
                for (std::size_t ir = 0; ir < r_rule.nodes.size(); ++ir)
                {
                    double const rho = cuts[s] + width * r_rule.nodes[ir];
                    double const y = x - rho / n2;
                    inner += width * r_rule.weights[ir]
                             * p1_density(n, x, y, U, p1opts).value;
                }
            }
            total += panel * x_rule.weights[ix] * inner / n2;
        }
    }
    return total;
}

DensityEval pk_density(int n, std::vector<double> const& xs,
                       std::vector<double> const& ys,
                       MonteCarloOptions const& opts)
{
    auto const k = xs.size();
    if (k < 1 || k > 3 || ys.size() != k)
        throw std::invalid_argument("pk_density needs 1 <= k <= 3 points");
    DensityEval result;
    result.method = DensityMethod::monte_carlo;
    if (has_duplicates(xs) || has_duplicates(ys))
    {
        result.degenerate = true;
        return result;
    }
    ConditionedSlopes slopes;
    try
    {
        slopes = conditioned_slopes(n, xs, ys);
    }
    catch (std::domain_error const&)
    {
        result.degenerate = true;
        return result;
    }
    double const nd = static_cast<double>(n);
    double const kd = static_cast<double>(k);
    auto const moment = abs_product_moment(slopes.reduced, opts);
    result.numerator = moment.mean * std::pow(nd, 3.0 * kd);
    result.det_sigma = std::exp(slopes.log_det_norm + 2.0 * kd * std::log(nd));
    result.rel_error_estimate = moment.mean > 0.0
                                    ? moment.std_error / moment.mean
                                    : 0.0;
    result.value = result.numerator
                   / (std::pow(2.0 * kPi, kd) * std::sqrt(result.det_sigma));
    return result;
}

double zero_intensity(int n, Field which, double x)
{
    check_finite_field(which);
    MomentCache cache(n, 2);
    double const v0 = finite_entry(cache, which, 0, which, 0, x, x);
    double const v1 = finite_entry(cache, which, 1, which, 1, x, x);
    double const c = finite_entry(cache, which, 0, which, 1, x, x);
    double const disc = std::max(0.0, v0 * v1 - c * c);
    return std::sqrt(disc) / (kPi * v0);
}

double kacrice_zero_count(int n, Field which, Interval interval)
{
    check_finite_field(which);
    if (interval.empty())
        return 0.0;
    int const panels = std::max(
        16, static_cast<int>(std::ceil(interval.length() * n / 2.0)));
    auto const rule = quad::gauss_legendre(8, 0.0, 1.0);
    double const width = interval.length() / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p)
    {
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        {
            double const x = interval.lo + width * (p + rule.nodes[i]);
            total += width * rule.weights[i] * zero_intensity(n, which, x);
        }
    }
    return total;
}

std::vector<double> divided_differences(std::vector<double> const& xs,
                                        std::vector<double> const& ys)
{
    if (xs.size() != ys.size() || xs.empty())
        throw std::invalid_argument("xs and ys must have equal, nonzero size");
    for (std::size_t i = 1; i < xs.size(); ++i)
    {
        if (!(xs[i] > xs[i - 1]))
            throw std::invalid_argument("xs must be strictly increasing");
    }
    std::vector<double> c = ys;
    auto const k = c.size();
    for (std::size_t j = 1; j < k; ++j)
    {
        for (std::size_t i = k - 1; i >= j; --i)
            c[i] = (c[i] - c[i - 1]) / (xs[i] - xs[i - j]);
    }
    return c;
}

Eigen::MatrixXd delta_matrix(std::vector<double> const& xs)
{
    auto const k = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd m(k, k);
    std::vector<double> unit(xs.size(), 0.0);
    for (Eigen::Index j = 0; j < k; ++j)
    {
        std::fill(unit.begin(), unit.end(), 0.0);
        unit[j] = 1.0;
        auto const col = divided_differences(xs, unit);
        for (Eigen::Index i = 0; i < k; ++i)
            m(i, j) = col[i];
    }
    return m;
}

double delta_det(std::vector<double> const& xs)
{
    double log_sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        for (std::size_t j = i + 1; j < xs.size(); ++j)
        {
            double const gap = xs[j] - xs[i];
            if (!(gap > 0.0))
                throw std::invalid_argument("xs must be strictly increasing");
            log_sum -= std::log(gap);
        }
    }
    return std::exp(log_sum);
}

double log_min_gap_product(std::vector<double> const& a, int n)
{
    double const cap = 1.0 / n;
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        for (std::size_t j = i + 1; j < a.size(); ++j)
            sum += 2.0 * std::log(std::min(std::abs(a[j] - a[i]), cap));
    }
    return sum;
}

DetMonitor det_lower_bound_monitor(int n, std::vector<double> const& xs,
                                   std::vector<double> const& ys)
{
    if (xs.empty() || xs.size() != ys.size() || xs.size() > 3)
        throw std::invalid_argument("monitor needs 1 <= k <= 3 points");
    double const kd = static_cast<double>(xs.size());
    double const log_n = std::log(static_cast<double>(n));
    DetMonitor result;
    if (has_duplicates(xs) || has_duplicates(ys))
    {
        result.log_det = -kInfinity;
        return result;
    }
    auto const block = covariance_block(n, zero_rows(xs, ys, false), true);
    result.log_det = log_det_spd(block.entries) + 2.0 * kd * log_n;
    result.det = std::exp(result.log_det);
    double const log_bound = 2.0 * kd * kd * log_n
                             + log_min_gap_product(xs, n)
                             + log_min_gap_product(ys, n);
    result.bound_ratio = std::exp(result.log_det - log_bound);
    return result;
}

NumeratorMonitor numerator_bound_monitor(int n, std::vector<double> const& xs,
                                         std::vector<double> const& ys,
                                         MonteCarloOptions const& opts)
{
    if (xs.empty() || xs.size() != ys.size() || xs.size() > 2)
        throw std::invalid_argument("numerator monitor needs k in {1, 2}");
    double const kd = static_cast<double>(xs.size());
    double const log_n = std::log(static_cast<double>(n));
    auto const slopes = conditioned_slopes(n, xs, ys);
    auto const moment = abs_product_moment(slopes.reduced, opts);
    NumeratorMonitor result;
    double const log_alpha = std::log(moment.mean) + 3.0 * kd * log_n;
    result.alpha = std::exp(log_alpha);
    double const log_bound = (2.0 * kd * kd + kd) * log_n
                             + log_min_gap_product(xs, n)
                             + log_min_gap_product(ys, n);
    result.ratio = std::exp(log_alpha - log_bound);
    result.rel_error = moment.std_error / moment.mean;
    return result;
}

std::vector<RowLabel> limit_labels(std::vector<double> const& zs, int s)
{
    if (s < 0 || s > 6)
        throw std::invalid_argument("order must be in [0, 6]");
    std::vector<RowLabel> spec;
    for (Field f : {Field::W, Field::Z})
    {
        for (double z : zs)
        {
            for (int j = 0; j <= s; ++j)
                spec.push_back({f, j, z});
        }
    }
    return spec;
}

QuadraticForm quadratic_form_integral(std::vector<double> const& zs, int s,
                                      std::vector<double> const& v)
{
    auto const spec = limit_labels(zs, s);
    if (v.size() != spec.size())
        throw std::invalid_argument("v must have dimension 2 r (s + 1)");
    auto const block = limit_block(spec);
    Eigen::Map<Eigen::VectorXd const> vec(v.data(),
                                          static_cast<Eigen::Index>(v.size()));
    QuadraticForm result;
    result.lhs = vec.dot(block.entries * vec);

    auto const half = v.size() / 2;
    auto const width = static_cast<std::size_t>(s) + 1;
    auto integrand = [&](double theta) {
        using cplx = std::complex<double>;
        cplx total = 0.0;
        for (std::size_t a = 0; a < zs.size(); ++a)
        {
            cplx const wave = std::polar(1.0, zs[a] * theta);
            cplx power = 1.0;
            for (std::size_t b = 0; b < width; ++b)
            {
                std::size_t const idx = a * width + b;
                total += cplx(v[idx], -v[half + idx]) * power * wave;
                power *= cplx(0.0, theta);
            }
        }
        return std::norm(total);
    };
    double zmax = 0.0;
    for (double z : zs)
        zmax = std::max(zmax, std::abs(z));
    static quad::Rule const rule = quad::gauss_legendre(32, 0.0, 1.0);
    int const panels =
        std::max(1, static_cast<int>(std::ceil(2.0 * zmax / kPi)));
    double rhs = 0.0;
    for (int p = 0; p < panels; ++p)
    {
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            rhs += rule.weights[i] * integrand((p + rule.nodes[i]) / panels);
    }
    rhs /= panels;
    result.rhs = 0.5 * rhs;
    return result;
}

double min_eig_limit(std::vector<double> const& zs, int s)
{
    auto const dim = limit_labels(zs, s).size();
    if (zs.empty())
        return kInfinity;
    // Stationarity: centring the points keeps the phases small.
    auto const [lo_it, hi_it] = std::minmax_element(zs.begin(), zs.end());
    double const centre = 0.5 * (*lo_it + *hi_it);
    double const reach = 0.5 * (*hi_it - *lo_it);

    static quad::Rule const rule = quad::gauss_legendre(64, 0.0, 1.0);
    int const panels = std::max(1, static_cast<int>(std::ceil(2.0 * reach / kPi)));
    auto const nodes = static_cast<Eigen::Index>(rule.nodes.size()) * panels;
    auto const width = static_cast<std::size_t>(s) + 1;
    auto const half = static_cast<Eigen::Index>(dim / 2);

    // v^T Sigma v = |M v|^2 with rows (Re, Im) of sqrt(w/2) F_v(theta).
    Eigen::MatrixXd M(2 * nodes, static_cast<Eigen::Index>(dim));
    using cplx = std::complex<double>;
    Eigen::Index row = 0;
    for (int p = 0; p < panels; ++p)
    {
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        {
            double const theta = (p + rule.nodes[i]) / panels;
            double const amp = std::sqrt(0.5 * rule.weights[i] / panels);
            for (std::size_t a = 0; a < zs.size(); ++a)
            {
                cplx const wave = std::polar(amp, (zs[a] - centre) * theta);
                cplx power = 1.0;
                for (std::size_t b = 0; b < width; ++b)
                {
                    auto const col = static_cast<Eigen::Index>(a * width + b);
                    cplx const cx = power * wave;
                    cplx const cy = cplx(0.0, -1.0) * cx;
                    M(row, col) = cx.real();
                    M(row + 1, col) = cx.imag();
                    M(row, half + col) = cy.real();
                    M(row + 1, half + col) = cy.imag();
                    power *= cplx(0.0, theta);
                }
            }
            row += 2;
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    double const smallest = svd.singularValues().minCoeff();
    return smallest * smallest;
}

LimitSample simulate_limit_process(std::vector<double> const& grid,
                                   int spectral_nodes, std::uint64_t seed)
{
    if (spectral_nodes < 64)
        throw std::invalid_argument("need at least 64 spectral nodes");
    auto const rule = quad::gauss_legendre(spectral_nodes, 0.0, 1.0);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> xi(rule.nodes.size());
    std::vector<double> xi2(rule.nodes.size());
    for (std::size_t j = 0; j < xi.size(); ++j)
    {
        xi[j] = normal(rng);
        xi2[j] = normal(rng);
    }
    LimitSample out;
    out.w.reserve(grid.size());
    out.z.reserve(grid.size());
    double const inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (double t : grid)
    {
        double w = 0.0;
        double z = 0.0;
        for (std::size_t j = 0; j < xi.size(); ++j)
        {
            double const amp = std::sqrt(rule.weights[j]);
            double const c = std::cos(t * rule.nodes[j]);
            double const s = std::sin(t * rule.nodes[j]);
            w += amp * (c * xi[j] + s * xi2[j]);
            z += amp * (s * xi[j] - c * xi2[j]);
        }
        out.w.push_back(inv_sqrt2 * w);
        out.z.push_back(inv_sqrt2 * z);
    }
    return out;
}

}  // namespace circlab::kacrice
