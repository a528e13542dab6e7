// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "circlab/experiments.hpp"
#include "circlab/gpoly.hpp"
#include "circlab/kacrice.hpp"
#include "circlab/process.hpp"
#include "circlab/roots.hpp"
#include "circlab/stats.hpp"
#include "circlab/trials.hpp"

namespace
{
using json = nlohmann::ordered_json;
using namespace circlab;

struct Flags
{
    int n = 500;
    int trials = 100;
    std::uint64_t seed = 0;
    std::string law = "gaussian";
    std::vector<std::string> intervals;
    std::string source = "nu";
    int workers = 1;
    std::string out;
    double cutoff_mult = 1.0;
    std::string config;
    std::vector<int> sweep = {250, 500, 1000};

    CLI::Option* n_opt = nullptr;
    CLI::Option* trials_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* law_opt = nullptr;
    CLI::Option* interval_opt = nullptr;
    CLI::Option* source_opt = nullptr;
    CLI::Option* workers_opt = nullptr;
    CLI::Option* out_opt = nullptr;
    CLI::Option* cutoff_opt = nullptr;
};

void add_common(CLI::App* sub, Flags& f)
{
    f.n_opt = sub->add_option("--n", f.n, "polynomial degree");
    f.trials_opt = sub->add_option("--trials", f.trials, "number of trials");
    f.seed_opt = sub->add_option("--seed", f.seed, "base seed (default CP_SEED)");
    f.law_opt = sub->add_option("--law", f.law, "coefficient law")
                    ->check(CLI::IsMember({"gaussian", "rademacher"}));
    f.interval_opt =
        sub->add_option("--interval", f.intervals, "window lo,hi (repeatable)")
            ->allow_extra_args(false);
    f.source_opt = sub->add_option("--source", f.source, "count source")
                       ->check(CLI::IsMember({"nu", "mu"}));
    f.workers_opt = sub->add_option("--workers", f.workers, "worker threads");
    f.out_opt = sub->add_option("--out", f.out, "output path prefix");
    f.cutoff_opt = sub->add_option("--cutoff-mult", f.cutoff_mult,
                                   "multiplier of the pair cutoff");
    sub->add_option("--config", f.config, "key=value config file");
}

// Config file first, then every flag given on the command line.
trials::RunConfig build_config(Flags const& f)
{
    trials::RunConfig cfg;
    cfg.base_seed = trials::default_base_seed();
    if (!f.config.empty())
    {
        std::ifstream in(f.config);
        if (!in)
            throw std::invalid_argument("cannot read config file " + f.config);
        std::stringstream buf;
        buf << in.rdbuf();
        trials::apply_config_text(cfg, buf.str());
    }
    if (f.n_opt->count() > 0)
        cfg.n = f.n;
    if (f.trials_opt->count() > 0)
        cfg.trials = f.trials;
    if (f.seed_opt->count() > 0)
        cfg.base_seed = f.seed;
    if (f.law_opt->count() > 0)
        cfg.law = gpoly::parse_law(f.law);
    if (f.interval_opt->count() > 0)
    {
        cfg.windows.clear();
        for (auto const& s : f.intervals)
            cfg.windows.push_back(parse_interval(s));
    }
    if (f.source_opt->count() > 0)
        cfg.source = trials::parse_source(f.source);
    if (f.workers_opt->count() > 0)
        cfg.workers = f.workers;
    if (f.out_opt->count() > 0)
        cfg.output_path = f.out;
    if (f.cutoff_opt->count() > 0)
        cfg.cutoff_multiplier = f.cutoff_mult;
    trials::validate(cfg);
    return cfg;
}

json double_or_null(double v)
{
    if (std::isfinite(v))
        return v;
    return nullptr;
}

void write_file(std::string const& path, std::string const& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << text;
}

// Summary to stdout, and with --out also <out>.summary.json, <out>.jsonl.
int emit(trials::RunConfig const& cfg, std::string const& subcommand,
         json statistics, json pass_flags,
         std::vector<stats::TrialRecord> const* records = nullptr)
{
    json summary;
    summary["subcommand"] = subcommand;
    summary["config"] = trials::config_json(cfg);
    summary["statistics"] = std::move(statistics);
    summary["pass_flags"] = std::move(pass_flags);
    int failures = 0;
    if (records != nullptr)
    {
        for (auto const& r : *records)
            failures += r.ok ? 0 : 1;
        summary["failed_trials"] = failures;
    }
    std::string const text = summary.dump(2) + "\n";
    std::cout << text;
    if (!cfg.output_path.empty())
    {
        write_file(cfg.output_path + ".summary.json", text);
        if (records != nullptr)
        {
            std::ostringstream os;
            trials::write_jsonl(os, *records);
            write_file(cfg.output_path + ".jsonl", os.str());
        }
    }
    if (failures > 0)
    {
        std::cerr << failures << " trial(s) failed\n";
        return 2;
    }
    return 0;
}

void emit_histogram(trials::RunConfig const& cfg, std::vector<double> const& v,
                    double lo, double hi, int bins)
{
    if (cfg.output_path.empty())
        return;
    std::ostringstream os;
    trials::write_histogram_csv(os, v, lo, hi, bins);
    write_file(cfg.output_path + ".hist.csv", os.str());
}

int run_sample(trials::RunConfig const& cfg)
{
    auto const f = gpoly::sample_polynomial(cfg.n, cfg.base_seed, cfg.law);
    json stats_j;
    stats_j["coefficients"] = f.coeffs();
    json roots_j = json::array();
    auto const rs = roots::find_all_roots(f);
    for (auto const& z : rs.roots)
        roots_j.push_back({z.real(), z.imag()});
    stats_j["roots"] = roots_j;
    stats_j["roots_converged"] = rs.converged;
    json pass;
    pass["roots_converged"] = rs.converged;
    if (cfg.n >= 1)
    {
        int m = 8 * (cfg.n + 1);
        auto const grid = gpoly::eval_circle_grid(f, m);
        for (auto [name, target] : {std::pair{"x_zeros", roots::Target::X},
                                    std::pair{"y_zeros", roots::Target::Y}})
        {
            try
            {
                stats_j[name] = roots::trig_zeros(grid, target, cfg.n).zeros;
            }
            catch (std::domain_error const&)
            {
                stats_j[name] = nullptr;
            }
        }
    }
    return emit(cfg, "sample", stats_j, pass);
}

int run_verify_exp(trials::RunConfig cfg)
{
    auto const records = trials::run_trials(cfg);
    auto const ok = trials::successful(records);
    std::vector<double> mins;
    stats::RunningStats rs;
    for (auto const& r : ok)
    {
        if (std::isfinite(r.min_scaled))
        {
            mins.push_back(r.min_scaled);
            rs.add(r.min_scaled);
        }
    }
    json s;
    s["samples"] = mins.size();
    s["mean"] = double_or_null(rs.count() > 0 ? rs.mean() : NAN);
    s["std_error"] = double_or_null(rs.std_error());
    double ks = NAN;
    if (!mins.empty())
        ks = stats::ks_statistic(mins, [](double t) { return stats::exp_cdf(t, 6.0); });
    s["ks_statistic"] = double_or_null(ks);
    json pass;
    pass["mean_in_5.5_6.5"] = rs.count() > 0 && rs.mean() >= 5.5 && rs.mean() <= 6.5;
    pass["ks_le_0.05"] = ks <= 0.05;
    emit_histogram(cfg, mins, 0.0, 30.0, 60);
    return emit(cfg, "verify-exp", s, pass, &records);
}

int run_verify_poisson(trials::RunConfig cfg, bool source_given)
{
    if (cfg.windows.empty())
        cfg.windows = {{0.0, 12.0}, {-6.0, 6.0}, {0.0, 24.0}, {-6.0, 0.0}, {0.0, 6.0}};
    if (!source_given)
        cfg.source = cfg.n <= 1000 ? trials::Source::nu : trials::Source::mu;
    auto const records = trials::run_trials(cfg);
    auto const ok = trials::successful(records);
    json s;
    json pass;
    if (ok.size() >= 500)
    {
        auto const report = stats::poisson_window_test(ok, cfg.windows);
        s["poisson"] = trials::report_json(report);
        pass["poisson"] = report.passed;
    }
    else
    {
        s["poisson"] = "need at least 500 successful trials";
        pass["poisson"] = false;
    }
    auto const args = stats::arg_uniformity_test(ok, {-10.0, 10.0}, 2.2);
    s["arg_uniformity"] = trials::report_json(args);
    pass["arg_uniformity"] = args.passed;
    std::vector<double> counts;
    for (auto const& r : ok)
        counts.push_back(static_cast<double>(r.window_counts.at(cfg.windows.front())));
    emit_histogram(cfg, counts, 0.0, 20.0, 20);
    return emit(cfg, "verify-poisson", s, pass, &records);
}

int run_pairing(trials::RunConfig cfg)
{
    trials::TrialPlan plan;
    plan.pairing = true;
    if (!cfg.windows.empty())
        plan.pairing_interval = cfg.windows.front();
    else
        cfg.windows = {plan.pairing_interval};
    auto const records = trials::run_trials(cfg, plan);
    auto const ok = trials::successful(records);
    long agreed = 0;
    long more_roots = 0;
    long more_pairs = 0;
    for (auto const& r : ok)
    {
        agreed += r.pairing_agreed ? 1 : 0;
        more_roots += r.pairing_nu > r.pairing_mu ? 1 : 0;
        more_pairs += r.pairing_mu > r.pairing_nu ? 1 : 0;
    }
    double const frac = ok.empty() ? NAN : static_cast<double>(agreed) / ok.size();
    json s;
    s["interval"] = to_string(plan.pairing_interval);
    s["trials"] = ok.size();
    s["agreement_fraction"] = double_or_null(frac);
    s["nu_exceeds_mu"] = more_roots;
    s["mu_exceeds_nu"] = more_pairs;
    json pass;
    pass["agreement_ge_0.90"] = frac >= 0.90;
    return emit(cfg, "pairing-check", s, pass, &records);
}

int run_kacrice(trials::RunConfig cfg)
{
    if (cfg.windows.empty())
        cfg.windows = {{0.0, 6.0}};
    json s;
    json pass;
    json mu = json::array();
    kacrice::MeanMuOptions mopts;
    mopts.cutoff_multiplier = cfg.cutoff_multiplier;
    for (auto const& w : cfg.windows)
    {
        double const v = kacrice::mean_mu_integral(cfg.n, {w}, mopts);
        json e;
        e["window"] = to_string(w);
        e["mean_mu"] = v;
        e["target"] = w.length() / 12.0;
        mu.push_back(e);
    }
    s["mean_mu_integral"] = mu;
    Interval const inner{0.5, kPi - 0.5};
    json counts;
    for (auto which : {kacrice::Field::X, kacrice::Field::Y})
    {
        double const c = kacrice::kacrice_zero_count(cfg.n, which, inner);
        double const full = c * kPi / inner.length();
        counts[kacrice::to_string(which)] = {{"interval", to_string(inner)},
                                             {"expected", c},
                                             {"full_extrapolation", full},
                                             {"n_over_sqrt3", cfg.n / std::sqrt(3.0)}};
        pass[kacrice::to_string(which) + "_within_10pct_of_n_over_sqrt3"] =
            std::abs(full / (cfg.n / std::sqrt(3.0)) - 1.0) <= 0.10;
    }
    s["zero_counts"] = counts;
    json table = json::array();
    double prev = NAN;
    for (int m : {cfg.n, 4 * cfg.n})
    {
        auto const k = experiments::kernel_error(m);
        table.push_back({{"n", m},
                         {"max_error", k.max_error},
                         {"x", k.x},
                         {"y", k.y},
                         {"entry", k.entry}});
        if (std::isfinite(prev))
            pass["kernel_error_ratio_le_0.75"] = k.max_error <= 0.75 * prev;
        prev = k.max_error;
    }
    s["kernel_error"] = table;
    return emit(cfg, "kacrice", s, pass);
}

int run_bounds(trials::RunConfig const& cfg, std::vector<int> const& sweep)
{
    json rows = json::array();
    std::vector<experiments::BoundsRow> all;
    for (int n : sweep)
    {
        auto const r = experiments::bounds_row(n);
        all.push_back(r);
        rows.push_back({{"n", n},
                        {"p1_sup_over_n2", r.p1_sup},
                        {"p2_sup_over_n4", r.p2_sup},
                        {"det1_ratio_min", r.det1_min},
                        {"det1_ratio_max", r.det1_max},
                        {"det2_ratio_min", r.det2_min},
                        {"det2_sweep_floor", r.det2_sweep_floor},
                        {"num1_ratio", r.num1_mean},
                        {"num2_ratio_separated", r.num2_separated},
                        {"num2_ratio_clustered", r.num2_clustered}});
    }
    auto spread = [&all](auto field) {
        double lo = kInfinity;
        double hi = 0.0;
        for (auto const& r : all)
        {
            lo = std::min(lo, r.*field);
            hi = std::max(hi, r.*field);
        }
        return hi / lo;
    };
    json s;
    s["rows"] = rows;
    json pass;
    if (!all.empty())
    {
        pass["p1_within_20pct"] = spread(&experiments::BoundsRow::p1_sup) <= 1.2 / 0.8;
        pass["p2_within_factor_2"] = spread(&experiments::BoundsRow::p2_sup) <= 2.0;
        pass["det2_within_factor_3"] = spread(&experiments::BoundsRow::det2_min) <= 3.0;
        pass["num2_within_factor_2"] =
            spread(&experiments::BoundsRow::num2_separated) <= 2.0;
    }
    return emit(cfg, "bounds", s, pass);
}

int run_limit_proc(trials::RunConfig const& cfg)
{
    auto const checks = experiments::limit_process_check(cfg.trials, cfg.base_seed);
    json rows = json::array();
    bool all = true;
    for (auto const& c : checks)
    {
        rows.push_back({{"name", c.name},
                        {"empirical", c.empirical},
                        {"expected", c.expected},
                        {"std_error", c.std_error},
                        {"passed", c.passed}});
        all = all && c.passed;
    }
    json s;
    s["seeds"] = cfg.trials;
    s["covariances"] = rows;
    json pass;
    pass["all_within_3_se"] = all;
    return emit(cfg, "limit-proc", s, pass);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"circlab: roots of random polynomials near the unit circle"};
    app.require_subcommand(1);
    std::vector<std::pair<std::string, CLI::App*>> subs;
    std::vector<Flags> per_sub;
    char const* names[][2] = {
        {"sample", "one draw: coefficients, roots, circle zeros"},
        {"verify-exp", "minimum scaled distance against Exp(mean 6)"},
        {"verify-poisson", "window counts, factorial moments, independence"},
        {"pairing-check", "agreement of root and zero-pair counts"},
        {"kacrice", "Kac-Rice integrals, zero counts, kernel errors"},
        {"bounds", "density, determinant and numerator monitors"},
        {"limit-proc", "spectral simulator covariance report"}};
    per_sub.resize(std::size(names));
    for (std::size_t i = 0; i < std::size(names); ++i)
    {
        auto* sub = app.add_subcommand(names[i][0], names[i][1]);
        add_common(sub, per_sub[i]);
        if (std::string(names[i][0]) == "bounds")
            sub->add_option("--sweep", per_sub[i].sweep, "degrees of the sweep");
        subs.emplace_back(names[i][0], sub);
    }
    CLI11_PARSE(app, argc, argv);

    try
    {
        for (std::size_t i = 0; i < subs.size(); ++i)
        {
            auto const& [name, sub] = subs[i];
            if (!sub->parsed())
                continue;
            Flags const& f = per_sub[i];
            trials::RunConfig cfg = build_config(f);
            if (name == "sample")
                return run_sample(cfg);
            if (name == "verify-exp")
                return run_verify_exp(cfg);
            if (name == "verify-poisson")
                return run_verify_poisson(cfg, f.source_opt->count() > 0);
            if (name == "pairing-check")
                return run_pairing(cfg);
            if (name == "kacrice")
                return run_kacrice(cfg);
            if (name == "bounds")
                return run_bounds(cfg, f.sweep);
            if (name == "limit-proc")
            {
                if (f.trials_opt->count() == 0)
                    cfg.trials = 10000;
                return run_limit_proc(cfg);
            }
        }
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
