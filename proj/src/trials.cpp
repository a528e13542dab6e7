// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#include "circlab/trials.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "circlab/parallel.hpp"
#include "circlab/process.hpp"
#include "circlab/roots.hpp"

namespace circlab::trials
{

std::string_view to_string(Source s)
{
    return s == Source::nu ? "nu" : "mu";
}

Source parse_source(std::string_view text)
{
    if (text == "nu")
        return Source::nu;
    if (text == "mu")
        return Source::mu;
    throw std::invalid_argument("unknown source: " + std::string(text));
}

std::uint64_t default_base_seed()
{
    char const* env = std::getenv("CP_SEED");
    if (env == nullptr || *env == '\0')
        return kDefaultSeed;
    char* end = nullptr;
    unsigned long long const v = std::strtoull(env, &end, 0);
    if (end == nullptr || *end != '\0')
        return kDefaultSeed;
    return v;
}

void validate(RunConfig const& cfg)
{
    if (cfg.n < 1)
        throw std::invalid_argument("n must be >= 1");
    if (cfg.trials < 1)
        throw std::invalid_argument("trials must be >= 1");
    if (cfg.workers < 1)
        throw std::invalid_argument("workers must be >= 1");
    if (!(cfg.cutoff_multiplier > 0.0))
        throw std::invalid_argument("cutoff multiplier must be positive");
    for (auto const& w : cfg.windows)
    {
        if (!(w.lo < w.hi))
            throw std::invalid_argument("interval " + to_string(w) +
                                        " is not well formed");
    }
}

namespace
{
std::string trim(std::string const& s)
{
    auto const b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    auto const e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void apply_config_text(RunConfig& cfg, std::string const& text)
{
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        auto const hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto const eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        std::string const key = trim(line.substr(0, eq));
        std::string const value = trim(line.substr(eq + 1));
        if (key == "n")
            cfg.n = std::stoi(value);
        else if (key == "trials")
            cfg.trials = std::stoi(value);
        else if (key == "seed")
            cfg.base_seed = std::stoull(value, nullptr, 0);
        else if (key == "law")
            cfg.law = gpoly::parse_law(value);
        else if (key == "interval")
            cfg.windows.push_back(parse_interval(value));
        else if (key == "source")
            cfg.source = parse_source(value);
        else if (key == "workers")
            cfg.workers = std::stoi(value);
        else if (key == "out")
            cfg.output_path = value;
        else if (key == "cutoff-mult")
            cfg.cutoff_multiplier = std::stod(value);
        else
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": unknown key " + key);
    }
}

namespace
{
roots::RootSet solve(gpoly::CoefficientVector const& f)
{
    roots::RootSet rs = roots::find_all_roots(f);
    if (!rs.converged)
        rs = roots::find_all_roots(f, roots::RootFinderOptions{}.tol, 20000);
    if (!rs.converged)
        throw std::runtime_error("root finder did not converge");
    return rs;
}

}  // namespace

stats::TrialRecord run_trial(RunConfig const& cfg, TrialPlan const& plan,
                             std::uint64_t index)
{
    stats::TrialRecord rec;
    rec.n = cfg.n;
    rec.index = index;
    rec.seed = trial_seed(cfg.base_seed, index);
    auto const f = gpoly::sample_polynomial(cfg.n, rec.seed, cfg.law);

    bool const want_nu = cfg.source == Source::nu || plan.pairing;
    bool const want_mu = cfg.source == Source::mu || plan.pairing;

    process::NuMeasure nu;
    if (want_nu)
        nu = process::nu_measure(solve(f), cfg.n);

    process::MuMeasure mu;
    if (want_mu)
    {
        auto const grid = gpoly::eval_circle_grid(f, 8 * (cfg.n + 1));
        auto const zx = roots::trig_zeros(grid, roots::Target::X, cfg.n);
        auto const zy = roots::trig_zeros(grid, roots::Target::Y, cfg.n);
        mu = process::mu_measure(zx, zy, cfg.n, cfg.cutoff_multiplier);
    }

    if (cfg.source == Source::nu)
    {
        for (auto const& w : cfg.windows)
            rec.window_counts[w] = static_cast<long>(nu.count(w));
        rec.min_scaled = process::min_scaled_distance(nu);
        for (auto const& p : nu.points)
        {
            if (std::abs(p.scaled_distance) < plan.arg_radius)
            {
                rec.args.push_back(p.arg);
                rec.arg_scaled.push_back(p.scaled_distance);
            }
        }
    }
    else
    {
        for (auto const& w : cfg.windows)
            rec.window_counts[w] = static_cast<long>(mu.count(w));
        for (auto const& p : mu.pairs)
        {
            rec.min_scaled = std::min(rec.min_scaled, std::abs(p.gamma));
            if (std::abs(p.gamma) < plan.arg_radius)
            {
                double const wx = p.dx * p.dx;
                double const wy = p.dy * p.dy;
                double const theta = wx + wy > 0.0
                                         ? (wx * p.x + wy * p.y) / (wx + wy)
                                         : 0.5 * (p.x + p.y);
                rec.args.push_back(theta);
                rec.arg_scaled.push_back(p.gamma);
            }
        }
    }

    if (plan.pairing)
    {
        auto const report = process::pairing_check(nu, mu, plan.pairing_interval);
        rec.pairing_agreed = report.agreed;
        rec.pairing_nu = report.nu_count;
        rec.pairing_mu = report.mu_count;
    }
    return rec;
}

std::vector<stats::TrialRecord> run_trials(RunConfig const& cfg,
                                           TrialPlan const& plan)
{
    validate(cfg);
    std::vector<stats::TrialRecord> out(static_cast<std::size_t>(cfg.trials));
    parallel_for(out.size(), cfg.workers, [&](std::size_t i) {
        try
        {
            out[i] = run_trial(cfg, plan, i);
        }
        catch (std::exception const& e)
        {
            stats::TrialRecord bad;
            bad.n = cfg.n;
            bad.index = i;
            bad.seed = trial_seed(cfg.base_seed, i);
            bad.ok = false;
            bad.error = e.what();
            out[i] = std::move(bad);
        }
    });
    return out;
}

std::vector<stats::TrialRecord> successful(
    std::vector<stats::TrialRecord> const& records)
{
    std::vector<stats::TrialRecord> out;
    out.reserve(records.size());
    for (auto const& r : records)
    {
        if (r.ok)
            out.push_back(r);
    }
    return out;
}

namespace
{
nlohmann::ordered_json finite_or_null(double v)
{
    if (std::isfinite(v))
        return v;
    return nullptr;
}

}  // namespace

nlohmann::ordered_json record_json(stats::TrialRecord const& r)
{
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["index"] = r.index;
    j["seed"] = r.seed;
    j["min_scaled"] = finite_or_null(r.min_scaled);
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    for (auto const& [w, c] : r.window_counts)
        counts[to_string(w)] = c;
    j["window_counts"] = counts;
    j["pairing_agreed"] = r.pairing_agreed;
    j["pairing_nu"] = r.pairing_nu;
    j["pairing_mu"] = r.pairing_mu;
    j["args"] = r.args;
    j["arg_scaled"] = r.arg_scaled;
    j["ok"] = r.ok;
    if (!r.ok)
        j["error"] = r.error;
    return j;
}

void write_jsonl(std::ostream& os,
                 std::vector<stats::TrialRecord> const& records)
{
    for (auto const& r : records)
        os << record_json(r).dump() << '\n';
}

nlohmann::ordered_json config_json(RunConfig const& cfg)
{
    nlohmann::ordered_json j;
    j["n"] = cfg.n;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.base_seed;
    j["law"] = std::string(gpoly::to_string(cfg.law));
    nlohmann::ordered_json windows = nlohmann::ordered_json::array();
    for (auto const& w : cfg.windows)
        windows.push_back(to_string(w));
    j["windows"] = windows;
    j["source"] = std::string(to_string(cfg.source));
    j["cutoff_multiplier"] = cfg.cutoff_multiplier;
    return j;
}

nlohmann::ordered_json report_json(stats::TestReport const& r)
{
    nlohmann::ordered_json j;
    j["statistic"] = finite_or_null(r.statistic);
    j["threshold"] = finite_or_null(r.threshold);
    j["passed"] = r.passed;
    j["sample_size"] = r.sample_size;
    j["notes"] = r.notes;
    nlohmann::ordered_json details = nlohmann::ordered_json::array();
    for (auto const& t : r.details)
    {
        nlohmann::ordered_json d;
        d["name"] = t.name;
        d["value"] = finite_or_null(t.value);
        d["target"] = t.target;
        d["tolerance"] = finite_or_null(t.tolerance);
        d["passed"] = t.passed;
        details.push_back(d);
    }
    j["details"] = details;
    return j;
}

void write_histogram_csv(std::ostream& os, std::vector<double> const& values,
                         double lo, double hi, int bins)
{
    if (bins < 1 || !(lo < hi))
        throw std::invalid_argument("histogram needs bins >= 1 and lo < hi");
    std::vector<long> counts(static_cast<std::size_t>(bins), 0);
    double const width = (hi - lo) / bins;
    for (double v : values)
    {
        if (!(v >= lo && v < hi))
            continue;
        auto b = static_cast<std::size_t>((v - lo) / width);
        counts[std::min<std::size_t>(b, counts.size() - 1)] += 1;
    }
    os << "lo,hi,count\n";
    char buf[96];
    for (int b = 0; b < bins; ++b)
    {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%ld\n", lo + b * width,
                      lo + (b + 1) * width, counts[static_cast<std::size_t>(b)]);
        os << buf;
    }
}

}  // namespace circlab::trials
