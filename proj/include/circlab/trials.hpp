// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "circlab/gpoly.hpp"
#include "circlab/stats.hpp"
#include "circlab/types.hpp"

namespace circlab::trials
{

enum class Source
{
    nu,
    mu
};

std::string_view to_string(Source s);
Source parse_source(std::string_view text);

inline constexpr std::uint64_t kDefaultSeed = 0xC1C1AB5EEDull;

//! CP_SEED from the environment if set and numeric, else kDefaultSeed.
std::uint64_t default_base_seed();

struct RunConfig
{
    int n = 500;
    int trials = 100;
    std::uint64_t base_seed = kDefaultSeed;
    gpoly::Law law = gpoly::Law::gaussian;
    IntervalSet windows;
    Source source = Source::nu;
    int workers = 1;
    std::string output_path;
    double cutoff_multiplier = 1.0;
};

//! Throws std::invalid_argument naming the first violated constraint.
void validate(RunConfig const& cfg);

/*!
 * Apply key=value lines (keys as the long flags without dashes, '#'
 * comments) to cfg. Repeated "interval" keys accumulate.
 */
void apply_config_text(RunConfig& cfg, std::string const& text);

//! What each trial computes beyond the configured source.
struct TrialPlan
{
    bool pairing = false;
    Interval pairing_interval{0.0, 2.0};
    //! Annulus roots with |scaled distance| below this keep their arguments.
    double arg_radius = 24.0;
};

//! One trial: seed = trial_seed(base_seed, index).
stats::TrialRecord run_trial(RunConfig const& cfg, TrialPlan const& plan,
                             std::uint64_t index);

/*!
 * All trials on cfg.workers threads pulling indices from a shared counter.
 * Results are ordered by index. A failing trial yields a record with
 * ok = false and the exception message.
 */
std::vector<stats::TrialRecord> run_trials(RunConfig const& cfg,
                                           TrialPlan const& plan = {});

//! Trial records without failures.
std::vector<stats::TrialRecord> successful(
    std::vector<stats::TrialRecord> const& records);

//! One JSON object per line, fixed field order.
void write_jsonl(std::ostream& os,
                 std::vector<stats::TrialRecord> const& records);

nlohmann::ordered_json config_json(RunConfig const& cfg);
nlohmann::ordered_json record_json(stats::TrialRecord const& r);
nlohmann::ordered_json report_json(stats::TestReport const& r);

//! Histogram as "lo,hi,count" rows over equal bins on [lo, hi).
void write_histogram_csv(std::ostream& os, std::vector<double> const& values,
                         double lo, double hi, int bins);

}  // namespace circlab::trials
