// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#include "circlab/types.hpp"

#include <sstream>

namespace circlab
{

std::string to_string(Interval const& iv)
{
    std::ostringstream os;
    os.precision(17);
    os << iv.lo << ',' << iv.hi;
    return os.str();
}

Interval parse_interval(std::string const& text)
{
    auto const comma = text.find(',');
    if (comma == std::string::npos)
        throw std::invalid_argument("interval must be 'lo,hi': " + text);
    Interval iv;
    try
    {
        iv.lo = std::stod(text.substr(0, comma));
        iv.hi = std::stod(text.substr(comma + 1));
    }
    catch (std::exception const&)
    {
        throw std::invalid_argument("interval must be 'lo,hi': " + text);
    }
    if (!(iv.lo < iv.hi))
        throw std::invalid_argument("interval needs lo < hi: " + text);
    return iv;
}

}  // namespace circlab

