// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace circlab::quad
{

struct Rule
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

//! Gauss-Legendre rule on [a, b] by Golub-Welsch.
Rule gauss_legendre(int count, double a = -1.0, double b = 1.0);

//! Gauss-Hermite rule for the weight e^{-x^2} by Golub-Welsch.
Rule gauss_hermite(int count);

}  // namespace circlab::quad
