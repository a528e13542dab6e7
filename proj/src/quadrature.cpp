// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#include "circlab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace circlab::quad
{
namespace
{
// Nodes and weights from the symmetric Jacobi matrix with zero diagonal and
// the given off-diagonal, for a weight of total mass mu0.
Rule golub_welsch(Eigen::VectorXd const& offdiag, double mu0)
{
    auto const count = offdiag.size() + 1;
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(count);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("tridiagonal eigensolve failed");
    Rule rule;
    rule.nodes.resize(count);
    rule.weights.resize(count);
    for (Eigen::Index i = 0; i < count; ++i)
    {
        rule.nodes[i] = solver.eigenvalues()[i];
        double const v = solver.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v * v;
    }
    return rule;
}

}  // namespace

Rule gauss_legendre(int count, double a, double b)
{
    if (count < 1)
        throw std::invalid_argument("rule needs at least one node");
    if (count == 1)
        return {{0.5 * (a + b)}, {b - a}};
    Eigen::VectorXd off(count - 1);
    for (int k = 1; k < count; ++k)
        off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
    Rule rule = golub_welsch(off, 2.0);
    double const half = 0.5 * (b - a);
    double const mid = 0.5 * (a + b);
    for (int i = 0; i < count; ++i)
    {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    return rule;
}

Rule gauss_hermite(int count)
{
    if (count < 1)
        throw std::invalid_argument("rule needs at least one node");
    if (count == 1)
        return {{0.0}, {std::sqrt(std::numbers::pi)}};
    Eigen::VectorXd off(count - 1);
    for (int k = 1; k < count; ++k)
        off[k - 1] = std::sqrt(0.5 * k);
    return golub_welsch(off, std::sqrt(std::numbers::pi));
}

}  // namespace circlab::quad
