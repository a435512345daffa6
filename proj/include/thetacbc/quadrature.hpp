#pragma once

#include <functional>
#include <vector>

namespace thetacbc {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes by Newton iteration on P_n; accurate to machine precision for n <= 1000.
GaussLegendreRule gauss_legendre(int num_nodes);

/// Integrate f over [a, b] with the given rule.
double integrate(const GaussLegendreRule& rule, double a, double b,
                 const std::function<double(double)>& f);

}  // namespace thetacbc
