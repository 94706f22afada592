#pragma once

#include <cstddef>

namespace stadium::oracle {

/// s-th positive zero (s >= 1) of the Bessel function J_m, bracketed by a fine scan
/// and polished by bisection.
double bessel_zero(unsigned m, std::size_t s);

/// Dirichlet eigenvalue j_{m,s}^2 / r^2 of a disk of radius r.
double disk_eigenvalue(unsigned m, std::size_t s, double r = 1.0);

}  // namespace stadium::oracle
