#pragma once

// The invariant suites behind `klab verify` and the acceptance binary. Each
// returns a CheckResult whose value is the worst observed error.

#include "klab/report.hpp"

#include <cstdint>
#include <random>

namespace klab {

CheckResult check_c_r(int r_max, double tol = 1e-8);
/// Push-forward of h^ against random constant Hermitian h of rank r.
CheckResult check_prop52(int r, int trials, std::uint64_t seed, double tol = 1e-9);
/// Psi_m = I and the Psi_{m-1} formula at random base points.
CheckResult check_psi_identities(const BergmanProblem& bp, int points, std::uint64_t seed,
                                 double tol_top = 1e-9, double tol_next = 1e-7);
/// rho direct vs rho via tr(lambda B~) at random (z, lambda).
CheckResult check_route(const BergmanProblem& bp, int k, int points, std::uint64_t seed, double tol);
/// int rho = N.
CheckResult check_rho_integral(const BergmanProblem& bp, int k, double tol = 1e-8);

/// A random direction (Phi, eta) meeting the A_{1,1} preconditions on CP^m
/// for the Hermitian-Einstein metric split_fs(m, {1,..,1}).
A11Input random_a11_direction(int m, int r, std::mt19937_64& rng);
/// a11_apply against Richardson finite differences of a1_formula.
CheckResult check_a11(int m, int r, int pairs, std::uint64_t seed, double tol = 1e-3);

/// Random base point with Gaussian coordinates.
CVec random_point(int dim, std::mt19937_64& rng);

}  // namespace klab
