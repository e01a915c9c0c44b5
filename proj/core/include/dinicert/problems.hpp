#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dinicert/problem.hpp"

namespace dinicert {

/// A problem with its known optimum and multipliers, when there are any.
struct Instance {
  std::string name;
  ProblemSpec spec;
  std::optional<TailSeq> xhat;
  std::optional<MultiplierCertificate> cert;
  /// A direction w with sup_n D+f_n(xhat)(w) < 0.
  std::optional<TailSeq> slater_hint;
};

/// l-infinity problem with p(x) = limsup |x_n| and constraints
/// f_n = 2^-n x_n^2 + p(x) - x_0 - 2^-3n, truncated at M >= 2.
Instance example1(std::size_t M = 16);
/// example1 with the alternative certificate that puts weight 1/2 on f_inf.
MultiplierCertificate example1_half_weight_certificate(std::size_t M = 16);

/// R^(2N+2) problem with l2^2/l1 objective and N+1 affine constraints,
/// embedded as a sequence stationary from N+1.
Instance example2(std::size_t N = 0);

/// Positive-diagonal quadratic + l1 block + linear objective, m affine
/// constraints strictly satisfied at a sampled point, ball of radius 3.
/// m = 0 gives an unconstrained problem.
Instance random_convex_instance(std::uint64_t seed, std::size_t d, std::size_t m);

/// "example1:M=16", "example2:N=5", "random:seed=3,d=2,m=2". Missing keys
/// take the defaults above. Throws std::invalid_argument on a bad name.
Instance builtin(const std::string& name);

}  // namespace dinicert
