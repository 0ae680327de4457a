#pragma once

#include <cstddef>
#include <vector>

namespace m2m {

/// Probability that exactly `h` of `m` users are resolved (pick a slot
/// nobody else picked) when each picks one of `l` slots uniformly.
/// Evaluated exactly in big-integer arithmetic and rounded once.
double resolve_prob(std::size_t h, std::size_t m, std::size_t l);

/// Full row R(0..min(m,l) | m, l).
std::vector<double> resolve_row(std::size_t m, std::size_t l);

/// Number of ways to drop `v` labelled users into `u` slots so that no
/// slot holds exactly one user. Returned as a double (may be inf).
double no_singleton_assignments(std::size_t u, std::size_t v);

/// Collision multiplicity distribution P_A(m) = Binom(omega, p; m) / F(2, omega, p)
/// for 2 <= m <= omega; index m, entries 0 and 1 are zero.
std::vector<double> truncated_active_dist(std::size_t omega, double p_a);

struct ResolutionProbs {
  double r1 = 0.0;  ///< collision resolved in the first frame
  double r2 = 0.0;  ///< collision resolved in the second frame
};

/// Two-frame resolution probabilities for a collided group of size `omega`.
ResolutionProbs resolution_probs(std::size_t omega, std::size_t l1, std::size_t l2, double p_a);

/// Expected common-pool RSs per collided preallocated RS:
/// L1 + L2 (1 - R1) + omega (1 - R1 - R2).
double expected_frame_cost(std::size_t omega, std::size_t l1, std::size_t l2, ResolutionProbs r);

}  // namespace m2m
