#pragma once

// Elementary Levy transformation in one coordinate direction, consuming one
// seed. For direction i with seed (xi, Omega) and pivot p = xi_i:
//
//   x'      = x - (Omega/p) X_i
//   X_i'    = d_i X_i - (d_i p / p) X_i
//   X_k'    = X_k - (xi_k / p) X_i
//   H_i'    = -Omega / p
//   H_k'    = H_k - beta_ik Omega / p
//   beta_ik'= d_i beta_ik - (d_i p / p) beta_ik
//   beta_ki'= -xi_k / p
//   beta_kl'= beta_kl - (xi_k / p) beta_il          (k, l != i, k != l)
//
// Remaining seeds transform by the X rules (they solve the same system),
// and their potentials propagate algebraically:
//
//   Omega^b' = Omega^b - (xi^b_i / p) Omega^a
//
// which satisfies d_k Omega^b' = xi^b_k' H_k' identically and introduces no
// new integration constants. The consumed seed is removed (its transform is
// identically zero).

#include <string>

#include "conet/net.hpp"

namespace conet {

// Applies the transformation above. Throws DomainError for a missing seed
// and SingularError when the pivot component xi_i is the zero expression.
NetState levy_step(const NetState& s, int direction, const std::string& seed_label);

} // namespace conet
