#pragma once

namespace probmorph::tol {

// Invariant checks (row sums, round trips, reconstruction).
inline constexpr double kInvariant = 1e-12;

// User-facing equality of measures and kernels.
inline constexpr double kUser = 1e-9;

// A probability vector whose mass is off by less than this is renormalized;
// larger deviations are rejected.
inline constexpr double kRenormalize = 1e-9;

// Minimum eigenvalue accepted for a Gram matrix after symmetrization.
inline constexpr double kPsd = -1e-9;

// Radicands of MMD in [-kMmdClamp, 0) are clamped to zero.
inline constexpr double kMmdClamp = 1e-12;

}  // namespace probmorph::tol
