#pragma once

#include "types.hpp"

namespace softshape {

/// Coefficient of determination 1 - SS_res / SS_tot, pooled over every
/// feature column (single scalar). SS_tot uses per-column means. Returns 1
/// exactly when predicted equals observed; throws when the observed matrix
/// has zero total variance.
double r_squared(const Matrix& observed, const Matrix& predicted);

}  // namespace softshape
