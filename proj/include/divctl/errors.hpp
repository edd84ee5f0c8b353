#pragma once

#include <stdexcept>

namespace divctl {

/// Adaptive quadrature failed to meet its tolerance within the depth limit.
struct quadrature_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A root finder or the tangency solver failed to converge.
struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace divctl
