#pragma once

#include "hawkes/kernel.hpp"

namespace fixtures {

// Printed two- and three-term approximations of (1-t)/(1+t^2.5) on the ladder 0.5k.
inline hawkes::Kernel phi2() { return hawkes::Kernel::ladder({-1.16, 2.17}, 0.5); }
inline hawkes::Kernel phi3() { return hawkes::Kernel::ladder({-0.82, 0.58, 1.39}, 0.5); }

}  // namespace fixtures
