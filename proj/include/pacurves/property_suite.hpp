#pragma once

#include "pacurves/report.hpp"

#include <cstdint>

namespace pacurves {

/// Randomized transport checks on synthesized curves in every model kind:
/// unit length under the anti-torqued constraint, the parallel/zero-potential
/// equivalence in both directions, and law recovery by estimate_law.
/// Instances are drawn from a seeded generator, so a seed pins the whole run.
Report transport_property_suite(std::uint64_t seed, int count);

}  // namespace pacurves
