#pragma once

#include <cstdint>

#include "loadcast/frame.hpp"

namespace loadcast {

// Produces a deterministic house-power frame at one-minute resolution,
// days x 1440 rows, following the house_power() schema. Temperature and
// humidity are smooth daily cycles plus noise; each device column is a
// seeded on/off process at a realistic wattage (exact zero when off), so the
// series is sparse the way device-level power data is. The target column is
// the exact row-wise sum of the six device columns.
//
// Identical (days, seed) always yields a bitwise-identical frame.
TimeSeriesFrame generate_synthetic(int days, std::uint64_t seed);

} // namespace loadcast
