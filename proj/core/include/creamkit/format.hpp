#pragma once

// Number rendering used by every text artifact, so golden files stay stable.

#include <string>

namespace creamkit {

/// Shortest text that reads back to the same double ("0.07", "5e-05").
std::string format_shortest(double v);

/// Shortest round-trip digits in plain positional notation, always with a
/// fractional part ("0.00005", "1.0").
std::string format_decimal(double v);

/// Scientific notation with seven significant digits ("7.000000e-02").
std::string format_scientific(double v);

/// "[lower, upper]" in plain positional notation.
std::string format_interval(double lower, double upper);

}  // namespace creamkit
