#pragma once

#include <string>

namespace cflow {

/// Shortest decimal that round-trips to the same double ("nan", "inf" and
/// "-inf" for non-finite values). Locale independent, so CSV output is
/// byte-stable.
std::string format_double(double x);

}  // namespace cflow
