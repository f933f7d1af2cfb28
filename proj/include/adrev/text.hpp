#pragma once

#include <string>

namespace adrev {

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

}  // namespace adrev
