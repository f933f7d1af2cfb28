#pragma once

#include <string_view>

namespace adrev {

/// Warnings go to standard error unless silenced.
void warn(std::string_view message);
void set_warnings_enabled(bool enabled);

}  // namespace adrev
