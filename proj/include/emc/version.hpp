#pragma once

#include <string_view>

namespace emc {

/// Version of the native core, also reported by the CLI and the Python module.
std::string_view version();

} // namespace emc
