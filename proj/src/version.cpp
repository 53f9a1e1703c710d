#include "emc/version.hpp"

namespace emc {

std::string_view version()
{
    return EMC_VERSION;
}

} // namespace emc
