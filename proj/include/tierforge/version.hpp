#pragma once

namespace tierforge {

inline constexpr const char* kToolkitVersion = "0.1.0";

} // namespace tierforge
