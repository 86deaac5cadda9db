#pragma once

namespace tmpred {

inline constexpr const char* kToolkitVersion = "0.1.0";

}  // namespace tmpred
