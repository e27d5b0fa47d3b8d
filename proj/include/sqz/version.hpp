#pragma once

namespace sqz {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sqz
