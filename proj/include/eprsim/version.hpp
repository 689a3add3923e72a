#pragma once

namespace eprsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace eprsim
