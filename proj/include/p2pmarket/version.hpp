#pragma once

namespace p2pmarket {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace p2pmarket
