#pragma once

namespace ctbn {

inline constexpr const char* kVersion = "0.1.0";

} // namespace ctbn
