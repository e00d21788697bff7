#pragma once

namespace polqmem {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace polqmem
