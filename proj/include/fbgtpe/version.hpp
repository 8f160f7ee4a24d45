#pragma once

namespace fbgtpe {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fbgtpe
