#pragma once

namespace ioncav {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace ioncav
