#pragma once

namespace heff {

inline constexpr const char* kVersion = "0.1.0";

}
