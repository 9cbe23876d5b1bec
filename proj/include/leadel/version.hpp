#pragma once

namespace leadel {

inline constexpr const char* kVersion = "0.1.0";

}
