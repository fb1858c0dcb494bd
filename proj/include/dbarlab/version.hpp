#pragma once

namespace dbarlab {
inline constexpr const char* kVersion = "0.1.0";
}
