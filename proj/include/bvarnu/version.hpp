#pragma once

namespace bvarnu {
inline constexpr const char* kVersion = "0.1.0";
}
