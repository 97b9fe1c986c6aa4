#pragma once

namespace subcausal {
inline constexpr const char* kVersion = "0.1.0";
}
