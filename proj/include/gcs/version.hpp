#pragma once

namespace gcs {
inline constexpr const char* kVersion = "0.1.0";
}
