#pragma once

namespace assom {

inline constexpr const char* kArtifactVersion = "0.1.0";

} // namespace assom
