#pragma once

namespace relatron {

inline constexpr const char* kToolVersion = "0.1.0";

// Bumped on breaking changes to any emitted JSON layout. Loaders reject files
// whose major version differs.
inline constexpr int kFormatVersion = 1;

// Version of the ordered task-feature registry embedded in embedding files.
inline constexpr int kRegistryVersion = 1;

}  // namespace relatron
