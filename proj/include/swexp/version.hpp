#pragma once

namespace swexp {
inline constexpr const char* kLibraryVersion = "0.1.0";
// Bumped whenever a CSV column is added, removed or renamed.
inline constexpr int kCsvSchemaVersion = 1;
}  // namespace swexp
