#pragma once
/* Single version string embedded in every report; constant so repeated
 * runs stay byte-identical. */

namespace fsforge {

inline constexpr const char* kVersion = "fsforge-0.1.0";

}  // namespace fsforge
