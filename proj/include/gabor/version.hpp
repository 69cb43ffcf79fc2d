#pragma once

#define GABOR_TOOLKIT_VERSION_MAJOR 0
#define GABOR_TOOLKIT_VERSION_MINOR 1
#define GABOR_TOOLKIT_VERSION_PATCH 0
#define GABOR_TOOLKIT_VERSION "0.1.0"

namespace gabor {
inline const char* version() { return GABOR_TOOLKIT_VERSION; }
}  // namespace gabor
