#ifndef BIOSYNTH_VERSION_HPP
#define BIOSYNTH_VERSION_HPP

namespace biosynth {

inline constexpr const char* kVersion = "0.1.0";

}

#endif
