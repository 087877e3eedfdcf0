#ifndef ABL_VERSION_HPP
#define ABL_VERSION_HPP

namespace abl {
inline constexpr const char* kVersion = "abl 1.0.0";
}

#endif
