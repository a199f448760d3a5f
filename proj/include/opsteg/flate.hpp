#pragma once

#include <string>
#include <string_view>

namespace opsteg::flate {

/// zlib-wrapped deflate (the /FlateDecode encoding). Throws Error(CorruptStream).
std::string inflate(std::string_view compressed);

std::string deflate(std::string_view plain);

}  // namespace opsteg::flate
