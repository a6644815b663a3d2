#pragma once

namespace nlpesim {

inline constexpr const char* version_string = "0.1.0";

} // namespace nlpesim
