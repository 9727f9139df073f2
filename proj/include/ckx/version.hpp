#pragma once

namespace ckx {

inline constexpr const char* version_string = "0.1.0";
inline constexpr const char* db_magic = "CKDB1";

}  // namespace ckx
