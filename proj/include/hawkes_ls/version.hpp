#pragma once

namespace hawkes_ls {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hawkes_ls
