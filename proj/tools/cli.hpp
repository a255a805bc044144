#pragma once

#include <iosfwd>

namespace spark::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

// Environment variable naming the output directory when --out is absent.
inline constexpr const char* kOutDirEnv = "SPARK_OUT_DIR";

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spark::cli
