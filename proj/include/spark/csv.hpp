#pragma once

#include <string>

namespace spark {

// 17 significant digits, "." as the decimal separator regardless of the
// global locale.
std::string format_number(double value);

}  // namespace spark
