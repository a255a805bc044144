#include "spark/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace spark {

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // fold -0
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                           std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

}  // namespace spark
