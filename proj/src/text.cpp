#include "hawkes_ls/text.hpp"

#include <array>
#include <charconv>
#include <stdexcept>
#include <system_error>

namespace hawkes_ls {

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf.data(), end);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw std::invalid_argument("not a number: \"" + std::string(text) + "\"");
  return value;
}

}  // namespace hawkes_ls
