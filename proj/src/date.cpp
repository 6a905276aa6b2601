#include "xtreval/date.hpp"

#include <cctype>
#include <cstdio>

namespace xtreval {

CivilDate parse_date(const std::string& s) {
  auto fail = [&] { throw ConfigError("invalid date '" + s + "', expected YYYY-MM-DD"); };
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') fail();
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) fail();
  }
  CivilDate c;
  c.year = std::stoi(s.substr(0, 4));
  c.month = std::stoi(s.substr(5, 2));
  c.day = std::stoi(s.substr(8, 2));
  if (!valid_date(c)) fail();
  return c;
}

std::string format_date(const CivilDate& c) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", c.year, c.month, c.day);
  return buf;
}

}  // namespace xtreval
