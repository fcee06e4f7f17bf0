#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace eustab {

/// `digits` significant digits, ties away from zero, trailing zeros dropped.
/// Scientific notation outside [1e-5, 1e6).
inline std::string format_sig(double value, int digits = 6) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";

  // 17 significant digits pin the binary value; round that decimal string.
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", std::abs(value));
  std::string mant;
  for (const char* p = buf; *p && *p != 'e'; ++p)
    if (*p != '.') mant += *p;
  int exp10 = std::atoi(std::strchr(buf, 'e') + 1);

  std::string kept = mant.substr(0, digits);
  if (mant[digits] >= '5') {
    int i = digits - 1;
    while (i >= 0 && kept[i] == '9') kept[i--] = '0';
    if (i < 0) {
      kept.insert(kept.begin(), '1');
      kept.pop_back();
      ++exp10;
    } else {
      ++kept[i];
    }
  }
  while (kept.size() > 1 && kept.back() == '0') kept.pop_back();

  std::string out = value < 0 ? "-" : "";
  if (exp10 < -5 || exp10 >= 6) {
    out += kept[0];
    if (kept.size() > 1) out += "." + kept.substr(1);
    char e[16];
    std::snprintf(e, sizeof e, "e%+03d", exp10);
    out += e;
  } else if (exp10 < 0) {
    out += "0." + std::string(static_cast<std::size_t>(-exp10 - 1), '0') + kept;
  } else if (static_cast<int>(kept.size()) <= exp10 + 1) {
    out += kept + std::string(static_cast<std::size_t>(exp10 + 1 - static_cast<int>(kept.size())), '0');
  } else {
    out += kept.substr(0, exp10 + 1) + "." + kept.substr(exp10 + 1);
  }
  return out;
}

/// Parses back what format_sig produced.
inline double parse_sig(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

/// True when `value` prints as the same 6-significant-digit number as `printed`.
inline bool matches_printed(double value, const std::string& printed, int digits = 6) {
  return parse_sig(format_sig(value, digits)) == parse_sig(format_sig(parse_sig(printed), digits));
}

}  // namespace eustab
