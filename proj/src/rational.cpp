#include "rsg/rational.hpp"

#include <cctype>

namespace rsg {

std::string rational_to_string(const Rational& q) {
  std::string s = numerator(q).str();
  if (denominator(q) != 1) {
    s += '/';
    s += denominator(q).str();
  }
  return s;
}

std::optional<Rational> parse_rational(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto is_int = [](const std::string& t) {
    size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    return true;
  };
  size_t slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      if (!is_int(text)) return std::nullopt;
      return Rational(BigInt(text));
    }
    std::string num = text.substr(0, slash);
    std::string den = text.substr(slash + 1);
    if (!is_int(num) || !is_int(den)) return std::nullopt;
    BigInt d(den);
    if (d <= 0) return std::nullopt;
    return Rational(BigInt(num), d);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace rsg
