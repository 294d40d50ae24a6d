#include "fermion/complex_parse.hpp"

#include <charconv>
#include <cmath>

#include "fermion/error.hpp"
#include "fermion/serialization.hpp"

namespace fermion::cli {

namespace {

double parse_real(const std::string& s, const std::string& whole) {
  if (s.empty() || s == "+") return 1.0;
  if (s == "-") return -1.0;
  const char* first = s.data() + (s.front() == '+' ? 1 : 0);
  const char* last = s.data() + s.size();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) throw DomainError("cannot parse complex number '" + whole + "'");
  return v;
}

}  // namespace

specfun::cplx parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != ' ') s += c;
  if (s.empty()) throw DomainError("empty complex number");
  if (s.back() != 'i') {
    if (s.find('i') != std::string::npos || s == "+" || s == "-")
      throw DomainError("cannot parse complex number '" + text + "'");
    return {parse_real(s, text), 0.0};
  }
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, parse_real(s, text)};
  const std::string re = s.substr(0, split);
  if (re == "+" || re == "-") throw DomainError("cannot parse complex number '" + text + "'");
  return {parse_real(re, text), parse_real(s.substr(split), text)};
}

std::string format_complex(specfun::cplx z) {
  const double im = z.imag();
  return serialization::format_double(z.real()) + (std::signbit(im) ? "-" : "+") +
         serialization::format_double(std::abs(im)) + "i";
}

}  // namespace fermion::cli
