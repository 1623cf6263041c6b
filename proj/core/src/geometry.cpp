#include "linkc/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <stdexcept>

namespace linkc {

namespace {

std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// Parses an unsigned real at text[pos], advancing pos.
bool read_real(const std::string& text, std::size_t& pos, double& out) {
  const std::size_t start = pos;
  const char* first = text.data() + pos;
  const char* last = text.data() + text.size();
  auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc{}) {
    pos = start;
    return false;
  }
  pos = static_cast<std::size_t>(res.ptr - text.data());
  return true;
}

}  // namespace

std::string format_complex(PlanePoint z) {
  const double re = z.real() == 0.0 ? 0.0 : z.real();
  const double im = z.imag() == 0.0 ? 0.0 : z.imag();
  if (im == 0.0) return shortest(re);
  std::string imag = shortest(im) + "i";
  if (re == 0.0) return imag;
  return shortest(re) + (im > 0 ? "+" : "") + imag;
}

std::string format_complex_rounded(PlanePoint z, int digits) {
  const double scale = std::max(std::abs(z.real()), std::abs(z.imag()));
  const double eps = scale * std::pow(10.0, -digits);
  auto part = [&](double x) {
    if (std::abs(x) <= eps || x == 0.0) return std::string("0");
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, digits);
    return std::string(buf, res.ptr);
  };
  const std::string re = part(z.real());
  std::string im = part(z.imag());
  if (im.front() != '-') im = "+" + im;
  return re + im + "i";
}

PlanePoint parse_complex(const std::string& raw) {
  std::string text;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) text.push_back(c);
  }
  if (text.empty()) throw std::invalid_argument("empty complex literal");

  std::size_t pos = 0;
  double re = 0.0, im = 0.0;

  auto read_term = [&](double& value, bool& imaginary) {
    bool negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      negative = text[pos] == '-';
      ++pos;
    }
    if (pos < text.size() && text[pos] == 'i') {
      ++pos;
      value = negative ? -1.0 : 1.0;
      imaginary = true;
      return;
    }
    double x = 0.0;
    const std::size_t digits = pos;
    if (digits < text.size() && (text[digits] == '+' || text[digits] == '-')) {
      throw std::invalid_argument("malformed complex literal: " + raw);
    }
    if (!read_real(text, pos, x)) {
      throw std::invalid_argument("malformed complex literal: " + raw);
    }
    value = negative ? -x : x;
    imaginary = pos < text.size() && text[pos] == 'i';
    if (imaginary) ++pos;
  };

  double v1 = 0.0;
  bool i1 = false;
  read_term(v1, i1);
  (i1 ? im : re) = v1;
  if (pos < text.size()) {
    if (i1 || (text[pos] != '+' && text[pos] != '-')) throw std::invalid_argument("malformed complex literal: " + raw);
    double v2 = 0.0;
    bool i2 = false;
    read_term(v2, i2);
    if (!i2) throw std::invalid_argument("malformed complex literal: " + raw);
    im = v2;
  }
  if (pos != text.size()) throw std::invalid_argument("malformed complex literal: " + raw);
  return {re, im};
}

}  // namespace linkc
