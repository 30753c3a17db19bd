#pragma once

// Internal text-serialization helpers shared by the embedding, checkpoint
// and classifier writers. Doubles are printed with 17 significant digits so
// every round trip is bitwise exact.

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>

#include "mswe/common.hpp"
#include "mswe/nn.hpp"

namespace mswe::detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& token, const std::string& context) {
  const char* begin = token.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw ConfigError(context + ": expected a number, got '" + token + "'");
  }
  return v;
}

class TokenReader {
 public:
  TokenReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  std::string next(const char* what) {
    std::string token;
    if (!(in_ >> token)) {
      throw ConfigError(source_ + ": unexpected end of file, expected " +
                        std::string(what));
    }
    return token;
  }

  void expect(const std::string& literal) {
    std::string token = next(literal.c_str());
    if (token != literal) {
      throw ConfigError(source_ + ": expected '" + literal + "', got '" + token + "'");
    }
  }

  double next_double(const char* what) { return parse_double(next(what), source_); }

  std::uint64_t next_u64(const char* what) {
    std::string token = next(what);
    char* end = nullptr;
    std::uint64_t v = std::strtoull(token.c_str(), &end, 10);
    if (end == token.c_str() || *end != '\0') {
      throw ConfigError(source_ + ": expected an integer for " + std::string(what) +
                        ", got '" + token + "'");
    }
    return v;
  }

  const std::string& source() const { return source_; }

 private:
  std::istream& in_;
  std::string source_;
};

inline void write_matrix(std::ostream& out, std::string_view name, const nn::Matrix& m) {
  out << "tensor " << name << ' ' << m.rows << ' ' << m.cols << '\n';
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (c) out << ' ';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

inline void write_vector(std::ostream& out, std::string_view name, const nn::Vector& v) {
  out << "tensor " << name << " 1 " << v.size() << '\n';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ' ';
    out << format_double(v[i]);
  }
  out << '\n';
}

inline nn::Matrix read_matrix(TokenReader& reader, std::string_view name) {
  reader.expect("tensor");
  reader.expect(std::string(name));
  auto rows = static_cast<std::size_t>(reader.next_u64("rows"));
  auto cols = static_cast<std::size_t>(reader.next_u64("cols"));
  nn::Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) {
    m.data[i] = reader.next_double("tensor value");
  }
  return m;
}

inline nn::Vector read_vector(TokenReader& reader, std::string_view name) {
  nn::Matrix m = read_matrix(reader, name);
  if (m.rows != 1) {
    throw ConfigError(reader.source() + ": tensor " + std::string(name) +
                      " should have one row");
  }
  return m.data;
}

}  // namespace mswe::detail
