#pragma once

// Character spec files: `key = value` lines where values are integers,
// identifiers, [lists] or { key = value, ... } maps.  '#' starts a comment.
//
//   p = 3
//   a = 1
//   n = 1
//   genus = 0
//   modulus = [0, 1]
//   wild = [[[[0], [1]], [[1]]]]
//   tame = { f = [[[0], [1]], [[1]]], gamma = 1 }
//   removed = [[0], inf]
//   seed = 6838255477289537758
//
// A field element is the list of its coordinates on 1, theta, ..., theta^{a-1};
// a bare integer k is shorthand for the prime-field constant k.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "abelnp/character.hpp"

namespace abelnp {

namespace detail {

class SpecParser {
 public:
  explicit SpecParser(std::string text) : s_(std::move(text)) {}

  nlohmann::json parse_document() {
    nlohmann::json doc = nlohmann::json::object();
    skip();
    while (pos_ < s_.size()) {
      std::string key = ident();
      expect('=');
      if (doc.contains(key)) fail("duplicate key '" + key + "'");
      doc[key] = value();
      skip();
    }
    return doc;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1 + static_cast<std::size_t>(std::count(s_.begin(), s_.begin() + static_cast<std::ptrdiff_t>(std::min(pos_, s_.size())), '\n'));
    throw InputError("spec parse error at line " + std::to_string(line) + ": " + what);
  }
  void skip() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else if (s_[pos_] == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string ident() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (start == pos_ || std::isdigit(static_cast<unsigned char>(s_[start]))) fail("expected a key");
    return s_.substr(start, pos_ - start);
  }
  nlohmann::json value() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '[') {
      ++pos_;
      nlohmann::json arr = nlohmann::json::array();
      if (peek(']')) {
        ++pos_;
        return arr;
      }
      for (;;) {
        arr.push_back(value());
        if (peek(',')) {
          ++pos_;
          continue;
        }
        expect(']');
        return arr;
      }
    }
    if (c == '{') {
      ++pos_;
      nlohmann::json obj = nlohmann::json::object();
      if (peek('}')) {
        ++pos_;
        return obj;
      }
      for (;;) {
        std::string key = ident();
        expect('=');
        obj[key] = value();
        if (peek(',')) {
          ++pos_;
          continue;
        }
        expect('}');
        return obj;
      }
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_++;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string tok = s_.substr(start, pos_ - start);
      if (tok == "-") fail("dangling '-'");
      try {
        if (tok[0] == '-') return nlohmann::json(std::stoll(tok));
        return nlohmann::json(std::stoull(tok));
      } catch (const std::exception&) {
        fail("integer out of range: " + tok);
      }
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return nlohmann::json(ident());
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string s_;
  std::size_t pos_ = 0;
};

inline std::int64_t as_int(const nlohmann::json& j, const std::string& what) {
  if (!j.is_number_integer()) throw InputError(what + " must be an integer");
  if (j.is_number_unsigned()) return static_cast<std::int64_t>(j.get<std::uint64_t>());
  return j.get<std::int64_t>();
}

inline Fq parse_element(const nlohmann::json& j, const FieldDesc& fd) {
  if (j.is_number_integer()) return static_cast<Fq>(modp::reduce(as_int(j, "field element"), fd.p));
  if (!j.is_array()) throw InputError("field element must be an integer or a coefficient list");
  if (j.size() > fd.m) throw InputError("field element has more than a = " + std::to_string(fd.m) + " coordinates");
  std::uint64_t idx = 0;
  for (std::size_t i = j.size(); i-- > 0;) idx = idx * fd.p + modp::reduce(as_int(j[i], "field coordinate"), fd.p);
  return static_cast<Fq>(idx);
}

inline FqPoly parse_poly(const nlohmann::json& j, const FieldDesc& fd) {
  if (!j.is_array()) throw InputError("polynomial must be a list of field elements");
  FqPoly r;
  for (const auto& e : j) r.push_back(parse_element(e, fd));
  fq::trim(r);
  return r;
}

inline RationalFunction parse_rf(const nlohmann::json& j, const FieldDesc& fd) {
  if (!j.is_array() || j.empty() || j.size() > 2) throw InputError("rational function must be [numerator, denominator]");
  RationalFunction r{parse_poly(j[0], fd), j.size() == 2 ? parse_poly(j[1], fd) : FqPoly{1}};
  if (r.den.empty()) throw InputError("rational function has a zero denominator");
  return r;
}

inline std::string element_string(Fq v, const FieldDesc& fd) {
  std::string s = "[";
  for (std::uint32_t i = 0; i < fd.m; ++i) {
    s += (i ? ", " : "") + std::to_string(v % fd.p);
    v /= fd.p;
  }
  return s + "]";
}

inline std::string poly_string(const FqPoly& a, const FieldDesc& fd) {
  std::string s = "[";
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? ", " : "") + element_string(a[i], fd);
  return s + "]";
}

inline std::string rf_string(const RationalFunction& r, const FieldDesc& fd) {
  return "[" + poly_string(r.num, fd) + ", " + poly_string(r.den, fd) + "]";
}

}  // namespace detail

inline CharacterSpec parse_spec(const std::string& text) {
  nlohmann::json doc = detail::SpecParser(text).parse_document();
  static const std::vector<std::string> known{"p", "a", "n", "genus", "modulus", "wild", "tame", "removed", "seed"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) throw InputError("unknown spec key '" + it.key() + "'");
  for (const char* k : {"p", "a", "n"})
    if (!doc.contains(k)) throw InputError(std::string("spec is missing required key '") + k + "'");
  CharacterSpec spec;
  const std::int64_t p = detail::as_int(doc["p"], "p");
  const std::int64_t a = detail::as_int(doc["a"], "a");
  const std::int64_t n = detail::as_int(doc["n"], "n");
  require(p >= 3 && p < 65536 && is_prime(static_cast<std::uint64_t>(p)), "p must be an odd prime");
  require(a >= 1 && a <= 20, "a must be in [1, 20]");
  require(n >= 1 && n <= static_cast<std::int64_t>(kMaxWittLength), "n must be in [1, 3]");
  spec.n = static_cast<unsigned>(n);
  if (doc.contains("seed")) spec.seed = static_cast<std::uint64_t>(detail::as_int(doc["seed"], "seed"));
  if (doc.contains("genus")) {
    std::int64_t g = detail::as_int(doc["genus"], "genus");
    require(g >= 0, "genus must be nonnegative");
    spec.genus = static_cast<unsigned>(g);
  }
  if (doc.contains("modulus")) {
    std::vector<std::uint32_t> mod;
    if (!doc["modulus"].is_array()) throw InputError("modulus must be a coefficient list");
    for (const auto& c : doc["modulus"]) mod.push_back(static_cast<std::uint32_t>(modp::reduce(detail::as_int(c, "modulus coefficient"), static_cast<std::uint64_t>(p))));
    spec.field = FieldDesc::from_modulus(static_cast<std::uint32_t>(p), mod);
    require(spec.field.m == static_cast<std::uint32_t>(a), "modulus degree does not match a");
  } else if (a == 1) {
    spec.field = FieldDesc::prime(static_cast<std::uint32_t>(p));
  } else {
    spec.field = FieldDesc::generate(static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(a), spec.seed);
  }
  Field F(spec.field);
  if (doc.contains("wild")) {
    const auto& w = doc["wild"];
    if (!w.is_array() || w.size() != static_cast<std::size_t>(n)) throw InputError("wild must list exactly n Witt coordinates");
    for (const auto& r : w) spec.wild.push_back(fq::normalize(F, detail::parse_rf(r, spec.field)));
  } else {
    spec.wild.assign(spec.n, fq::rf_constant(0));
  }
  if (doc.contains("tame")) {
    const auto& t = doc["tame"];
    if (!(t.is_string() && t.get<std::string>() == "none")) {
      if (!t.is_object() || !t.contains("f") || !t.contains("gamma")) throw InputError("tame must be { f = [num, den], gamma = int } or none");
      TamePart tp;
      tp.f = detail::parse_rf(t["f"], spec.field);
      require(!tp.f.num.empty(), "tame function f must be nonzero");
      tp.f = fq::normalize(F, tp.f);
      tp.gamma = modp::reduce(detail::as_int(t["gamma"], "gamma"), spec.q() - 1);
      spec.tame = tp;
    }
  }
  if (doc.contains("removed")) {
    if (!doc["removed"].is_array()) throw InputError("removed must be a list of points");
    for (const auto& e : doc["removed"]) {
      if (e.is_string()) {
        require(e.get<std::string>() == "inf", "a point is a field element or inf");
        spec.extra_removed.push_back(Point::infinity());
      } else {
        spec.extra_removed.push_back(Point::at(detail::parse_element(e, spec.field)));
      }
    }
    std::sort(spec.extra_removed.begin(), spec.extra_removed.end());
    spec.extra_removed.erase(std::unique(spec.extra_removed.begin(), spec.extra_removed.end()), spec.extra_removed.end());
  }
  return spec;
}

inline std::string serialize_spec(const CharacterSpec& spec) {
  const FieldDesc& fd = spec.field;
  std::ostringstream os;
  os << "p = " << fd.p << "\n";
  os << "a = " << fd.m << "\n";
  os << "n = " << spec.n << "\n";
  os << "genus = " << spec.genus << "\n";
  os << "modulus = [";
  for (std::size_t i = 0; i < fd.modulus.size(); ++i) os << (i ? ", " : "") << fd.modulus[i];
  os << "]\n";
  os << "wild = [";
  for (std::size_t i = 0; i < spec.wild.size(); ++i) os << (i ? ", " : "") << detail::rf_string(spec.wild[i], fd);
  os << "]\n";
  if (spec.tame) {
    os << "tame = { f = " << detail::rf_string(spec.tame->f, fd) << ", gamma = " << spec.tame->gamma << " }\n";
  } else {
    os << "tame = none\n";
  }
  if (!spec.extra_removed.empty()) {
    os << "removed = [";
    for (std::size_t i = 0; i < spec.extra_removed.size(); ++i) {
      const Point& P = spec.extra_removed[i];
      os << (i ? ", " : "") << (P.infinite ? std::string("inf") : detail::element_string(P.x, fd));
    }
    os << "]\n";
  }
  os << "seed = " << spec.seed << "\n";
  return os.str();
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string spec_hash(const CharacterSpec& spec) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(serialize_spec(spec));
  return os.str();
}

inline CharacterSpec read_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open spec file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

}  // namespace abelnp
