#pragma once

// Exact rational polygons: lower convex hulls, slope multisets, domination.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "abelnp/rational.hpp"

namespace abelnp {

struct Vertex {
  Rational x, y;
  bool operator==(const Vertex&) const = default;
};

class RationalPolygon {
 public:
  RationalPolygon() : v_{{Rational(0), Rational(0)}} {}
  explicit RationalPolygon(std::vector<Vertex> vertices) : v_(std::move(vertices)) {
    require(!v_.empty(), "polygon needs at least one vertex");
    merge_collinear();
    for (std::size_t i = 1; i < v_.size(); ++i) ensure(v_[i].x > v_[i - 1].x, "polygon x-coordinates must increase");
    for (std::size_t i = 2; i < v_.size(); ++i) ensure(slope(i - 1) <= slope(i), "polygon is not convex");
  }

  const std::vector<Vertex>& vertices() const { return v_; }
  Rational length() const { return v_.back().x - v_.front().x; }
  Vertex end() const { return v_.back(); }

  // Slope of the segment ending at vertex i.
  Rational slope(std::size_t i) const { return (v_[i].y - v_[i - 1].y) / (v_[i].x - v_[i - 1].x); }

  // Slopes with multiplicity; segment lengths must be integral.
  std::vector<Rational> slopes() const {
    std::vector<Rational> out;
    for (std::size_t i = 1; i < v_.size(); ++i) {
      Rational len = v_[i].x - v_[i - 1].x;
      ensure(len.denominator() == 1, "slope multiset needs integral segment lengths");
      for (std::int64_t k = 0; k < len.numerator(); ++k) out.push_back(slope(i));
    }
    return out;
  }

  // Piecewise-linear value; x must lie in the domain.
  Rational at(const Rational& x) const {
    ensure(x >= v_.front().x && x <= v_.back().x, "polygon evaluated outside its domain");
    for (std::size_t i = 1; i < v_.size(); ++i)
      if (x <= v_[i].x) return v_[i - 1].y + slope(i) * (x - v_[i - 1].x);
    return v_.back().y;
  }

  bool operator==(const RationalPolygon&) const = default;

 private:
  void merge_collinear() {
    std::vector<Vertex> out;
    for (const auto& v : v_) {
      while (out.size() >= 2) {
        const Vertex& a = out[out.size() - 2];
        const Vertex& b = out.back();
        if ((b.y - a.y) * (v.x - b.x) == (v.y - b.y) * (b.x - a.x)) {
          out.pop_back();
        } else {
          break;
        }
      }
      out.push_back(v);
    }
    v_ = std::move(out);
  }

  std::vector<Vertex> v_;
};

struct HullPoint {
  std::int64_t x;
  std::optional<Rational> y;  // nullopt marks +infinity
};

inline RationalPolygon lower_hull(const std::vector<HullPoint>& points) {
  require(!points.empty(), "lower_hull of an empty point set");
  std::vector<Vertex> pts;
  for (const auto& pt : points)
    if (pt.y) pts.push_back({Rational(pt.x), *pt.y});
  std::sort(pts.begin(), pts.end(), [](const Vertex& a, const Vertex& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  require(!pts.empty() && pts.front().x == Rational(0), "lower_hull needs a finite point at x = 0");
  std::vector<Vertex> hull;
  for (const auto& v : pts) {
    if (!hull.empty() && hull.back().x == v.x) continue;  // keep the lowest y per x
    while (hull.size() >= 2) {
      const Vertex& a = hull[hull.size() - 2];
      const Vertex& b = hull.back();
      // drop b when it lies on or above segment a-v
      if ((b.y - a.y) * (v.x - a.x) >= (v.y - a.y) * (b.x - a.x)) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(v);
  }
  return RationalPolygon(hull);
}

inline RationalPolygon from_slopes(std::vector<Rational> slopes) {
  std::sort(slopes.begin(), slopes.end());
  std::vector<Vertex> v{{Rational(0), Rational(0)}};
  for (const auto& s : slopes) v.push_back({v.back().x + 1, v.back().y + s});
  return RationalPolygon(v);
}

struct DominationReport {
  bool holds = true;
  Rational min_margin{0};
  Rational witness_x{0};
};

// P(x) >= H(x) on the common domain, checked at the vertices of both.
inline DominationReport lies_above(const RationalPolygon& P, const RationalPolygon& H) {
  std::vector<Rational> xs;
  const Rational hi = std::min(P.end().x, H.end().x);
  for (const auto& v : P.vertices())
    if (v.x <= hi) xs.push_back(v.x);
  for (const auto& v : H.vertices())
    if (v.x <= hi) xs.push_back(v.x);
  xs.push_back(hi);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  DominationReport r;
  bool first = true;
  for (const auto& x : xs) {
    Rational m = P.at(x) - H.at(x);
    if (first || m < r.min_margin) {
      r.min_margin = m;
      r.witness_x = x;
      first = false;
    }
  }
  r.holds = r.min_margin >= Rational(0);
  return r;
}

inline std::vector<Rational> dual_slopes(const RationalPolygon& P) {
  std::vector<Rational> out;
  for (const auto& s : P.slopes()) out.push_back(Rational(1) - s);
  std::sort(out.begin(), out.end());
  return out;
}

inline RationalPolygon truncate_below(const RationalPolygon& P, const Rational& r) {
  std::vector<Vertex> v{P.vertices().front()};
  for (std::size_t i = 1; i < P.vertices().size(); ++i) {
    if (P.slope(i) >= r) break;
    v.push_back(P.vertices()[i]);
  }
  return RationalPolygon(v);
}

inline std::vector<Rational> sorted(std::vector<Rational> s) {
  std::sort(s.begin(), s.end());
  return s;
}

inline std::string slopes_string(const std::vector<Rational>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? ", " : "") + to_string(s[i]);
  return out + "}";
}

inline nlohmann::json to_json(const RationalPolygon& P) {
  nlohmann::json vs = nlohmann::json::array();
  for (const auto& v : P.vertices())
    vs.push_back({v.x.numerator(), v.x.denominator(), v.y.numerator(), v.y.denominator()});
  nlohmann::json ss = nlohmann::json::array();
  for (std::size_t i = 1; i < P.vertices().size(); ++i) {
    Rational s = P.slope(i);
    Rational len = P.vertices()[i].x - P.vertices()[i - 1].x;
    nlohmann::json mult = len.denominator() == 1 ? nlohmann::json(len.numerator()) : nlohmann::json(to_string(len));
    ss.push_back({s.numerator(), s.denominator(), mult});
  }
  return {{"vertices", vs}, {"slopes", ss}};
}

inline RationalPolygon polygon_from_json(const nlohmann::json& j) {
  std::vector<Vertex> v;
  for (const auto& e : j.at("vertices"))
    v.push_back({Rational(e[0].get<std::int64_t>(), e[1].get<std::int64_t>()),
                 Rational(e[2].get<std::int64_t>(), e[3].get<std::int64_t>())});
  return RationalPolygon(v);
}

// Columns x_num x_den y_num y_den, one vertex per line.
inline std::string to_tsv(const RationalPolygon& P) {
  std::ostringstream os;
  os << "x_num\tx_den\ty_num\ty_den\n";
  for (const auto& v : P.vertices())
    os << v.x.numerator() << '\t' << v.x.denominator() << '\t' << v.y.numerator() << '\t' << v.y.denominator() << '\n';
  return os.str();
}

}  // namespace abelnp
