#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

namespace dtnsim {

using NodeId = std::uint32_t;
using VertexId = std::uint32_t;
using InterfaceIndex = std::uint16_t;
using Bytes = std::uint64_t;
using Seconds = double;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
};

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Closed interval [min, max].
template <class T>
struct Range {
  T min{};
  T max{};

  bool contains(T v) const { return min <= v && v <= max; }
  friend bool operator==(const Range&, const Range&) = default;
};

/// Message identifiers are issued as `M<counter>` starting at M1.
struct MessageId {
  std::uint32_t value = 0;

  std::string str() const { return "M" + std::to_string(value); }
  friend auto operator<=>(const MessageId&, const MessageId&) = default;
};

}  // namespace dtnsim
