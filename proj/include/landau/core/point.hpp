#pragma once

#include <array>
#include <cmath>

namespace landau {

/// Velocity vector in R^d for d <= 3. Components past the active dimension
/// are kept at zero, so norms and projections need no dimension argument.
using Point = std::array<double, 3>;

constexpr int kMaxDim = 3;

inline Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Point operator-(const Point& a) { return {-a[0], -a[1], -a[2]}; }
inline Point operator*(double s, const Point& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Point& operator+=(Point& a, const Point& b) {
  a[0] += b[0];
  a[1] += b[1];
  a[2] += b[2];
  return a;
}
inline Point& operator-=(Point& a, const Point& b) {
  a[0] -= b[0];
  a[1] -= b[1];
  a[2] -= b[2];
  return a;
}

inline double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm2(const Point& a) { return dot(a, a); }
inline double norm(const Point& a) { return std::sqrt(norm2(a)); }

inline Point cross(const Point& a, const Point& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Japanese bracket <v> = sqrt(1 + |v|^2).
inline double bracket(const Point& v) { return std::sqrt(1.0 + norm2(v)); }

/// Pi[z] y = y - (z.y / |z|^2) z, the projection of y onto the orthogonal complement of z.
/// Caller guarantees z != 0.
inline Point project_orthogonal(const Point& z, const Point& y) {
  return y - (dot(z, y) / norm2(z)) * z;
}

}  // namespace landau
