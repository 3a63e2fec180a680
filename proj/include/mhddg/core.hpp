#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mhddg {

inline constexpr int kNumVars = 9;

// Conserved state: rho, rho*v (3), rho*E, B (3), psi.
using State = std::array<double, kNumVars>;
using Vec3 = std::array<double, 3>;

inline State operator+(const State &a, const State &b) {
  State r;
  for (int c = 0; c < kNumVars; ++c) r[c] = a[c] + b[c];
  return r;
}
inline State operator-(const State &a, const State &b) {
  State r;
  for (int c = 0; c < kNumVars; ++c) r[c] = a[c] - b[c];
  return r;
}
inline State operator*(double s, const State &a) {
  State r;
  for (int c = 0; c < kNumVars; ++c) r[c] = s * a[c];
  return r;
}
inline State &operator+=(State &a, const State &b) {
  for (int c = 0; c < kNumVars; ++c) a[c] += b[c];
  return a;
}
inline State &operator-=(State &a, const State &b) {
  for (int c = 0; c < kNumVars; ++c) a[c] -= b[c];
  return a;
}
inline double dot(const State &a, const State &b) {
  double s = 0;
  for (int c = 0; c < kNumVars; ++c) s += a[c] * b[c];
  return s;
}

inline double dot(const Vec3 &a, const Vec3 &b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Vec3 &a) { return std::sqrt(dot(a, a)); }
inline Vec3 operator+(const Vec3 &a, const Vec3 &b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3 &a, const Vec3 &b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3 &a) {
  return {s * a[0], s * a[1], s * a[2]};
}

// Dense row-major matrix, sized for small operator blocks.
struct Matrix {
  int rows = 0, cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  double &operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  Matrix transposed() const {
    Matrix t(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InadmissibleState : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mhddg
