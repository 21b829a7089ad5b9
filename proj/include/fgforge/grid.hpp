// Periodic grid on the 3-torus [0, 2pi)^3 and real scalar fields on it.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "fgforge/errors.hpp"

namespace fgforge {

// n equispaced points per axis; x_i = 2*pi*i/n.
struct GridSpec {
  int n = 16;

  static GridSpec make(int n) {
    if (n < 8 || (n & (n - 1)) != 0) {
      throw ConstraintViolation("grid size must be a power of two >= 8, got " +
                                std::to_string(n));
    }
    return GridSpec{n};
  }

  std::size_t points() const {
    return static_cast<std::size_t>(n) * n * n;
  }
  double coord(int i) const { return 2.0 * M_PI * i / n; }
  bool operator==(const GridSpec&) const = default;
};

// Real scalar field sampled on a GridSpec, stored row-major with axis 1
// slowest: index = (i1*n + i2)*n + i3.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridSpec grid)
      : grid_(grid), data_(grid.points(), 0.0) {}
  static ScalarField constant(GridSpec grid, double v) {
    ScalarField f(grid);
    for (auto& x : f.data_) x = v;
    return f;
  }

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return data_.size(); }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  std::size_t idx(int i1, int i2, int i3) const {
    return (static_cast<std::size_t>(i1) * grid_.n + i2) * grid_.n + i3;
  }
  double& at(int i1, int i2, int i3) { return data_[idx(i1, i2, i3)]; }
  double at(int i1, int i2, int i3) const { return data_[idx(i1, i2, i3)]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double sup_norm() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }
  bool is_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  ScalarField& operator+=(const ScalarField& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  ScalarField& operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
  }
  ScalarField& operator*=(const ScalarField& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] *= o.data_[i];
    return *this;
  }
  friend ScalarField operator+(ScalarField a, const ScalarField& b) {
    a += b;
    return a;
  }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) {
    a -= b;
    return a;
  }
  friend ScalarField operator*(ScalarField a, const ScalarField& b) {
    a *= b;
    return a;
  }
  friend ScalarField operator*(double s, ScalarField a) {
    a *= s;
    return a;
  }

  // Hooks used by Series<V> and other generic code.
  static ScalarField zeros_like(const ScalarField& f) {
    return ScalarField(f.grid_);
  }
  void add_scaled(double s, const ScalarField& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * o.data_[i];
  }
  void scale(double s) { *this *= s; }
  void madd(const ScalarField& a, const ScalarField& b) {
    for (std::size_t i = 0; i < data_.size(); ++i)
      data_[i] += a.data_[i] * b.data_[i];
  }

 private:
  GridSpec grid_;
  std::vector<double> data_;
};

inline double sup_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Band-limited real data as an explicit mode list: amp_cos*cos(k.x) +
// amp_sin*sin(k.x). Resolution-independent, so the same object can be
// sampled on grids of different size for cross-resolution checks.
struct FourierMode {
  std::array<int, 3> k{0, 0, 0};
  double amp_cos = 0.0;
  double amp_sin = 0.0;
};

double eval_modes(std::span<const FourierMode> modes, double constant_part,
                  double x1, double x2, double x3);
ScalarField sample_modes(GridSpec grid, std::span<const FourierMode> modes,
                         double constant_part);

// Evaluates the exact x-derivative of a mode list along axis (1..3).
double eval_modes_deriv(std::span<const FourierMode> modes, int axis,
                        double x1, double x2, double x3);

// Spectral derivative along axis 1..3 (FFT, multiply by ik, inverse FFT;
// the Nyquist mode is zeroed). Exact for band-limited data.
ScalarField spectral_derivative(const ScalarField& f, int axis);

}  // namespace fgforge
