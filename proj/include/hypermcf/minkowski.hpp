#pragma once
// Lorentzian linear algebra on R^{1,m} and the hyperboloid model of H^m(c).
//
// Points of H^m(c), c < 0, are the vectors with <X,X> = 1/c and x0 > 0 where
// <X,Y> = -x0*y0 + x1*y1 + ... + xm*ym. Every routine here is a pure function.

#include <cmath>
#include <initializer_list>
#include <string>

#include <Eigen/Core>

#include "hypermcf/errors.hpp"

namespace hypermcf {

/// Vector in Minkowski space R^{1,m}. Component 0 is the time component.
/// `Dim` is the total component count (m + 1) or Eigen::Dynamic.
template <int Dim = Eigen::Dynamic>
class BasicLorentzVector {
 public:
  using Storage = Eigen::Matrix<double, Dim, 1>;

  BasicLorentzVector() = default;
  explicit BasicLorentzVector(Storage coords) : coords_(std::move(coords)) { check_shape(); }
  BasicLorentzVector(std::initializer_list<double> values) {
    coords_.resize(static_cast<Eigen::Index>(values.size()));
    Eigen::Index k = 0;
    for (double v : values) coords_[k++] = v;
    check_shape();
  }

  static BasicLorentzVector zero(int spatial_dim) {
    Storage s(spatial_dim + 1);
    s.setZero();
    return BasicLorentzVector(std::move(s));
  }

  /// Base point (1/sqrt(-c), 0, ..., 0) of H^m(c).
  static BasicLorentzVector origin(int spatial_dim, double c) {
    Storage s(spatial_dim + 1);
    s.setZero();
    s[0] = 1.0 / std::sqrt(-c);
    return BasicLorentzVector(std::move(s));
  }

  [[nodiscard]] int spatial_dim() const { return static_cast<int>(coords_.size()) - 1; }
  [[nodiscard]] double time() const { return coords_[0]; }
  [[nodiscard]] double operator[](Eigen::Index k) const { return coords_[k]; }
  double& operator[](Eigen::Index k) { return coords_[k]; }
  [[nodiscard]] const Storage& coords() const { return coords_; }

  [[nodiscard]] bool is_finite() const { return coords_.allFinite(); }

  BasicLorentzVector& operator+=(const BasicLorentzVector& o) {
    check_same(o);
    coords_ += o.coords_;
    return *this;
  }
  BasicLorentzVector& operator-=(const BasicLorentzVector& o) {
    check_same(o);
    coords_ -= o.coords_;
    return *this;
  }
  BasicLorentzVector& operator*=(double s) {
    coords_ *= s;
    return *this;
  }

  friend BasicLorentzVector operator+(BasicLorentzVector a, const BasicLorentzVector& b) { return a += b; }
  friend BasicLorentzVector operator-(BasicLorentzVector a, const BasicLorentzVector& b) { return a -= b; }
  friend BasicLorentzVector operator*(double s, BasicLorentzVector a) { return a *= s; }
  friend BasicLorentzVector operator*(BasicLorentzVector a, double s) { return a *= s; }

  void check_same(const BasicLorentzVector& o) const {
    if (o.coords_.size() != coords_.size()) {
      throw ConfigError("Lorentz vector dimension mismatch: " + std::to_string(coords_.size()) + " vs " +
                        std::to_string(o.coords_.size()));
    }
  }

 private:
  void check_shape() const {
    if (coords_.size() < 3) throw ConfigError("Lorentz vector needs m >= 2 spatial components");
  }

  Storage coords_;
};

using LorentzVector = BasicLorentzVector<Eigen::Dynamic>;
using LorentzVector3 = BasicLorentzVector<3>;

template <int Dim>
[[nodiscard]] double lorentz_dot(const BasicLorentzVector<Dim>& x, const BasicLorentzVector<Dim>& y) {
  x.check_same(y);
  const auto& a = x.coords();
  const auto& b = y.coords();
  double s = -a[0] * b[0];
  for (Eigen::Index k = 1; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

/// Relative tolerance of the hyperboloid constraint <X,X> = 1/c.
inline constexpr double kHyperboloidTolerance = 1e-12;

/// Point of H^m(c) in the hyperboloid model. Construction validates the constraint.
template <int Dim = Eigen::Dynamic>
class BasicHyperboloidPoint {
 public:
  BasicHyperboloidPoint(BasicLorentzVector<Dim> v, double c) : v_(std::move(v)), c_(c) {
    if (!(c < 0.0)) throw ConfigError("hyperboloid curvature must be negative");
    const double residual = constraint_residual();
    if (!(residual < kHyperboloidTolerance)) {
      throw PreconditionError("point violates <X,X> = 1/c (relative residual " + std::to_string(residual) + ")");
    }
    if (v_.time() < (1.0 - kHyperboloidTolerance) / std::sqrt(-c)) {
      throw PreconditionError("point lies on the lower sheet");
    }
  }

  [[nodiscard]] const BasicLorentzVector<Dim>& vector() const { return v_; }
  [[nodiscard]] double curvature() const { return c_; }
  [[nodiscard]] int spatial_dim() const { return v_.spatial_dim(); }

  /// |c<X,X> - 1|, the relative constraint residual.
  [[nodiscard]] double constraint_residual() const { return std::abs(c_ * lorentz_dot(v_, v_) - 1.0); }

 private:
  BasicLorentzVector<Dim> v_;
  double c_;
};

using HyperboloidPoint = BasicHyperboloidPoint<Eigen::Dynamic>;
using HyperboloidPoint3 = BasicHyperboloidPoint<3>;

/// Radial rescaling of a timelike future-pointing vector onto H^m(c).
/// Throws ChartError for spacelike, null or past-pointing input.
template <int Dim>
[[nodiscard]] BasicHyperboloidPoint<Dim> project_to_hyperboloid(const BasicLorentzVector<Dim>& x, double c) {
  if (!(c < 0.0)) throw ConfigError("hyperboloid curvature must be negative");
  if (!x.is_finite()) throw ChartError("non-finite coordinates");
  const double q = lorentz_dot(x, x);
  if (!(q < 0.0)) throw ChartError("vector is spacelike or null");
  if (!(x.time() > 0.0)) throw ChartError("vector is past-pointing");
  const double scale = c * q;
  if (scale == 1.0) return BasicHyperboloidPoint<Dim>(x, c);
  return BasicHyperboloidPoint<Dim>((1.0 / std::sqrt(scale)) * x, c);
}

/// Orthogonal projection of v onto the tangent space T_X H^m(c): v - c<v,X>X.
template <int Dim>
[[nodiscard]] BasicLorentzVector<Dim> project_tangent(const BasicHyperboloidPoint<Dim>& x,
                                                      const BasicLorentzVector<Dim>& v) {
  const auto& p = x.vector();
  return v - (x.curvature() * lorentz_dot(v, p)) * p;
}

/// Hyperbolic distance (1/sqrt(-c)) arccosh(c<X,Y>), argument clamped at 1.
template <int Dim>
[[nodiscard]] double geodesic_distance(const BasicHyperboloidPoint<Dim>& x, const BasicHyperboloidPoint<Dim>& y) {
  if (x.curvature() != y.curvature()) throw ConfigError("geodesic_distance: points on different hyperboloids");
  const double c = x.curvature();
  const double arg = std::max(1.0, c * lorentz_dot(x.vector(), y.vector()));
  return std::acosh(arg) / std::sqrt(-c);
}

/// Lorentzian cross product in R^{1,2}: orthogonal to both arguments.
[[nodiscard]] LorentzVector3 lorentz_cross(const LorentzVector3& a, const LorentzVector3& b);

}  // namespace hypermcf
