#pragma once

#include <array>
#include <cstddef>
#include <ostream>
#include <string>

#include "bohmfol/vec3.hpp"

namespace bohmfol::spacetime {

/// Space-time point (or displacement) in a Lorentz frame, natural units c=1.
struct Event4 {
  double t{0.0};
  double x{0.0};
  double y{0.0};
  double z{0.0};

  constexpr Event4() = default;
  constexpr Event4(double t_, double x_, double y_, double z_)
      : t(t_), x(x_), y(y_), z(z_) {}
  constexpr Event4(double t_, const Vec3 &r) : t(t_), x(r.x), y(r.y), z(r.z) {}

  [[nodiscard]] constexpr Vec3 spatial() const { return {x, y, z}; }
  [[nodiscard]] bool finite() const;

  friend constexpr Event4 operator+(const Event4 &a, const Event4 &b) {
    return {a.t + b.t, a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend constexpr Event4 operator-(const Event4 &a, const Event4 &b) {
    return {a.t - b.t, a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend constexpr Event4 operator*(double s, const Event4 &a) {
    return {s * a.t, s * a.x, s * a.y, s * a.z};
  }
  friend constexpr bool operator==(const Event4 &, const Event4 &) = default;
};

std::ostream &operator<<(std::ostream &os, const Event4 &e);

/// Minkowski product with signature (+,-,-,-).
constexpr double minkowski_dot(const Event4 &a, const Event4 &b) {
  return a.t * b.t - a.x * b.x - a.y * b.y - a.z * b.z;
}

/// Velocity of one frame relative to another; |beta| < 1 is enforced.
class BoostSpec {
public:
  BoostSpec() = default;
  /// Throws BetaOutOfRange unless |beta| < 1 and every component is finite.
  explicit BoostSpec(const Vec3 &beta);

  [[nodiscard]] const Vec3 &beta() const { return beta_; }
  [[nodiscard]] double gamma() const { return gamma_; }
  [[nodiscard]] BoostSpec inverse() const { return BoostSpec(-beta_); }

private:
  Vec3 beta_{};
  double gamma_{1.0};
};

/// Active Lorentz boost: carries a vector at rest into one moving with
/// velocity beta, e.g. (1,0,0,0) -> gamma (1, beta).
Event4 boost(const Event4 &e, const BoostSpec &b);

/// Future-pointing unit timelike normal of a flat foliation.
class FoliationNormal {
public:
  /// Rest-frame normal (1,0,0,0).
  FoliationNormal() = default;

  /// Validates |n|^2 = 1 within 1e-12 and n0 > 0; throws InvalidNormal.
  static FoliationNormal from_components(double n0, double nx, double ny,
                                         double nz);
  /// Time axis of a frame moving with velocity beta: gamma (1, beta).
  static FoliationNormal from_boost(const BoostSpec &b);

  [[nodiscard]] double n0() const { return v_.t; }
  [[nodiscard]] double nx() const { return v_.x; }
  [[nodiscard]] double ny() const { return v_.y; }
  [[nodiscard]] double nz() const { return v_.z; }
  [[nodiscard]] const Event4 &vector() const { return v_; }

private:
  explicit FoliationNormal(const Event4 &v) : v_(v) {}
  Event4 v_{1.0, 0.0, 0.0, 0.0};

  friend FoliationNormal solve_normal(const Event4 &, const Event4 &,
                                      const Event4 &);
};

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kRankThreshold = 1e-10;

/// Leaf label of p under the linear gauge t(p) = n . p.
double foliation_time(const FoliationNormal &n, const Event4 &p);

enum class TemporalOrder { AliceFirst, BobFirst, Simultaneous };

std::string to_string(TemporalOrder o);

/// Order of A and B along the foliation. AliceFirst iff t(A) < t(B) - tol.
TemporalOrder temporal_order(const FoliationNormal &n, const Event4 &a,
                             const Event4 &b, double tol = 0.0);

/// Two events recovered as simultaneous by a switch-point search.
struct SimultaneousPair {
  Event4 pA;
  Event4 pB;
  std::string label;

  [[nodiscard]] Event4 separation() const { return pA - pB; }
};

/// True iff the three separations have rank 3 (pivoted elimination,
/// relative threshold kRankThreshold).
bool check_triad_independence(const Event4 &s1, const Event4 &s2,
                              const Event4 &s3);

/// Unique future-pointing unit normal orthogonal to three separations.
///
/// Solves the metric-contracted 3x4 system by Gaussian elimination with
/// partial pivoting and reads off its one-dimensional null space. Throws
/// DegenerateTriad when rank < 3 and NonTimelikeNormal when the null vector
/// is not timelike.
FoliationNormal solve_normal(const Event4 &s1, const Event4 &s2,
                             const Event4 &s3);

/// Euclidean angle between two 4-vectors in the components of the common
/// frame; stable for nearly parallel inputs.
double component_angle(const Event4 &a, const Event4 &b);

/// Singular values of the 3x4 metric-contracted separation matrix, largest
/// first. The smallest one controls how residual simultaneity errors
/// propagate into the recovered normal.
std::array<double, 3> separation_singular_values(const Event4 &s1,
                                                 const Event4 &s2,
                                                 const Event4 &s3);

} // namespace bohmfol::spacetime
