#include "bohmfol/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "bohmfol/errors.hpp"

namespace bohmfol::spacetime {

bool Event4::finite() const {
  return std::isfinite(t) && std::isfinite(x) && std::isfinite(y) &&
         std::isfinite(z);
}

std::ostream &operator<<(std::ostream &os, const Event4 &e) {
  return os << '(' << e.t << ", " << e.x << ", " << e.y << ", " << e.z << ')';
}

BoostSpec::BoostSpec(const Vec3 &beta) : beta_(beta) {
  const double b2 = beta.norm2();
  if (!beta.finite() || !(b2 < 1.0)) {
    std::ostringstream msg;
    msg << "boost velocity " << beta << " must satisfy |beta| < 1";
    throw BetaOutOfRange(msg.str());
  }
  gamma_ = 1.0 / std::sqrt(1.0 - b2);
}

Event4 boost(const Event4 &e, const BoostSpec &b) {
  const Vec3 &beta = b.beta();
  const double b2 = beta.norm2();
  if (b2 == 0.0) {
    return e;
  }
  const double g = b.gamma();
  const Vec3 r = e.spatial();
  const double br = dot(beta, r);
  const double t = g * (e.t + br);
  const Vec3 rp = r + ((g - 1.0) * br / b2 + g * e.t) * beta;
  return {t, rp};
}

FoliationNormal FoliationNormal::from_components(double n0, double nx,
                                                 double ny, double nz) {
  const Event4 v{n0, nx, ny, nz};
  if (!v.finite()) {
    throw InvalidNormal("foliation normal has non-finite components");
  }
  if (!(n0 > 0.0)) {
    throw InvalidNormal("foliation normal must be future-pointing (n0 > 0)");
  }
  const double norm = minkowski_dot(v, v);
  if (std::abs(norm - 1.0) > kNormTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "foliation normal must be unit timelike, got |n|^2 = " << norm;
    throw InvalidNormal(msg.str());
  }
  return FoliationNormal(v);
}

FoliationNormal FoliationNormal::from_boost(const BoostSpec &b) {
  const Vec3 nvec = b.gamma() * b.beta();
  // n0 from the normalization condition keeps |n|^2 = 1 to rounding.
  const double n0 = std::sqrt(1.0 + nvec.norm2());
  return FoliationNormal(Event4{n0, nvec});
}

double foliation_time(const FoliationNormal &n, const Event4 &p) {
  return minkowski_dot(n.vector(), p);
}

std::string to_string(TemporalOrder o) {
  switch (o) {
  case TemporalOrder::AliceFirst:
    return "alice-first";
  case TemporalOrder::BobFirst:
    return "bob-first";
  case TemporalOrder::Simultaneous:
    return "simultaneous";
  }
  return "unknown";
}

TemporalOrder temporal_order(const FoliationNormal &n, const Event4 &a,
                             const Event4 &b, double tol) {
  const double ta = foliation_time(n, a);
  const double tb = foliation_time(n, b);
  if (ta < tb - tol) {
    return TemporalOrder::AliceFirst;
  }
  if (tb < ta - tol) {
    return TemporalOrder::BobFirst;
  }
  return TemporalOrder::Simultaneous;
}

namespace {

using Row = std::array<double, 4>;
using Matrix34 = std::array<Row, 3>;

// Rows are eta * s so that a Euclidean product with n gives s . n.
Matrix34 metric_contracted(const Event4 &s1, const Event4 &s2,
                           const Event4 &s3) {
  Matrix34 m{};
  const std::array<const Event4 *, 3> rows{&s1, &s2, &s3};
  for (std::size_t i = 0; i < 3; ++i) {
    m[i] = {rows[i]->t, -rows[i]->x, -rows[i]->y, -rows[i]->z};
  }
  return m;
}

struct Echelon {
  Matrix34 a{};
  std::array<int, 3> pivot_col{-1, -1, -1};
  int rank{0};
};

// Reduced row echelon form with partial pivoting per column.
Echelon reduce(Matrix34 a) {
  double scale = 0.0;
  for (const auto &row : a) {
    for (double v : row) {
      scale = std::max(scale, std::abs(v));
    }
  }
  Echelon e;
  if (scale == 0.0) {
    e.a = a;
    return e;
  }
  const double threshold = kRankThreshold * scale;
  int row = 0;
  for (int col = 0; col < 4 && row < 3; ++col) {
    int best = row;
    for (int r = row + 1; r < 3; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[best][col])) {
        best = r;
      }
    }
    if (std::abs(a[best][col]) <= threshold) {
      continue;
    }
    std::swap(a[row], a[best]);
    const double p = a[row][col];
    for (int r = 0; r < 3; ++r) {
      if (r == row) {
        continue;
      }
      const double f = a[r][col] / p;
      if (f == 0.0) {
        continue;
      }
      for (int c = col; c < 4; ++c) {
        a[r][c] -= f * a[row][c];
      }
      a[r][col] = 0.0;
    }
    e.pivot_col[row] = col;
    ++row;
  }
  e.a = a;
  e.rank = row;
  return e;
}

} // namespace

bool check_triad_independence(const Event4 &s1, const Event4 &s2,
                              const Event4 &s3) {
  return reduce(metric_contracted(s1, s2, s3)).rank == 3;
}

FoliationNormal solve_normal(const Event4 &s1, const Event4 &s2,
                             const Event4 &s3) {
  if (!s1.finite() || !s2.finite() || !s3.finite()) {
    throw DegenerateTriad("separation vectors must be finite");
  }
  const Echelon e = reduce(metric_contracted(s1, s2, s3));
  if (e.rank < 3) {
    throw DegenerateTriad("separation vectors are linearly dependent (rank " +
                          std::to_string(e.rank) + " < 3)");
  }
  std::array<bool, 4> is_pivot{};
  for (int c : e.pivot_col) {
    is_pivot[static_cast<std::size_t>(c)] = true;
  }
  const auto free_col = static_cast<std::size_t>(
      std::find(is_pivot.begin(), is_pivot.end(), false) - is_pivot.begin());

  std::array<double, 4> n{};
  n[free_col] = 1.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto c = static_cast<std::size_t>(e.pivot_col[i]);
    n[c] = -e.a[i][free_col] / e.a[i][c];
  }

  const double spatial2 = n[1] * n[1] + n[2] * n[2] + n[3] * n[3];
  const double euclid2 = n[0] * n[0] + spatial2;
  const double q = n[0] * n[0] - spatial2;
  if (!(q > kNormTolerance * euclid2)) {
    throw NonTimelikeNormal(
        "separations are not tangent to any spacelike hyperplane");
  }
  double inv = 1.0 / std::sqrt(q);
  if (n[0] < 0.0) {
    inv = -inv;
  }
  const Vec3 nvec{n[1] * inv, n[2] * inv, n[3] * inv};
  return FoliationNormal(Event4{std::sqrt(1.0 + nvec.norm2()), nvec});
}

double component_angle(const Event4 &a, const Event4 &b) {
  const double na = std::sqrt(a.t * a.t + a.x * a.x + a.y * a.y + a.z * a.z);
  const double nb = std::sqrt(b.t * b.t + b.x * b.x + b.y * b.y + b.z * b.z);
  const Event4 ua = (1.0 / na) * a;
  const Event4 ub = (1.0 / nb) * b;
  const Event4 d = ua - ub;
  const Event4 s = ua + ub;
  const double dn = std::sqrt(d.t * d.t + d.x * d.x + d.y * d.y + d.z * d.z);
  const double sn = std::sqrt(s.t * s.t + s.x * s.x + s.y * s.y + s.z * s.z);
  return 2.0 * std::atan2(dn, sn);
}

std::array<double, 3> separation_singular_values(const Event4 &s1,
                                                 const Event4 &s2,
                                                 const Event4 &s3) {
  const Matrix34 m = metric_contracted(s1, s2, s3);
  double g[3][3];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) {
        acc += m[i][k] * m[j][k];
      }
      g[i][j] = acc;
    }
  }
  // Closed-form eigenvalues of the symmetric 3x3 Gram matrix.
  std::array<double, 3> eig{};
  const double p1 = g[0][1] * g[0][1] + g[0][2] * g[0][2] + g[1][2] * g[1][2];
  if (p1 == 0.0) {
    eig = {g[0][0], g[1][1], g[2][2]};
    std::sort(eig.begin(), eig.end(), std::greater<>());
  } else {
    const double q = (g[0][0] + g[1][1] + g[2][2]) / 3.0;
    const double p2 = (g[0][0] - q) * (g[0][0] - q) +
                      (g[1][1] - q) * (g[1][1] - q) +
                      (g[2][2] - q) * (g[2][2] - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    double b[3][3];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        b[i][j] = (g[i][j] - (i == j ? q : 0.0)) / p;
      }
    }
    const double det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                       b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                       b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    const double r = std::clamp(det / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    eig[0] = q + 2.0 * p * std::cos(phi);
    eig[2] = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    eig[1] = 3.0 * q - eig[0] - eig[2];
  }
  return {std::sqrt(std::max(eig[0], 0.0)), std::sqrt(std::max(eig[1], 0.0)),
          std::sqrt(std::max(eig[2], 0.0))};
}

} // namespace bohmfol::spacetime
