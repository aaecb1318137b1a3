#pragma once

// Independent reference constructions used only by the test suite. Everything
// here is built from first principles (Kronecker products, Taylor series,
// adaptive quadrature, crossing counts) so that agreement with the library is
// evidence, not circularity.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracles {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Jordan-Wigner ladder matrix for one mode in an n-mode register where basis
// index k has bit i equal to the occupation of mode i. The full matrix is
// F_{n-1} x ... x F_0 with F_i a single-mode ladder, F_{k<i} the parity flip
// diag(1,-1), and F_{k>i} the identity.
inline CMatrix ladder_matrix(bool dagger, std::size_t mode, std::size_t n_modes) {
  if (mode >= n_modes) throw std::out_of_range("mode out of range");
  CMatrix lower(2, 2), raise(2, 2), zpar(2, 2), id2(2, 2);
  lower << 0, 1, 0, 0;  // |0><1|
  raise << 0, 0, 1, 0;  // |1><0|
  zpar << 1, 0, 0, -1;
  id2 << 1, 0, 0, 1;
  CMatrix m(1, 1);
  m << 1;
  for (std::size_t k = n_modes; k-- > 0;) {
    const CMatrix& factor = (k == mode) ? (dagger ? raise : lower) : (k < mode ? zpar : id2);
    m = kron(m, factor);
  }
  return m;
}

inline CMatrix annihilate_matrix(std::size_t mode, std::size_t n_modes) {
  return ladder_matrix(false, mode, n_modes);
}

inline CMatrix create_matrix(std::size_t mode, std::size_t n_modes) {
  return ladder_matrix(true, mode, n_modes);
}

// Matrix of a product word, leftmost factor applied last (standard operator
// composition), each letter given as (dagger?, mode).
inline CMatrix word_matrix(const std::vector<std::pair<bool, std::size_t>>& word,
                           std::size_t n_modes) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_modes);
  CMatrix m = CMatrix::Identity(dim, dim);
  for (const auto& [dagger, mode] : word) m = m * ladder_matrix(dagger, mode, n_modes);
  return m;
}

// Plain scaled-and-squared Taylor series; slow but independent of any Pade
// machinery.
inline CMatrix expm_taylor(const CMatrix& m) {
  const Eigen::Index n = m.rows();
  double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm > 0.25) {
    norm /= 2.0;
    ++squarings;
  }
  const CMatrix a = m / std::pow(2.0, squarings);
  CMatrix sum = CMatrix::Identity(n, n);
  CMatrix term = CMatrix::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-20) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Planar gauge-field references.

struct Vec2 {
  double x;
  double y;
};

// Adaptive Simpson integration of f over [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double eps, int depth = 28) {
  const double h = b - a;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  std::function<double(double, double, double, double, double, double, int)> go =
      [&](double lo, double hi, double flo, double fhi, double fmid, double whole,
          int d) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    const double flm = f(lm), frm = f(rm);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (d <= 0 || std::abs(left + right - whole) < 15.0 * eps) {
      return left + right + (left + right - whole) / 15.0;
    }
    return go(lo, mid, flo, fmid, flm, left, d - 1) +
           go(mid, hi, fmid, fhi, frm, right, d - 1);
  };
  const double whole = h / 6.0 * (fa + 4.0 * fm + fb);
  return go(a, b, fa, fb, fm, whole, depth);
}

// Line integral of the vector potential A(r) = flux/(2 pi) * (-dy, dx)/|d|^2
// (d = r - center) along the segment p -> q, by quadrature.
inline double segment_integral_quadrature(Vec2 center, double flux, Vec2 p, Vec2 q,
                                          double eps = 1e-12) {
  const auto integrand = [&](double t) {
    const double x = p.x + t * (q.x - p.x) - center.x;
    const double y = p.y + t * (q.y - p.y) - center.y;
    const double r2 = x * x + y * y;
    const double ax = -y / r2, ay = x / r2;
    return ax * (q.x - p.x) + ay * (q.y - p.y);
  };
  return flux / (2.0 * std::numbers::pi) * adaptive_simpson(integrand, 0.0, 1.0, eps);
}

inline double path_integral_quadrature(Vec2 center, double flux, const std::vector<Vec2>& pts,
                                       double eps = 1e-12) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    total += segment_integral_quadrature(center, flux, pts[k], pts[k + 1], eps);
  }
  return total;
}

// Winding number of a closed polyline about a point, by counting signed
// crossings of the rightward horizontal ray.
inline int winding_by_crossings(Vec2 center, const std::vector<Vec2>& pts) {
  int winding = 0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const Vec2 a{pts[k].x - center.x, pts[k].y - center.y};
    const Vec2 b{pts[k + 1].x - center.x, pts[k + 1].y - center.y};
    if (a.y <= 0.0 && b.y > 0.0) {
      if (a.x * (b.y - a.y) - a.y * (b.x - a.x) > 0.0) ++winding;
    } else if (a.y > 0.0 && b.y <= 0.0) {
      if (a.x * (b.y - a.y) - a.y * (b.x - a.x) < 0.0) --winding;
    }
  }
  return winding;
}

// ---------------------------------------------------------------------------
// Deterministic random sources.

inline std::mt19937 fixed_rng(std::uint32_t seed) { return std::mt19937(seed); }

inline Complex random_in_disc(std::mt19937& rng, double radius) {
  std::uniform_real_distribution<double> dist(-radius, radius);
  while (true) {
    const Complex z{dist(rng), dist(rng)};
    if (std::abs(z) <= radius) return z;
  }
}

inline Complex random_unit_modulus(std::mt19937& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  return std::polar(1.0, angle(rng));
}

}  // namespace oracles
