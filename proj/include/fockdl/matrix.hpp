#pragma once

// Dense-matrix realization of operator expressions on the 2^n-dimensional
// Fock space. Basis column k corresponds to the occupation mask k, so the
// matrix of an operator is assembled by applying it to each basis vector.

#include <Eigen/Dense>

#include "fockdl/operators.hpp"

namespace fockdl {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline std::size_t fock_dimension(std::size_t n_modes) {
  check_mode_count(n_modes);
  return std::size_t{1} << n_modes;
}

inline CVector to_dense(const StateVector& v) {
  CVector out = CVector::Zero(static_cast<Eigen::Index>(fock_dimension(v.n_modes())));
  for (const auto& [mask, amp] : v.amplitudes()) out(static_cast<Eigen::Index>(mask)) = amp;
  return out;
}

inline StateVector from_dense(const CVector& column, std::size_t n_modes) {
  if (column.size() != static_cast<Eigen::Index>(fock_dimension(n_modes))) {
    throw std::invalid_argument("column length does not match the Fock dimension");
  }
  std::map<OccMask, Complex> amps;
  for (Eigen::Index k = 0; k < column.size(); ++k) {
    if (column(k) != Complex{}) amps[static_cast<OccMask>(k)] = column(k);
  }
  return StateVector(n_modes, std::move(amps));
}

inline CMatrix to_matrix(const OperatorExpr& op) {
  const std::size_t dim = fock_dimension(op.n_modes());
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < dim; ++k) {
    StateVector basis_col(op.n_modes(),
                          {{static_cast<OccMask>(k), Complex{1.0, 0.0}}});
    m.col(static_cast<Eigen::Index>(k)) = to_dense(apply(op, basis_col));
  }
  return m;
}

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_projective(const CMatrix& m, double tol = 1e-12) {
  return max_abs(m * m - m) <= tol;
}

inline bool is_hermitian(const CMatrix& m, double tol = 1e-12) {
  return max_abs(m - m.adjoint().eval()) <= tol;
}

// Scaling-and-squaring with a degree-7 diagonal Pade approximant; accurate to
// well below 1e-12 once the scaled norm is <= 1/2.
inline CMatrix matrix_exponential(const CMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix exponential needs a square matrix");
  const Eigen::Index n = m.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  if (n == 0) return m;

  double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm > 0.5) {
    norm /= 2.0;
    ++squarings;
  }
  const CMatrix a = m / std::pow(2.0, squarings);

  static constexpr double kPade7[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                      25200.0,    1512.0,    56.0,      1.0};
  const CMatrix a2 = a * a;
  const CMatrix a4 = a2 * a2;
  const CMatrix a6 = a4 * a2;
  const CMatrix even = kPade7[0] * id + kPade7[2] * a2 + kPade7[4] * a4 + kPade7[6] * a6;
  const CMatrix odd = a * (kPade7[1] * id + kPade7[3] * a2 + kPade7[5] * a4 + kPade7[7] * a6);

  CMatrix r = (even - odd).partialPivLu().solve(even + odd);
  for (int s = 0; s < squarings; ++s) r = r * r;
  return r;
}

// exp(i O) as a dense matrix; unitary whenever O is Hermitian.
inline CMatrix exp_i(const OperatorExpr& op) {
  return matrix_exponential(Complex{0.0, 1.0} * to_matrix(op));
}

}  // namespace fockdl
