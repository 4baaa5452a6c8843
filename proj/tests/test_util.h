// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BQC_TESTS_TEST_UTIL_H_
#define BQC_TESTS_TEST_UTIL_H_

#include <string>
#include <vector>

#include "bqc/qcore.h"
#include "bqc/rng.h"

namespace bqc::testing {

inline QuantumState product(const std::vector<std::string>& labels, const std::vector<std::string>& names) {
  QuantumState s = spin_state(labels[0], names[0]);
  for (std::size_t i = 1; i < labels.size(); ++i) s = tensor(s, spin_state(labels[i], names[i]));
  return s;
}

// Haar-ish random pure state from Gaussian amplitudes.
inline Vector random_vector(std::size_t d, Rng& rng) {
  Vector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(rng.normal(0, 1), rng.normal(0, 1));
  return v.normalized();
}

inline Matrix random_density(std::size_t d, Rng& rng) {
  auto n = static_cast<Eigen::Index>(d);
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = cplx(rng.normal(0, 1), rng.normal(0, 1));
  }
  Matrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

inline Matrix random_unitary(std::size_t d, Rng& rng) {
  auto n = static_cast<Eigen::Index>(d);
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = cplx(rng.normal(0, 1), rng.normal(0, 1));
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ();
}

// Random CPTP map: Stinespring isometry cut into `count` Kraus blocks.
inline std::vector<Matrix> random_kraus(std::size_t d, std::size_t count, Rng& rng) {
  Matrix u = random_unitary(d * count, rng);
  std::vector<Matrix> out;
  auto n = static_cast<Eigen::Index>(d);
  for (std::size_t k = 0; k < count; ++k) out.push_back(u.block(static_cast<Eigen::Index>(k) * n, 0, n, n));
  return out;
}

}  // namespace bqc::testing

#endif  // BQC_TESTS_TEST_UTIL_H_
