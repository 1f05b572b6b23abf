#pragma once

// Density-matrix reference model of the eavesdropping scenarios, written
// directly against Eigen. It shares no code with the library's branch
// enumeration and is used to pin detection probabilities.

#include <array>
#include <cmath>
#include <complex>
#include <optional>

#include <Eigen/Dense>

namespace hqkd::oracle {

using C = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Mat eye(Eigen::Index n) { return Mat::Identity(n, n); }

inline Vec ket(std::initializer_list<C> amps) {
  Vec v(static_cast<Eigen::Index>(amps.size()));
  Eigen::Index i = 0;
  for (auto a : amps) v(i++) = a;
  return v.normalized();
}

// The alphabet |HH>, (|HV>+|VH>)/sqrt2, (|HV>-|VH>)/sqrt2, |VV>.
inline std::array<Vec, 4> letters_202() {
  return {ket({1, 0, 0, 0}), ket({0, 1, 1, 0}), ket({0, 1, -1, 0}), ket({0, 0, 0, 1})};
}

inline std::array<Vec, 4> letters_bell() {
  return {ket({1, 0, 0, 1}), ket({0, 1, 1, 0}), ket({0, 1, -1, 0}), ket({1, 0, 0, -1})};
}

inline std::array<Vec, 4> letters_400() {
  return {ket({1, 0, 0, 0}), ket({0, 0, 1, 0}), ket({0, 1, 0, 1}), ket({0, 1, 0, -1})};
}

// Real polarization basis rotated by theta degrees.
inline std::array<Vec, 2> rotated(double theta_deg) {
  const double t = theta_deg * M_PI / 180.0;
  Vec b0(2), b1(2);
  b0 << std::cos(t), std::sin(t);
  b1 << -std::sin(t), std::cos(t);
  return {b0, b1};
}

// Dephasing channel of a projective measurement on one of two qubits.
inline Mat measure_qubit(const Mat& rho, int qubit, const std::array<Vec, 2>& basis) {
  Mat out = Mat::Zero(4, 4);
  for (const auto& b : basis) {
    const Mat p = b * b.adjoint();
    const Mat op = qubit == 0 ? kron(p, eye(2)) : kron(eye(2), p);
    out += op * rho * op.adjoint();
  }
  return out;
}

inline double detect_from_channel(const std::array<Vec, 4>& letters, auto&& channel) {
  double total = 0.0;
  for (const auto& psi : letters) {
    const Mat out = channel(Mat(psi * psi.adjoint()));
    total += 1.0 - (psi.adjoint() * out * psi)(0, 0).real();
  }
  return total / 4.0;
}

inline double intercept_resend_detect(const std::array<Vec, 4>& letters,
                                      std::optional<double> q1_deg, std::optional<double> q2_deg) {
  return detect_from_channel(letters, [&](Mat rho) {
    if (q1_deg) rho = measure_qubit(rho, 0, rotated(*q1_deg));
    if (q2_deg) rho = measure_qubit(rho, 1, rotated(*q2_deg));
    return rho;
  });
}

// Registers ordered (T1, T2, A1, A2); Eve Bell-measures (T1, T2) and applies
// the matching Pauli to A2. Bob's state is the reduction onto (A1, A2).
inline double ancilla_swap_detect(const std::array<Vec, 4>& letters) {
  const auto bell = letters_bell();
  Mat x(2, 2), z(2, 2), xz(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  xz << 0, -1, 1, 0;
  const std::array<Mat, 4> fix{eye(2), x, xz, z};  // Phi+, Psi+, Psi-, Phi-
  const Vec phi_plus = bell[0];

  return detect_from_channel(letters, [&](const Mat& rho_letter) {
    const Mat rho = kron(rho_letter, phi_plus * phi_plus.adjoint());
    Mat after = Mat::Zero(16, 16);
    for (int k = 0; k < 4; ++k) {
      const Mat op = kron(Mat(bell[static_cast<std::size_t>(k)] *
                              bell[static_cast<std::size_t>(k)].adjoint()),
                          kron(eye(2), fix[static_cast<std::size_t>(k)]));
      after += op * rho * op.adjoint();
    }
    // trace out T1, T2 (the four most significant index blocks)
    Mat bob = Mat::Zero(4, 4);
    for (int t = 0; t < 4; ++t) bob += after.block(4 * t, 4 * t, 4, 4);
    return bob;
  });
}

}  // namespace hqkd::oracle
