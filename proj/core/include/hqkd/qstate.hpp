#pragma once

// Exact state algebra for registers of up to four qubits.
//
// Qubit ordering is big-endian throughout the library: qubit 0 is the most
// significant factor, so |q0 q1 ...> has index q0*2^(k-1) + q1*2^(k-2) + ...

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hqkd/rng.hpp"

namespace hqkd {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kStateTolerance = 1e-9;
inline constexpr double kEigenClip = 1e-12;
inline constexpr std::size_t kMaxDim = 16;

class DensityMatrix;

// Normalized state vector of a k-qubit register, dim = 2^k <= 16.
class PureState {
 public:
  // Throws InvalidState unless the norm is 1 within kStateTolerance.
  explicit PureState(CVector amplitudes);

  // Rescales to unit norm; throws for a (numerically) zero vector.
  static PureState normalized(CVector amplitudes);
  static PureState basis(int qubits, std::size_t index);

  int qubits() const noexcept { return qubits_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
  const CVector& amplitudes() const noexcept { return amplitudes_; }
  Complex operator[](std::size_t i) const { return amplitudes_(static_cast<Eigen::Index>(i)); }

  // <this|other>
  Complex inner(const PureState& other) const;
  DensityMatrix projector() const;

 private:
  CVector amplitudes_;
  int qubits_ = 0;
};

// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix matrix);

  static DensityMatrix maximally_mixed(std::size_t dim);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  const CMatrix& matrix() const noexcept { return matrix_; }

  // Ascending eigenvalues.
  Eigen::VectorXd eigenvalues() const;

 private:
  CMatrix matrix_;
};

class UnitaryMap {
 public:
  explicit UnitaryMap(CMatrix matrix);

  static UnitaryMap identity(std::size_t dim);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  const CMatrix& matrix() const noexcept { return matrix_; }

 private:
  CMatrix matrix_;
};

namespace gates {
UnitaryMap pauli_x();
UnitaryMap pauli_y();
UnitaryMap pauli_z();
UnitaryMap hadamard();
}  // namespace gates

// Kronecker product; throws DimensionError when the result exceeds 16.
PureState tensor_product(const PureState& a, const PureState& b);

// Traces out every factor not listed in `keep`. `dims` gives the factor
// dimensions (their product must equal rho.dim()); kept factors stay in
// ascending order.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep,
                            std::span<const std::size_t> dims);

// Reduced state of the listed qubits of a pure register, in the order given.
DensityMatrix reduced_density(const PureState& psi, std::span<const int> qubits);

// S(rho) = -Tr(rho log2 rho); eigenvalues below 1e-12 contribute 0.
double von_neumann_entropy(const DensityMatrix& rho);

// Two-qubit concurrence 2 s0 s1 from the Schmidt coefficients.
double concurrence(const PureState& psi);

// Throws InvalidArgument unless the list is orthonormal within tolerance
// and every member has dimension `dim`.
void require_orthonormal(std::span<const PureState> basis, std::size_t dim);

struct MeasurementResult {
  std::size_t outcome;
  PureState post;
};

// Measures the whole register in `basis`; the outcome is drawn by inverse CDF
// over ascending outcome index.
MeasurementResult projective_measure(const PureState& psi, std::span<const PureState> basis,
                                     Rng& rng);

// Applies `u` to the listed qubits (in that order); identity elsewhere.
PureState apply_unitary(const PureState& state, const UnitaryMap& u,
                        std::span<const int> targets);

// Unnormalized (|b><b| on targets, identity elsewhere)|psi>.
CVector project_onto(const PureState& psi, const PureState& b, std::span<const int> targets);

// One branch of a measurement on a subset of qubits.
struct SubsystemOutcome {
  std::size_t outcome;
  double probability;
  CVector post;  // normalized when probability > 0, zero otherwise
};

// Every outcome of measuring `targets` in `basis`, including zero-probability
// ones (post left zero). Probabilities sum to 1.
std::vector<SubsystemOutcome> measure_subsystem(const PureState& psi,
                                                std::span<const PureState> basis,
                                                std::span<const int> targets);

// Samples one outcome of measure_subsystem by inverse CDF.
SubsystemOutcome sample_subsystem(const PureState& psi, std::span<const PureState> basis,
                                  std::span<const int> targets, Rng& rng);

// Inverse-CDF draw over `probs` (ascending index). Falls back to the last
// index with positive weight when rounding leaves u above the total.
std::size_t sample_index(std::span<const double> probs, Rng& rng);

}  // namespace hqkd
