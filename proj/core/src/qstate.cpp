#include "hqkd/qstate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "hqkd/errors.hpp"

namespace hqkd {
namespace {

int qubit_count(std::size_t dim) {
  if (dim == 0 || !std::has_single_bit(dim) || dim > kMaxDim) {
    throw DimensionError("state dimension must be a power of two <= 16, got " +
                         std::to_string(dim));
  }
  return std::countr_zero(dim);
}

int bit_of(std::size_t index, int qubit, int qubits) {
  return static_cast<int>((index >> (qubits - 1 - qubit)) & 1U);
}

// Helpers for addressing a subset of qubits inside a register index.
struct TargetLayout {
  std::vector<int> targets;
  int qubits;

  std::size_t sub_index(std::size_t i) const {
    std::size_t s = 0;
    for (int q : targets) s = (s << 1) | static_cast<std::size_t>(bit_of(i, q, qubits));
    return s;
  }

  std::size_t clear(std::size_t i) const {
    for (int q : targets) i &= ~(std::size_t{1} << (qubits - 1 - q));
    return i;
  }

  std::size_t place(std::size_t rest, std::size_t sub) const {
    const auto t = targets.size();
    for (std::size_t k = 0; k < t; ++k) {
      if ((sub >> (t - 1 - k)) & 1U) rest |= std::size_t{1} << (qubits - 1 - targets[k]);
    }
    return rest;
  }
};

TargetLayout layout_for(int qubits, std::span<const int> targets) {
  std::vector<int> ts(targets.begin(), targets.end());
  for (int q : ts) {
    if (q < 0 || q >= qubits) {
      throw DimensionError("qubit index " + std::to_string(q) + " out of range for " +
                           std::to_string(qubits) + "-qubit register");
    }
  }
  auto sorted = ts;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DimensionError("duplicate qubit in target list");
  }
  return TargetLayout{std::move(ts), qubits};
}

bool is_unitary(const CMatrix& m) {
  if (m.rows() != m.cols()) return false;
  const CMatrix prod = m * m.adjoint();
  return (prod - CMatrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= kStateTolerance;
}

}  // namespace

PureState::PureState(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  qubits_ = qubit_count(static_cast<std::size_t>(amplitudes_.size()));
  const double n2 = amplitudes_.squaredNorm();
  if (std::abs(n2 - 1.0) > kStateTolerance) {
    throw InvalidState("state is not normalized (|psi|^2 = " + std::to_string(n2) + ")");
  }
}

PureState PureState::normalized(CVector amplitudes) {
  const double n = amplitudes.norm();
  if (n < 1e-12) throw InvalidState("cannot normalize a zero vector");
  return PureState(amplitudes / n);
}

PureState PureState::basis(int qubits, std::size_t index) {
  if (qubits < 1 || qubits > 4) throw DimensionError("register must hold 1..4 qubits");
  const std::size_t dim = std::size_t{1} << qubits;
  if (index >= dim) throw DimensionError("basis index out of range");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return PureState(std::move(v));
}

Complex PureState::inner(const PureState& other) const {
  if (dim() != other.dim()) throw DimensionError("inner product of mismatched dimensions");
  return amplitudes_.dot(other.amplitudes_);  // Eigen's dot conjugates the left operand
}

DensityMatrix PureState::projector() const {
  return DensityMatrix(amplitudes_ * amplitudes_.adjoint());
}

DensityMatrix::DensityMatrix(CMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw DimensionError("density matrix must be square and non-empty");
  }
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kStateTolerance) {
    throw InvalidState("density matrix is not Hermitian");
  }
  if (std::abs(matrix_.trace() - Complex(1.0)) > kStateTolerance) {
    throw InvalidState("density matrix trace is not 1");
  }
  // Symmetrize away rounding so eigensolvers see an exactly Hermitian input.
  matrix_ = (0.5 * (matrix_ + matrix_.adjoint())).eval();
  if (eigenvalues().minCoeff() < -kStateTolerance) {
    throw InvalidState("density matrix has a negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return DensityMatrix(CMatrix::Identity(n, n) / static_cast<double>(dim));
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

UnitaryMap::UnitaryMap(CMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() == 0 || !is_unitary(matrix_)) {
    throw InvalidArgument("matrix is not unitary within tolerance");
  }
}

UnitaryMap UnitaryMap::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return UnitaryMap(CMatrix::Identity(n, n));
}

namespace gates {
UnitaryMap pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return UnitaryMap(m);
}
UnitaryMap pauli_y() {
  CMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return UnitaryMap(m);
}
UnitaryMap pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return UnitaryMap(m);
}
UnitaryMap hadamard() {
  CMatrix m(2, 2);
  m << 1, 1, 1, -1;
  return UnitaryMap(m / std::sqrt(2.0));
}
}  // namespace gates

PureState tensor_product(const PureState& a, const PureState& b) {
  const std::size_t dim = a.dim() * b.dim();
  if (dim > kMaxDim) throw DimensionError("tensor product exceeds 16 dimensions");
  CVector out(static_cast<Eigen::Index>(dim));
  const auto nb = static_cast<Eigen::Index>(b.dim());
  for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i) {
    out.segment(i * nb, nb) = a.amplitudes()(i) * b.amplitudes();
  }
  return PureState(std::move(out));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep,
                            std::span<const std::size_t> dims) {
  std::size_t total = 1;
  for (auto d : dims) {
    if (d == 0) throw DimensionError("factor dimension must be positive");
    total *= d;
  }
  if (total != rho.dim()) throw DimensionError("factor dimensions do not multiply to rho.dim()");

  const int nf = static_cast<int>(dims.size());
  std::vector<bool> kept(dims.size(), false);
  for (int k : keep) {
    if (k < 0 || k >= nf) throw DimensionError("kept factor index out of range");
    if (kept[static_cast<std::size_t>(k)]) throw DimensionError("duplicate kept factor");
    kept[static_cast<std::size_t>(k)] = true;
  }

  std::size_t kept_dim = 1;
  for (int f = 0; f < nf; ++f) {
    if (kept[static_cast<std::size_t>(f)]) kept_dim *= dims[static_cast<std::size_t>(f)];
  }

  // Mixed-radix split of an index into (kept part, traced part).
  auto split = [&](std::size_t index) {
    std::size_t kept_idx = 0, traced_idx = 0, kept_stride = 1, traced_stride = 1;
    for (int f = nf - 1; f >= 0; --f) {
      const auto d = dims[static_cast<std::size_t>(f)];
      const auto digit = index % d;
      index /= d;
      if (kept[static_cast<std::size_t>(f)]) {
        kept_idx += digit * kept_stride;
        kept_stride *= d;
      } else {
        traced_idx += digit * traced_stride;
        traced_stride *= d;
      }
    }
    return std::pair{kept_idx, traced_idx};
  };

  const auto n = static_cast<Eigen::Index>(kept_dim);
  CMatrix out = CMatrix::Zero(n, n);
  const auto& m = rho.matrix();
  for (std::size_t i = 0; i < total; ++i) {
    const auto [ki, ti] = split(i);
    for (std::size_t j = 0; j < total; ++j) {
      const auto [kj, tj] = split(j);
      if (ti != tj) continue;
      out(static_cast<Eigen::Index>(ki), static_cast<Eigen::Index>(kj)) +=
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return DensityMatrix(std::move(out));
}

DensityMatrix reduced_density(const PureState& psi, std::span<const int> qubits) {
  const auto layout = layout_for(psi.qubits(), qubits);
  const auto n = static_cast<Eigen::Index>(std::size_t{1} << qubits.size());
  CMatrix out = CMatrix::Zero(n, n);
  for (std::size_t i = 0; i < psi.dim(); ++i) {
    const auto rest_i = layout.clear(i);
    const auto si = static_cast<Eigen::Index>(layout.sub_index(i));
    for (std::size_t j = 0; j < psi.dim(); ++j) {
      if (layout.clear(j) != rest_i) continue;
      out(si, static_cast<Eigen::Index>(layout.sub_index(j))) += psi[i] * std::conj(psi[j]);
    }
  }
  return DensityMatrix(std::move(out));
}

double von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (double lambda : rho.eigenvalues()) {
    if (lambda > kEigenClip) s -= lambda * std::log2(lambda);
  }
  return std::max(0.0, s);
}

double concurrence(const PureState& psi) {
  if (psi.dim() != 4) throw DimensionError("concurrence requires a two-qubit state");
  Eigen::Matrix2cd m;
  m << psi[0], psi[1], psi[2], psi[3];
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m);
  const auto& s = svd.singularValues();
  return std::clamp(2.0 * s(0) * s(1), 0.0, 1.0);
}

void require_orthonormal(std::span<const PureState> basis, std::size_t dim) {
  if (basis.empty()) throw InvalidArgument("measurement basis is empty");
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].dim() != dim) throw InvalidArgument("basis state has wrong dimension");
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      if (std::abs(basis[i].inner(basis[j])) > kStateTolerance) {
        throw InvalidArgument("basis states are not orthogonal");
      }
    }
  }
}

std::size_t sample_index(std::span<const double> probs, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    last_positive = k;
    acc += probs[k];
    if (u < acc) return k;
  }
  return last_positive;
}

MeasurementResult projective_measure(const PureState& psi, std::span<const PureState> basis,
                                     Rng& rng) {
  require_orthonormal(basis, psi.dim());
  if (basis.size() != psi.dim()) {
    throw InvalidArgument("measurement basis does not span the register");
  }
  std::vector<double> probs;
  probs.reserve(basis.size());
  for (const auto& b : basis) probs.push_back(std::norm(b.inner(psi)));
  const auto k = sample_index(probs, rng);
  return {k, basis[k]};
}

PureState apply_unitary(const PureState& state, const UnitaryMap& u,
                        std::span<const int> targets) {
  const auto layout = layout_for(state.qubits(), targets);
  if (u.dim() != (std::size_t{1} << targets.size())) {
    throw DimensionError("unitary dimension does not match the target qubits");
  }
  CVector out = CVector::Zero(static_cast<Eigen::Index>(state.dim()));
  for (std::size_t i = 0; i < state.dim(); ++i) {
    const Complex a = state[i];
    if (a == Complex(0.0)) continue;
    const auto rest = layout.clear(i);
    const auto col = static_cast<Eigen::Index>(layout.sub_index(i));
    for (std::size_t row = 0; row < u.dim(); ++row) {
      out(static_cast<Eigen::Index>(layout.place(rest, row))) +=
          u.matrix()(static_cast<Eigen::Index>(row), col) * a;
    }
  }
  return PureState(std::move(out));
}

CVector project_onto(const PureState& psi, const PureState& b, std::span<const int> targets) {
  const auto layout = layout_for(psi.qubits(), targets);
  if (b.dim() != (std::size_t{1} << targets.size())) {
    throw DimensionError("projector dimension does not match the target qubits");
  }
  // coeff[rest] = sum_s conj(b_s) psi[rest, s]
  std::vector<Complex> coeff(psi.dim(), Complex(0.0));
  for (std::size_t i = 0; i < psi.dim(); ++i) {
    coeff[layout.clear(i)] += std::conj(b[layout.sub_index(i)]) * psi[i];
  }
  CVector out(static_cast<Eigen::Index>(psi.dim()));
  for (std::size_t i = 0; i < psi.dim(); ++i) {
    out(static_cast<Eigen::Index>(i)) = b[layout.sub_index(i)] * coeff[layout.clear(i)];
  }
  return out;
}

std::vector<SubsystemOutcome> measure_subsystem(const PureState& psi,
                                                std::span<const PureState> basis,
                                                std::span<const int> targets) {
  const std::size_t sub_dim = std::size_t{1} << targets.size();
  require_orthonormal(basis, sub_dim);
  if (basis.size() != sub_dim) throw InvalidArgument("measurement basis is incomplete");

  std::vector<SubsystemOutcome> outcomes;
  outcomes.reserve(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    CVector post = project_onto(psi, basis[k], targets);
    const double p = post.squaredNorm();
    if (p > 0.0) {
      post /= std::sqrt(p);
    } else {
      post.setZero();
    }
    outcomes.push_back({k, p, std::move(post)});
  }
  return outcomes;
}

SubsystemOutcome sample_subsystem(const PureState& psi, std::span<const PureState> basis,
                                  std::span<const int> targets, Rng& rng) {
  auto outcomes = measure_subsystem(psi, basis, targets);
  std::vector<double> probs;
  probs.reserve(outcomes.size());
  for (const auto& o : outcomes) probs.push_back(o.probability);
  return std::move(outcomes[sample_index(probs, rng)]);
}

}  // namespace hqkd
