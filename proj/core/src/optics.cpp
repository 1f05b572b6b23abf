#include "hqkd/optics.hpp"

#include <cmath>
#include <vector>

#include "hqkd/errors.hpp"

namespace hqkd {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kSupportTolerance = 1e-10;

// Index of (i, j), i <= j, in the canonical pair order.
constexpr std::size_t pair_index(std::size_t i, std::size_t j) {
  // rows start at 0, 4, 7, 9
  constexpr std::array<std::size_t, 4> row_start{0, 4, 7, 9};
  return row_start[i] + (j - i);
}

// Symmetric coefficient matrix S with |state> = sum_ij S_ij a_i^dag a_j^dag |0>.
Eigen::Matrix4cd to_symmetric(const TwoPhotonState& s) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  for (std::size_t i = 0; i < kModes; ++i) {
    for (std::size_t j = i; j < kModes; ++j) {
      const Complex c = s.amplitudes()[pair_index(i, j)];
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      if (i == j) {
        m(ii, ii) = c / kSqrt2;  // |2_i> = (a_i^dag)^2 / sqrt2 |0>
      } else {
        m(ii, jj) = c / 2.0;
        m(jj, ii) = c / 2.0;
      }
    }
  }
  return m;
}

std::array<Complex, kPairStates> from_symmetric(const Eigen::Matrix4cd& m) {
  std::array<Complex, kPairStates> c{};
  for (std::size_t i = 0; i < kModes; ++i) {
    for (std::size_t j = i; j < kModes; ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      c[pair_index(i, j)] = (i == j) ? m(ii, ii) * kSqrt2 : m(ii, jj) + m(jj, ii);
    }
  }
  return c;
}

}  // namespace

ClickPattern ClickPattern::of(std::size_t a, std::size_t b) {
  if (a >= kModes || b >= kModes) throw InvalidArgument("detector index out of range");
  if (a > b) std::swap(a, b);
  return {static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)};
}

std::size_t ClickPattern::index() const noexcept { return pair_index(first, second); }

ClickPattern ClickPattern::at(std::size_t index) {
  for (std::size_t i = 0; i < kModes; ++i) {
    for (std::size_t j = i; j < kModes; ++j) {
      if (pair_index(i, j) == index) return of(i, j);
    }
  }
  throw InvalidArgument("click pattern index out of range");
}

std::string ClickPattern::str() const {
  return "D" + std::to_string(first + 1) + "D" + std::to_string(second + 1);
}

TwoPhotonState::TwoPhotonState(std::array<Complex, kPairStates> amplitudes)
    : amplitudes_(amplitudes) {
  double n2 = 0.0;
  for (const auto& a : amplitudes_) n2 += std::norm(a);
  if (std::abs(n2 - 1.0) > kStateTolerance) throw InvalidState("two-photon state is not normalized");
}

ModeTransform::ModeTransform(Eigen::Matrix4cd matrix) : matrix_(std::move(matrix)) {
  const Eigen::Matrix4cd err = matrix_ * matrix_.adjoint() - Eigen::Matrix4cd::Identity();
  if (err.cwiseAbs().maxCoeff() > kStateTolerance) {
    throw InvalidArgument("mode transform is not unitary");
  }
}

ModeTransform ModeTransform::identity() { return ModeTransform(Eigen::Matrix4cd::Identity()); }

ModeTransform compose(const ModeTransform& second, const ModeTransform& first) {
  return ModeTransform(second.matrix() * first.matrix());
}

TwoPhotonState encode_qubit_pair(const PureState& pair) {
  if (pair.dim() != 4) throw DimensionError("encoding needs a two-qubit state");
  std::array<Complex, kPairStates> c{};
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t y = 0; y < 2; ++y) {
      // qubit 1 in mode (a, x), qubit 2 in mode (b, y); always distinct modes
      c[pair_index(x, 2 + y)] = pair[2 * x + y];
    }
  }
  return TwoPhotonState(c);
}

TwoPhotonState encode_letter(std::size_t index, const LetterBasis& basis) {
  if (index >= 4) throw InvalidArgument("letter index out of range");
  return encode_qubit_pair(basis.state(index));
}

ModeTransform analyzer_transform() {
  // Columns are input modes (aH, aV, bH, bV); rows are detectors D1..D4.
  // The splitter sends a -> (1 + 2)/sqrt2 and b -> (1 - 2)/sqrt2; each
  // polarizing splitter then routes H and V of its port to separate detectors.
  Eigen::Matrix4cd m;
  m << 1, 0, 1, 0,
       0, 1, 0, 1,
       1, 0, -1, 0,
       0, 1, 0, -1;
  return ModeTransform(m * kInvSqrt2);
}

TwoPhotonState apply_mode_transform(const TwoPhotonState& s, const ModeTransform& t) {
  const Eigen::Matrix4cd sym = to_symmetric(s);
  const Eigen::Matrix4cd out = t.matrix() * sym * t.matrix().transpose();
  return TwoPhotonState(from_symmetric(out));
}

ClickDistribution click_distribution(const TwoPhotonState& s) {
  ClickDistribution d{};
  for (std::size_t k = 0; k < kPairStates; ++k) d[k] = std::norm(s.amplitudes()[k]);
  return d;
}

ClickDistribution analyzer_distribution(const DensityMatrix& pair) {
  if (pair.dim() != 4) throw DimensionError("analyzer input must be a two-qubit state");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(pair.matrix());
  const auto analyzer = analyzer_transform();
  ClickDistribution d{};
  for (Eigen::Index k = 0; k < 4; ++k) {
    const double w = solver.eigenvalues()(k);
    if (w <= kEigenClip) continue;
    const auto vec = PureState::normalized(solver.eigenvectors().col(k));
    const auto out = click_distribution(apply_mode_transform(encode_qubit_pair(vec), analyzer));
    for (std::size_t p = 0; p < kPairStates; ++p) d[p] += w * out[p];
  }
  return d;
}

std::array<double, kModes> single_photon_distribution(Mode mode, const ModeTransform& t) {
  std::array<double, kModes> d{};
  const auto col = static_cast<Eigen::Index>(mode);
  for (Eigen::Index k = 0; k < 4; ++k) d[static_cast<std::size_t>(k)] = std::norm(t.matrix()(k, col));
  return d;
}

std::optional<std::size_t> discriminate(ClickPattern c) {
  const auto a = c.first;
  const auto b = c.second;
  if (a == b) {
    if (a == 0 || a == 2) return 0;  // D1D1, D3D3
    return 3;                        // D2D2, D4D4
  }
  if ((a == 0 && b == 1) || (a == 2 && b == 3)) return 1;  // D1D2, D3D4
  if ((a == 1 && b == 2) || (a == 0 && b == 3)) return 2;  // D2D3, D1D4
  return std::nullopt;                                     // D1D3, D2D4
}

ClickPattern sample_click(const ClickDistribution& dist, Rng& rng) {
  return ClickPattern::at(sample_index(dist, rng));
}

std::optional<PatternDecoder> PatternDecoder::for_basis(const LetterBasis& basis) {
  PatternDecoder decoder;
  const auto analyzer = analyzer_transform();
  for (std::size_t i = 0; i < 4; ++i) {
    decoder.letter_dists_[i] =
        click_distribution(apply_mode_transform(encode_letter(i, basis), analyzer));
  }
  for (std::size_t p = 0; p < kPairStates; ++p) {
    for (std::size_t i = 0; i < 4; ++i) {
      if (decoder.letter_dists_[i][p] <= kSupportTolerance) continue;
      if (decoder.table_[p].has_value()) return std::nullopt;  // two letters share a pattern
      decoder.table_[p] = i;
    }
  }
  return decoder;
}

}  // namespace hqkd
