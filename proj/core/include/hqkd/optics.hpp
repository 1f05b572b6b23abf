#pragma once

// Two photons in four optical modes, and Bob's linear-optics letter analyzer:
// a 50/50 beam splitter mixing ports a and b, a polarizing beam splitter on
// each output port, and four detectors.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "hqkd/basisclass.hpp"
#include "hqkd/qstate.hpp"
#include "hqkd/rng.hpp"

namespace hqkd {

// Canonical mode order (aH, aV, bH, bV). Qubit 1 travels in port a, qubit 2
// in port b; the qubit value selects the polarization (0 = H, 1 = V).
enum class Mode : std::uint8_t { aH = 0, aV = 1, bH = 2, bV = 3 };

// Detector k (0-based) is D(k+1): D1 = port-1 H, D2 = port-1 V,
// D3 = port-2 H, D4 = port-2 V.
inline constexpr std::size_t kModes = 4;
inline constexpr std::size_t kPairStates = 10;

// Unordered pair of mode/detector indices, first <= second.
struct ClickPattern {
  std::uint8_t first = 0;
  std::uint8_t second = 0;

  static ClickPattern of(std::size_t a, std::size_t b);
  // Position in the canonical order (0,0),(0,1),(0,2),(0,3),(1,1),...,(3,3).
  std::size_t index() const noexcept;
  static ClickPattern at(std::size_t index);
  bool doubled() const noexcept { return first == second; }
  std::string str() const;  // "D1D2"

  friend auto operator<=>(const ClickPattern&, const ClickPattern&) = default;
};

// Probability per pattern, indexed by ClickPattern::index().
using ClickDistribution = std::array<double, kPairStates>;

// Amplitudes over the normalized occupation states |1_i 1_j> (i < j) and
// |2_i>, indexed like ClickPattern. Click probabilities are the squared
// magnitudes.
class TwoPhotonState {
 public:
  explicit TwoPhotonState(std::array<Complex, kPairStates> amplitudes);

  const std::array<Complex, kPairStates>& amplitudes() const noexcept { return amplitudes_; }
  Complex amplitude(ClickPattern p) const { return amplitudes_[p.index()]; }

 private:
  std::array<Complex, kPairStates> amplitudes_;
};

// Single-photon mode map: column m holds the output amplitudes of mode m.
class ModeTransform {
 public:
  explicit ModeTransform(Eigen::Matrix4cd matrix);

  static ModeTransform identity();
  const Eigen::Matrix4cd& matrix() const noexcept { return matrix_; }

  // (second after first)
  friend ModeTransform compose(const ModeTransform& second, const ModeTransform& first);

 private:
  Eigen::Matrix4cd matrix_;
};

// Maps a two-qubit polarization state into port a (qubit 1) and port b (qubit 2).
TwoPhotonState encode_qubit_pair(const PureState& pair);
TwoPhotonState encode_letter(std::size_t index, const LetterBasis& basis);

ModeTransform analyzer_transform();

// Second-quantized action of `t` on both photons.
TwoPhotonState apply_mode_transform(const TwoPhotonState& s, const ModeTransform& t);

ClickDistribution click_distribution(const TwoPhotonState& s);

// Detector statistics of the analyzer for a (possibly mixed) qubit pair.
ClickDistribution analyzer_distribution(const DensityMatrix& pair);

// Output distribution over D1..D4 for one photon entering `mode`.
std::array<double, kModes> single_photon_distribution(Mode mode, const ModeTransform& t);

// Click pattern -> index in the 202 alphabet, nullopt for reject.
std::optional<std::size_t> discriminate(ClickPattern c);

ClickPattern sample_click(const ClickDistribution& dist, Rng& rng);

// Pattern-to-letter table for an arbitrary alphabet. Exists only when the
// analyzer separates the four letters with certainty.
class PatternDecoder {
 public:
  static std::optional<PatternDecoder> for_basis(const LetterBasis& basis);

  std::optional<std::size_t> decode(ClickPattern c) const { return table_[c.index()]; }

  // Per-letter click distributions after the analyzer.
  const std::array<ClickDistribution, 4>& letter_distributions() const noexcept {
    return letter_dists_;
  }

 private:
  std::array<std::optional<std::size_t>, kPairStates> table_{};
  std::array<ClickDistribution, 4> letter_dists_{};
};

}  // namespace hqkd
