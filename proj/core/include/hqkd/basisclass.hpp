#pragma once

// Four-letter two-qubit alphabets: construction, pnm classification, the
// pairwise Mor predicate, and vulnerability screening.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hqkd/qstate.hpp"

namespace hqkd {

// Two-bit label carried by a letter, 0b00..0b11.
using LetterLabel = std::uint8_t;

std::string label_bits(LetterLabel label);  // "00".."11"

class LetterBasis {
 public:
  // Validates four normalized, mutually orthogonal dim-4 states and a label
  // bijection onto {00, 01, 10, 11}.
  LetterBasis(std::array<PureState, 4> states, std::array<LetterLabel, 4> labels = {0, 1, 2, 3});

  // |HH>, (|HV>+|VH>)/sqrt2, (|HV>-|VH>)/sqrt2, |VV>
  static LetterBasis two_zero_two();
  // Phi+, Psi+, Psi-, Phi-
  static LetterBasis bell();
  // |00>, |10>, |+1>, |-1>
  static LetterBasis four_product();

  const std::array<PureState, 4>& states() const noexcept { return states_; }
  const std::array<LetterLabel, 4>& labels() const noexcept { return labels_; }
  const PureState& state(std::size_t i) const { return states_.at(i); }
  LetterLabel label(std::size_t i) const { return labels_.at(i); }

  // Reorders letters and labels together: result letter k = this letter perm[k].
  LetterBasis permuted(const std::array<std::size_t, 4>& perm) const;

 private:
  std::array<PureState, 4> states_;
  std::array<LetterLabel, 4> labels_;
};

// Text format: four non-comment rows of eight reals, the interleaved real and
// imaginary amplitudes on |HH>, |HV>, |VH>, |VV>, optionally followed by a
// two-bit label. '#' starts a comment. Rows within 1e-6 of unit norm are
// renormalized; anything further off is rejected.
LetterBasis parse_basis(std::string_view text);
std::string format_basis(const LetterBasis& basis);

// Built-in names ("202", "bell"/"004", "400") or nullopt.
std::optional<LetterBasis> builtin_basis(std::string_view name);

enum class EntanglementClass { product, nonmaximal, maximal };

struct PnmSignature {
  int p = 0;
  int n = 0;
  int m = 0;
  std::array<double, 4> concurrences{};
  std::array<EntanglementClass, 4> classes{};
  // Letters whose concurrence falls inside a threshold band
  // (1e-9 < C < 1e-6 or 1 - 1e-6 < C < 1 - 1e-9).
  std::vector<std::size_t> near_boundary;

  std::string code() const;  // e.g. "202"
  bool operator==(const PnmSignature& o) const { return p == o.p && n == o.n && m == o.m; }
};

inline constexpr double kProductThreshold = 1e-6;

PnmSignature classify_pnm(const LetterBasis& basis);

struct MorPair {
  std::size_t i = 0;
  std::size_t j = 0;
  bool first_nonorthogonal = false;
  bool first_nonidentical = false;
  bool second_nonorthogonal = false;
  bool satisfies = false;
};

struct MorReport {
  std::vector<MorPair> pairs;  // the six pairs i < j
  std::size_t satisfying_pairs() const;
};

// Pairwise predicate for two two-qubit letters.
MorPair mor_pair(const PureState& a, const PureState& b);
MorReport mor_condition(const LetterBasis& basis);

enum class ScreenVerdict { vulnerable_local_measurement, vulnerable_ancilla_swap, candidate_secure };

std::string verdict_name(ScreenVerdict v);

struct ScreeningReport {
  ScreenVerdict verdict = ScreenVerdict::candidate_secure;
  PnmSignature signature;
  MorReport mor;
};

ScreeningReport screen_basis(const LetterBasis& basis);

}  // namespace hqkd
