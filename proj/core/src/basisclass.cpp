#include "hqkd/basisclass.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "hqkd/errors.hpp"

namespace hqkd {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kParseNormSlack = 1e-6;
constexpr double kBandFloor = 1e-9;

PureState two_qubit(Complex hh, Complex hv, Complex vh, Complex vv) {
  CVector v(4);
  v << hh, hv, vh, vv;
  return PureState(std::move(v));
}

constexpr std::array<int, 1> kFirst{0};
constexpr std::array<int, 1> kSecond{1};

double overlap(const DensityMatrix& a, const DensityMatrix& b) {
  return (a.matrix() * b.matrix()).trace().real();
}

double max_abs_diff(const DensityMatrix& a, const DensityMatrix& b) {
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

}  // namespace

std::string label_bits(LetterLabel label) {
  std::string s = "00";
  s[0] = (label & 2U) ? '1' : '0';
  s[1] = (label & 1U) ? '1' : '0';
  return s;
}

LetterBasis::LetterBasis(std::array<PureState, 4> states, std::array<LetterLabel, 4> labels)
    : states_(std::move(states)), labels_(labels) {
  require_orthonormal(states_, 4);
  std::array<bool, 4> seen{};
  for (auto l : labels_) {
    if (l > 3 || seen[l]) throw InvalidArgument("letter labels must be a bijection onto 00..11");
    seen[l] = true;
  }
}

LetterBasis LetterBasis::two_zero_two() {
  return LetterBasis({two_qubit(1, 0, 0, 0), two_qubit(0, kInvSqrt2, kInvSqrt2, 0),
                      two_qubit(0, kInvSqrt2, -kInvSqrt2, 0), two_qubit(0, 0, 0, 1)});
}

LetterBasis LetterBasis::bell() {
  return LetterBasis({two_qubit(kInvSqrt2, 0, 0, kInvSqrt2), two_qubit(0, kInvSqrt2, kInvSqrt2, 0),
                      two_qubit(0, kInvSqrt2, -kInvSqrt2, 0),
                      two_qubit(kInvSqrt2, 0, 0, -kInvSqrt2)});
}

LetterBasis LetterBasis::four_product() {
  // |+1> = (|01> + |11>)/sqrt2, |-1> = (|01> - |11>)/sqrt2
  return LetterBasis({two_qubit(1, 0, 0, 0), two_qubit(0, 0, 1, 0),
                      two_qubit(0, kInvSqrt2, 0, kInvSqrt2),
                      two_qubit(0, kInvSqrt2, 0, -kInvSqrt2)});
}

LetterBasis LetterBasis::permuted(const std::array<std::size_t, 4>& perm) const {
  return LetterBasis({states_.at(perm[0]), states_.at(perm[1]), states_.at(perm[2]),
                      states_.at(perm[3])},
                     {labels_.at(perm[0]), labels_.at(perm[1]), labels_.at(perm[2]),
                      labels_.at(perm[3])});
}

LetterBasis parse_basis(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<PureState> states;
  std::vector<LetterLabel> labels;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    std::vector<std::string> tokens;
    for (std::string tok; row >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    const auto where = "basis line " + std::to_string(line_no) + ": ";
    if (tokens.size() != 8 && tokens.size() != 9) {
      throw ParseError(where + "expected 8 reals and an optional label, got " +
                       std::to_string(tokens.size()) + " fields");
    }
    CVector v(4);
    for (int k = 0; k < 4; ++k) {
      double re = 0.0, im = 0.0;
      try {
        std::size_t used_re = 0, used_im = 0;
        re = std::stod(tokens[2 * k], &used_re);
        im = std::stod(tokens[2 * k + 1], &used_im);
        if (used_re != tokens[2 * k].size() || used_im != tokens[2 * k + 1].size()) {
          throw std::invalid_argument("trailing characters");
        }
      } catch (const std::exception&) {
        throw ParseError(where + "amplitude is not a real number");
      }
      v(k) = Complex(re, im);
    }
    const double n2 = v.squaredNorm();
    if (std::abs(n2 - 1.0) > kParseNormSlack) {
      throw ParseError(where + "row is not normalized");
    }
    states.push_back(PureState(v / std::sqrt(n2)));
    if (tokens.size() == 9) {
      const auto& t = tokens[8];
      if (t.size() != 2 || (t[0] != '0' && t[0] != '1') || (t[1] != '0' && t[1] != '1')) {
        throw ParseError(where + "label must be a two-bit string");
      }
      labels.push_back(static_cast<LetterLabel>((t[0] - '0') * 2 + (t[1] - '0')));
    }
  }
  if (states.size() != 4) {
    throw ParseError("basis must contain exactly four rows, got " + std::to_string(states.size()));
  }
  if (!labels.empty() && labels.size() != 4) {
    throw ParseError("either every row or no row carries a label");
  }
  std::array<LetterLabel, 4> label_arr{0, 1, 2, 3};
  if (!labels.empty()) std::copy(labels.begin(), labels.end(), label_arr.begin());
  try {
    return LetterBasis({states[0], states[1], states[2], states[3]}, label_arr);
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("invalid basis: ") + e.what());
  }
}

std::string format_basis(const LetterBasis& basis) {
  std::string out = "# re(HH) im(HH) re(HV) im(HV) re(VH) im(VH) re(VV) im(VV) label\n";
  char buf[64];
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t k = 0; k < 4; ++k) {
      const auto a = basis.state(i)[k];
      std::snprintf(buf, sizeof buf, "%.17g %.17g ", a.real(), a.imag());
      out += buf;
    }
    out += label_bits(basis.label(i));
    out += '\n';
  }
  return out;
}

std::optional<LetterBasis> builtin_basis(std::string_view name) {
  if (name == "202") return LetterBasis::two_zero_two();
  if (name == "bell" || name == "004") return LetterBasis::bell();
  if (name == "400") return LetterBasis::four_product();
  return std::nullopt;
}

std::string PnmSignature::code() const {
  return std::to_string(p) + std::to_string(n) + std::to_string(m);
}

PnmSignature classify_pnm(const LetterBasis& basis) {
  PnmSignature sig;
  for (std::size_t i = 0; i < 4; ++i) {
    const double c = concurrence(basis.state(i));
    sig.concurrences[i] = c;
    EntanglementClass cls;
    if (c < kProductThreshold) {
      cls = EntanglementClass::product;
      ++sig.p;
    } else if (c > 1.0 - kProductThreshold) {
      cls = EntanglementClass::maximal;
      ++sig.m;
    } else {
      cls = EntanglementClass::nonmaximal;
      ++sig.n;
    }
    sig.classes[i] = cls;
    const bool low_band = c > kBandFloor && c < kProductThreshold;
    const bool high_band = c > 1.0 - kProductThreshold && c < 1.0 - kBandFloor;
    if (low_band || high_band) sig.near_boundary.push_back(i);
  }
  return sig;
}

MorPair mor_pair(const PureState& a, const PureState& b) {
  if (a.dim() != 4 || b.dim() != 4) throw DimensionError("Mor predicate needs two-qubit letters");
  const auto a1 = reduced_density(a, kFirst);
  const auto b1 = reduced_density(b, kFirst);
  const auto a2 = reduced_density(a, kSecond);
  const auto b2 = reduced_density(b, kSecond);

  MorPair pair;
  pair.first_nonorthogonal = overlap(a1, b1) > kStateTolerance;
  pair.first_nonidentical = max_abs_diff(a1, b1) > kStateTolerance;
  pair.second_nonorthogonal = overlap(a2, b2) > kStateTolerance;
  pair.satisfies = pair.first_nonorthogonal && pair.first_nonidentical && pair.second_nonorthogonal;
  return pair;
}

std::size_t MorReport::satisfying_pairs() const {
  std::size_t n = 0;
  for (const auto& p : pairs) n += p.satisfies ? 1 : 0;
  return n;
}

MorReport mor_condition(const LetterBasis& basis) {
  MorReport report;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      auto pair = mor_pair(basis.state(i), basis.state(j));
      pair.i = i;
      pair.j = j;
      report.pairs.push_back(pair);
    }
  }
  return report;
}

std::string verdict_name(ScreenVerdict v) {
  switch (v) {
    case ScreenVerdict::vulnerable_local_measurement: return "vulnerable-to-local-measurement";
    case ScreenVerdict::vulnerable_ancilla_swap: return "vulnerable-to-ancilla-swap";
    case ScreenVerdict::candidate_secure: return "candidate-secure";
  }
  return "candidate-secure";
}

ScreeningReport screen_basis(const LetterBasis& basis) {
  ScreeningReport report;
  report.signature = classify_pnm(basis);
  report.mor = mor_condition(basis);
  const auto& s = report.signature;
  if (s.p == 4) {
    report.verdict = ScreenVerdict::vulnerable_local_measurement;
  } else if (s.m == 4) {
    report.verdict = ScreenVerdict::vulnerable_ancilla_swap;
  } else {
    report.verdict = ScreenVerdict::candidate_secure;
  }
  return report;
}

}  // namespace hqkd
