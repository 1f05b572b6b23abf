#include "hqkd/basisclass.hpp"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "hqkd/errors.hpp"
#include "support/generators.hpp"

namespace hqkd {
namespace {

PureState two_qubit(Complex a, Complex b, Complex c, Complex d) {
  CVector v(4);
  v << a, b, c, d;
  return PureState::normalized(v);
}

// Completes (cos t |00> + sin t |11>) to an orthonormal basis with two products.
LetterBasis partially_entangled(double t) {
  return LetterBasis({two_qubit(std::cos(t), 0, 0, std::sin(t)), two_qubit(0, 1, 0, 0),
                      two_qubit(0, 0, 1, 0), two_qubit(-std::sin(t), 0, 0, std::cos(t))});
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

LetterBasis transform(const LetterBasis& basis, const UnitaryMap& u) {
  std::array<PureState, 4> out{basis.state(0), basis.state(1), basis.state(2), basis.state(3)};
  for (auto& s : out) s = apply_unitary(s, u, std::vector<int>{0, 1});
  return LetterBasis(out, basis.labels());
}

TEST(Labels, Bits) {
  EXPECT_EQ(label_bits(0), "00");
  EXPECT_EQ(label_bits(2), "10");
  EXPECT_EQ(label_bits(3), "11");
}

TEST(LetterBasis, RejectsNonOrthogonal) {
  const auto a = two_qubit(1, 0, 0, 0);
  EXPECT_THROW(LetterBasis({a, a, two_qubit(0, 0, 1, 0), two_qubit(0, 0, 0, 1)}), InvalidArgument);
}

TEST(LetterBasis, RejectsDuplicateLabels) {
  const auto b = LetterBasis::two_zero_two();
  EXPECT_THROW(LetterBasis(b.states(), {0, 1, 1, 3}), InvalidArgument);
}

TEST(Pnm, BuiltinBases) {
  EXPECT_EQ(classify_pnm(LetterBasis::two_zero_two()).code(), "202");
  EXPECT_EQ(classify_pnm(LetterBasis::bell()).code(), "004");
  EXPECT_EQ(classify_pnm(LetterBasis::four_product()).code(), "400");
}

TEST(Pnm, NonmaximalFamily) {
  const auto sig = classify_pnm(partially_entangled(M_PI / 6));
  EXPECT_EQ(sig.code(), "220");
  EXPECT_NEAR(sig.concurrences[0], 0.8660254037844386, 1e-12);
  EXPECT_EQ(sig.classes[0], EntanglementClass::nonmaximal);
  EXPECT_TRUE(sig.near_boundary.empty());
}

TEST(Pnm, NearBoundaryIsFlagged) {
  const auto sig = classify_pnm(partially_entangled(1e-7));
  EXPECT_EQ(sig.code(), "400");
  EXPECT_EQ(sig.near_boundary, (std::vector<std::size_t>{0, 3}));
}

TEST(Pnm, PermutationInvariant) {
  const auto b = LetterBasis::two_zero_two();
  std::array<std::size_t, 4> perm{0, 1, 2, 3};
  do {
    EXPECT_EQ(classify_pnm(b.permuted(perm)), classify_pnm(b));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST(Pnm, LocalUnitaryInvariant) {
  testing::Generator gen(77);
  const std::vector<LetterBasis> bases{LetterBasis::two_zero_two(), LetterBasis::bell(),
                                       LetterBasis::four_product(), partially_entangled(0.4)};
  for (const auto& b : bases) {
    for (int i = 0; i < 20; ++i) {
      const UnitaryMap u(kron(gen.unitary_matrix(2), gen.unitary_matrix(2)));
      EXPECT_EQ(classify_pnm(transform(b, u)), classify_pnm(b));
    }
  }
}

TEST(Mor, TwoZeroTwoPairs) {
  const auto report = mor_condition(LetterBasis::two_zero_two());
  ASSERT_EQ(report.pairs.size(), 6u);
  EXPECT_GE(report.satisfying_pairs(), 2u);
  for (const auto& p : report.pairs) {
    const bool expected = (p.i == 0 && p.j == 1) || (p.i == 0 && p.j == 2) ||
                          (p.i == 1 && p.j == 3) || (p.i == 2 && p.j == 3);
    EXPECT_EQ(p.satisfies, expected) << p.i << "," << p.j;
    if (p.i == 0 && p.j == 3) EXPECT_FALSE(p.first_nonorthogonal);
    if (p.i == 1 && p.j == 2) {
      EXPECT_TRUE(p.first_nonorthogonal);
      EXPECT_FALSE(p.first_nonidentical);
    }
  }
}

TEST(Mor, Symmetric) {
  testing::Generator gen(5);
  for (int i = 0; i < 50; ++i) {
    const auto a = gen.pure_state(2);
    const auto b = gen.pure_state(2);
    const auto ab = mor_pair(a, b);
    const auto ba = mor_pair(b, a);
    EXPECT_EQ(ab.first_nonorthogonal, ba.first_nonorthogonal);
    EXPECT_EQ(ab.first_nonidentical, ba.first_nonidentical);
    EXPECT_EQ(ab.second_nonorthogonal, ba.second_nonorthogonal);
    EXPECT_EQ(ab.satisfies, ba.satisfies);
  }
}

TEST(Screening, Verdicts) {
  EXPECT_EQ(screen_basis(LetterBasis::four_product()).verdict,
            ScreenVerdict::vulnerable_local_measurement);
  EXPECT_EQ(screen_basis(LetterBasis::bell()).verdict, ScreenVerdict::vulnerable_ancilla_swap);
  EXPECT_EQ(screen_basis(LetterBasis::two_zero_two()).verdict, ScreenVerdict::candidate_secure);
  EXPECT_EQ(verdict_name(ScreenVerdict::candidate_secure), "candidate-secure");
}

TEST(Builtin, Names) {
  EXPECT_TRUE(builtin_basis("202"));
  EXPECT_EQ(classify_pnm(*builtin_basis("004")).code(), "004");
  EXPECT_EQ(classify_pnm(*builtin_basis("bell")).code(), "004");
  EXPECT_EQ(classify_pnm(*builtin_basis("400")).code(), "400");
  EXPECT_FALSE(builtin_basis("040"));
}

TEST(BasisText, RoundTrip) {
  const auto b = LetterBasis::two_zero_two().permuted({2, 0, 3, 1});
  const auto back = parse_basis(format_basis(b));
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(std::abs(back.state(k).inner(b.state(k))), 1.0, 1e-12);
    EXPECT_EQ(back.label(k), b.label(k));
  }
}

TEST(BasisText, CommentsAndRenormalization) {
  const std::string text =
      "# product basis\n"
      "1 0 0 0 0 0 0 0   00\n"
      "0 0 1.0000001 0 0 0 0 0  01  # slightly long\n"
      "\n"
      "0 0 0 0 1 0 0 0 10\n"
      "0 0 0 0 0 0 1 0 11\n";
  const auto b = parse_basis(text);
  EXPECT_NEAR(b.state(1).amplitudes().norm(), 1.0, 1e-12);
  EXPECT_EQ(classify_pnm(b).code(), "400");
}

TEST(BasisText, Errors) {
  EXPECT_THROW(parse_basis("1 0 0 0 0 0 0 0\n"), ParseError);
  EXPECT_THROW(parse_basis("1 0 0 0 0 0 0\n0 0 1 0 0 0 0 0\n0 0 0 0 1 0 0 0\n0 0 0 0 0 0 1 0\n"),
               ParseError);
  EXPECT_THROW(parse_basis("2 0 0 0 0 0 0 0\n0 0 1 0 0 0 0 0\n0 0 0 0 1 0 0 0\n0 0 0 0 0 0 1 0\n"),
               ParseError);
  EXPECT_THROW(parse_basis("1 0 0 0 0 0 0 0 0x\n0 0 1 0 0 0 0 0\n0 0 0 0 1 0 0 0\n0 0 0 0 0 0 1 0\n"),
               ParseError);
}

}  // namespace
}  // namespace hqkd
