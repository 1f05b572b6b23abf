#include "hqkd/protocol.hpp"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "hqkd/errors.hpp"

namespace hqkd {
namespace {

TEST(Timing, DefaultGeometry) {
  const auto s = timing_schedule({100, 60, 1});
  EXPECT_DOUBLE_EQ(s.analyzer_time, 160.0);
  EXPECT_DOUBLE_EQ(s.eve_holds_qubit1.begin, 0.0);
  EXPECT_DOUBLE_EQ(s.eve_holds_qubit1.end, 100.0);
  EXPECT_DOUBLE_EQ(s.eve_holds_qubit2.begin, 60.0);
  EXPECT_DOUBLE_EQ(s.eve_holds_qubit2.end, 160.0);
  for (std::size_t k = 1; k < s.events.size(); ++k) {
    EXPECT_LE(s.events[k - 1].time, s.events[k].time);
  }
}

TEST(Timing, RingLengthBoundary) {
  EXPECT_THROW(timing_schedule({100, 50, 1}), SequentialAccessViolation);
  EXPECT_THROW(timing_schedule({100, 10, 1}), SequentialAccessViolation);
  EXPECT_DOUBLE_EQ(timing_schedule({100, 100, 1}).analyzer_time, 200.0);
  EXPECT_DOUBLE_EQ(timing_schedule({100, 60, 2}).analyzer_time, 80.0);
  EXPECT_THROW(timing_schedule({0, 60, 1}), InvalidArgument);
  EXPECT_THROW(timing_schedule({100, 60, 0}), InvalidArgument);
}

TEST(Protocol, NoAttackInvariants) {
  for (std::uint64_t seed : {1u, 2u, 42u, 1234u}) {
    ProtocolConfig cfg;
    cfg.steps = 1000;
    cfg.seed = seed;
    const auto run = run_protocol(cfg);
    const auto& s = run.summary;
    EXPECT_EQ(s.analyzer, AnalyzerMode::optics);
    EXPECT_EQ(s.mismatches, 0u);
    EXPECT_FALSE(s.eavesdropper_detected);
    EXPECT_EQ(s.tested_pairs, 500u);
    EXPECT_EQ(s.alice_key, s.bob_key);
    EXPECT_EQ(s.alice_key.size(), 1000u);
    EXPECT_EQ(s.efficiency.value, 1.0);
  }
}

TEST(Protocol, TestFractionRounding) {
  ProtocolConfig cfg;
  cfg.steps = 7;
  cfg.test_fraction = 0.3;
  EXPECT_EQ(run_protocol(cfg).summary.tested_pairs, 3u);
  cfg.test_fraction = 0.0;
  EXPECT_EQ(run_protocol(cfg).summary.tested_pairs, 0u);
  cfg.test_fraction = 1.0;
  const auto all = run_protocol(cfg);
  EXPECT_EQ(all.summary.tested_pairs, 7u);
  EXPECT_TRUE(all.summary.alice_key.empty());
  cfg.test_fraction = 1.5;
  EXPECT_THROW(run_protocol(cfg), InvalidArgument);
  cfg.test_fraction = 0.5;
  cfg.steps = 0;
  EXPECT_THROW(run_protocol(cfg), InvalidArgument);
}

TEST(Protocol, ReproducibleAcrossThreadCounts) {
  ProtocolConfig cfg;
  cfg.steps = 2000;
  cfg.attack = ancilla_swap();
  cfg.seed = 99;
  const auto a = run_protocol(cfg);
  cfg.threads = 4;
  const auto b = run_protocol(cfg);
  EXPECT_EQ(a.summary.alice_key, b.summary.alice_key);
  EXPECT_EQ(a.summary.bob_key, b.summary.bob_key);
  EXPECT_EQ(a.summary.mismatches, b.summary.mismatches);
  std::ostringstream ta, tb;
  write_transcript(ta, cfg.basis, a.steps);
  write_transcript(tb, cfg.basis, b.steps);
  EXPECT_EQ(ta.str(), tb.str());
}

TEST(Protocol, SeedChangesTheRun) {
  ProtocolConfig cfg;
  cfg.steps = 200;
  const auto a = run_protocol(cfg);
  cfg.seed = 43;
  EXPECT_NE(a.summary.alice_key, run_protocol(cfg).summary.alice_key);
}

TEST(Protocol, BellAlphabetUnderAncillaSwapGoesUnnoticed) {
  ProtocolConfig cfg;
  cfg.steps = 10000;
  cfg.basis = LetterBasis::bell();
  cfg.attack = ancilla_swap();
  cfg.test_fraction = 1.0;
  const auto run = run_protocol(cfg);
  EXPECT_EQ(run.summary.analyzer, AnalyzerMode::projective);
  EXPECT_EQ(run.summary.mismatches, 0u);
  EXPECT_EQ(run.summary.eve_correct_guesses, cfg.steps);
  for (const auto& r : run.steps) EXPECT_EQ(r.eve_guess, r.sent);
}

TEST(Protocol, ProductAlphabetUnderLocalMeasurementGoesUnnoticed) {
  ProtocolConfig cfg;
  cfg.steps = 10000;
  cfg.basis = LetterBasis::four_product();
  cfg.attack = local_measure_qubit2();
  const auto run = run_protocol(cfg);
  EXPECT_EQ(run.summary.mismatches, 0u);
  EXPECT_EQ(run.summary.alice_key, run.summary.bob_key);
}

TEST(Protocol, AncillaSwapOnTwoZeroTwoIsDetected) {
  ProtocolConfig cfg;
  cfg.steps = 10000;
  cfg.attack = ancilla_swap();
  cfg.test_fraction = 1.0;
  const auto run = run_protocol(cfg);
  const double n = static_cast<double>(run.summary.tested_pairs);
  const double p = 0.25;
  EXPECT_LE(std::abs(static_cast<double>(run.summary.mismatches) - n * p),
            3 * std::sqrt(n * p * (1 - p)));
  EXPECT_TRUE(run.summary.eavesdropper_detected);
}

TEST(Protocol, CatalogMismatchRatesMatchExactStats) {
  for (const auto& basis : {LetterBasis::two_zero_two(), LetterBasis::bell(), LetterBasis::four_product()}) {
    for (const auto& attack : catalog()) {
      ProtocolConfig cfg;
      cfg.steps = 100000;
      cfg.basis = basis;
      cfg.attack = attack;
      cfg.test_fraction = 1.0;
      cfg.seed = 17;
      const auto s = run_protocol(cfg).summary;
      const double p = exact_eve_stats(basis, attack).detect_prob;
      const double n = static_cast<double>(s.tested_pairs);
      const double sigma = std::sqrt(n * p * (1 - p));
      EXPECT_LE(std::abs(static_cast<double>(s.mismatches) - n * p), 3 * sigma + 1e-9)
          << classify_pnm(basis).code() << " / " << attack.name() << ": " << s.mismatches << " vs " << n * p;
    }
  }
}

TEST(Protocol, OpticsAnalyzerRefusesInseparableAlphabet) {
  ProtocolConfig cfg;
  cfg.steps = 10;
  cfg.basis = LetterBasis::bell();
  cfg.analyzer = AnalyzerMode::optics;
  EXPECT_THROW(run_protocol(cfg), InvalidArgument);
}

TEST(Protocol, ChannelAnnouncements) {
  ProtocolConfig cfg;
  cfg.steps = 10;
  const auto run = run_protocol(cfg);
  const auto& log = run.summary.channel.transcript();
  ASSERT_EQ(log.size(), 4u);
  EXPECT_EQ(log[0].topic, "timing");
  EXPECT_EQ(log[0].payload, "arrival=160;pair_delay=160");
  EXPECT_EQ(log[1].topic, "test-indices");
  EXPECT_EQ(log[2].payload.size(), 10u);  // five tested letters, two bits each
  EXPECT_EQ(log[2].payload, log[3].payload);
}

TEST(Protocol, TransportGeometryIsChecked) {
  ProtocolConfig cfg;
  cfg.timing.ring_length = 40;
  EXPECT_THROW(run_protocol(cfg), SequentialAccessViolation);
}

TEST(DetectionCurve, ClosedForms) {
  const auto quarter = detection_curve(0.25, 64);
  const auto three_quarters = detection_curve(0.75, 64);
  ASSERT_EQ(quarter.size(), 64u);
  for (std::size_t n = 1; n <= 64; ++n) {
    EXPECT_EQ(quarter[n - 1], 1.0 - std::pow(0.75, static_cast<double>(n)));
    EXPECT_EQ(three_quarters[n - 1], 1.0 - std::pow(0.5, 2.0 * static_cast<double>(n)));
    if (n > 1) EXPECT_GE(quarter[n - 1], quarter[n - 2]);
  }
  EXPECT_TRUE(detection_curve(0.5, 0).empty());
  EXPECT_EQ(detection_curve(0.0, 3), (std::vector<double>{0, 0, 0}));
  EXPECT_THROW(detection_curve(-0.1, 3), InvalidArgument);
  EXPECT_THROW(detection_curve(1.1, 3), InvalidArgument);
}

TEST(Reports, TranscriptAndSummaryFormat) {
  ProtocolConfig cfg;
  cfg.steps = 4;
  const auto run = run_protocol(cfg);
  std::ostringstream t;
  write_transcript(t, cfg.basis, run.steps);
  std::istringstream lines(t.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "step,letter,pattern,inferred,tested,mismatch");
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5);
  }
  EXPECT_EQ(rows, 4u);

  std::ostringstream s;
  write_summary(s, run.summary);
  EXPECT_NE(s.str().find("efficiency = 1\n"), std::string::npos);
  EXPECT_NE(s.str().find("keys_equal = true\n"), std::string::npos);
}

}  // namespace
}  // namespace hqkd
