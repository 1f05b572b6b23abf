#pragma once

// End-to-end key distribution run: channel geometry check, per-step
// prepare / attack / analyze, public test of a random subset, and the
// detection-probability curve.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hqkd/attacks.hpp"
#include "hqkd/basisclass.hpp"
#include "hqkd/infotheory.hpp"
#include "hqkd/optics.hpp"

namespace hqkd {

struct TimingParams {
  double path_length = 100.0;  // L
  double ring_length = 60.0;   // l, must exceed L/2
  double speed = 1.0;
};

struct TimingEvent {
  std::string label;
  double time = 0.0;
};

struct Interval {
  double begin = 0.0;
  double end = 0.0;
};

struct TimingSchedule {
  std::vector<TimingEvent> events;  // sorted by time, ties in insertion order
  double analyzer_time = 0.0;       // both qubits reach Bob's analyzer
  Interval eve_holds_qubit1;        // qubit 1 in the unprotected path
  Interval eve_holds_qubit2;        // qubit 2 in the unprotected path
};

// Throws SequentialAccessViolation when l <= L/2 and InvalidArgument for
// non-positive lengths or speed.
TimingSchedule timing_schedule(const TimingParams& t);

enum class AnalyzerMode { automatic, optics, projective };

std::string analyzer_name(AnalyzerMode m);
AnalyzerMode parse_analyzer(std::string_view name);

struct ProtocolConfig {
  std::uint64_t steps = 1000;
  LetterBasis basis = LetterBasis::two_zero_two();
  AttackStrategy attack = no_attack();
  double test_fraction = 0.5;
  std::uint64_t seed = 42;
  TimingParams timing;
  // automatic picks the linear-optics analyzer whenever it separates the
  // alphabet and falls back to an ideal letter-basis measurement otherwise.
  AnalyzerMode analyzer = AnalyzerMode::automatic;
  unsigned threads = 1;
};

struct StepRecord {
  std::uint64_t step = 0;
  std::size_t sent = 0;                   // letter index
  std::optional<ClickPattern> pattern;    // absent under the projective analyzer
  std::optional<std::size_t> inferred;    // absent on a reject pattern
  bool tested = false;
  bool mismatch = false;
  std::size_t eve_guess = 0;
};

struct Announcement {
  std::string topic;
  std::string payload;
};

// Public, append-only record of everything sent over the classical channel.
class ClassicalChannel {
 public:
  void announce(std::string topic, std::string payload);
  const std::vector<Announcement>& transcript() const noexcept { return log_; }

 private:
  std::vector<Announcement> log_;
};

struct RunSummary {
  std::uint64_t steps = 0;
  std::string alice_key;  // untested bits, '0'/'1'
  std::string bob_key;
  std::uint64_t tested_pairs = 0;
  std::uint64_t mismatches = 0;
  bool eavesdropper_detected = false;
  std::uint64_t eve_correct_guesses = 0;
  ProtocolCost cost;
  EfficiencyResult efficiency;
  AnalyzerMode analyzer = AnalyzerMode::optics;
  TimingSchedule schedule;
  ClassicalChannel channel;
};

struct ProtocolRun {
  RunSummary summary;
  std::vector<StepRecord> steps;
};

ProtocolRun run_protocol(const ProtocolConfig& config);

// Entry N-1 is 1 - (1 - p)^N for N = 1..n_max.
std::vector<double> detection_curve(double p, std::size_t n_max);

// CSV: header, then step,letter,pattern,inferred,tested,mismatch per line.
void write_transcript(std::ostream& out, const LetterBasis& basis,
                      const std::vector<StepRecord>& steps);
// "key = value" lines in a fixed order.
void write_summary(std::ostream& out, const RunSummary& summary);

}  // namespace hqkd
