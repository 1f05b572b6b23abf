#pragma once

// Eavesdropping strategies under sequential access, and their exact
// information gain / detection statistics.
//
// An attack is a pair of stage programs. Stage 1 sees travel qubit 1 and
// Eve's ancillas and must forward one of them to Bob; only then does stage 2
// see travel qubit 2 (plus whatever Eve kept) and forward a second qubit.
// Construction validates that no step reaches outside its stage.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hqkd/basisclass.hpp"
#include "hqkd/qstate.hpp"
#include "hqkd/rng.hpp"

namespace hqkd {

// Register order is travel1, travel2, ancilla1, ancilla2 (ancillas only when
// declared); travel1/travel2 carry Alice's qubits 1 and 2.
enum class Wire : std::uint8_t { travel1 = 0, travel2 = 1, ancilla1 = 2, ancilla2 = 3 };

std::string wire_name(Wire w);

struct GateStep {
  std::vector<Wire> targets;
  UnitaryMap gate;
};

struct MeasureStep {
  std::vector<Wire> targets;
  std::vector<PureState> basis;
  // Either empty or one optional feed-forward gate per outcome.
  std::vector<std::optional<GateStep>> corrections;
};

using Step = std::variant<GateStep, MeasureStep>;

struct Stage {
  std::vector<Step> steps;
  Wire forward = Wire::travel1;
};

class AttackStrategy {
 public:
  // Throws SequentialAccessViolation if a step touches travel2 in stage 1 or
  // a forwarded qubit afterwards; InvalidArgument/DimensionError for other
  // malformed programs.
  AttackStrategy(std::string name, std::optional<PureState> ancilla, Stage stage1, Stage stage2,
                 std::vector<MeasureStep> final_measurements = {});

  const std::string& name() const noexcept { return name_; }
  const std::optional<PureState>& ancilla() const noexcept { return ancilla_; }
  const Stage& stage1() const noexcept { return stage1_; }
  const Stage& stage2() const noexcept { return stage2_; }
  const std::vector<MeasureStep>& final_measurements() const noexcept { return final_; }

  int ancilla_qubits() const noexcept { return ancilla_ ? ancilla_->qubits() : 0; }
  int register_qubits() const noexcept { return 2 + ancilla_qubits(); }
  int position(Wire w) const;
  // Register positions of the qubits Bob receives, in (qubit 1, qubit 2) order.
  std::array<int, 2> bob_positions() const;

 private:
  std::string name_;
  std::optional<PureState> ancilla_;
  Stage stage1_;
  Stage stage2_;
  std::vector<MeasureStep> final_;
};

// Single-qubit measurement basis {cos t|0> + e^{i p} sin t|1>, -e^{-i p} sin t|0> + cos t|1>}
// with t = theta_deg and p = phi_deg in degrees.
struct LocalBasisSpec {
  double theta_deg = 0.0;
  double phi_deg = 0.0;

  std::array<PureState, 2> states() const;
  std::string str() const;
  friend bool operator==(const LocalBasisSpec&, const LocalBasisSpec&) = default;
};

AttackStrategy no_attack();
// Lets qubit 1 pass, measures qubit 2 in {|0>, |1>} and resends the eigenstate.
AttackStrategy local_measure_qubit2();
// Substitutes half of a Phi+ ancilla pair for qubit 1, Bell-measures the
// travel qubits once both are held, and corrects the second ancilla so that
// Bob's pair matches the measured state. `measurement` must consist of
// maximally entangled states (default: the Bell basis).
AttackStrategy ancilla_swap(const std::optional<LetterBasis>& measurement = std::nullopt);
// Measures each travel qubit in a local basis (nullopt = let it pass) and
// resends the collapsed qubit.
AttackStrategy intercept_resend(const std::optional<LocalBasisSpec>& qubit1,
                                const std::optional<LocalBasisSpec>& qubit2);

std::vector<AttackStrategy> catalog();

// "none", "local-measure-q2", "ancilla-swap",
// "intercept-resend,<q1>,<q2>" with each qubit "none", "<theta>" or "<theta>/<phi>".
AttackStrategy parse_attack(std::string_view spec);

using MeasurementRecord = std::vector<std::uint8_t>;

struct GuessEntry {
  MeasurementRecord record;
  double probability = 0.0;  // P(record), letters equiprobable
  std::size_t guess = 0;     // maximum-likelihood letter index
};

struct EveStats {
  double info_gain = 0.0;    // I(letter : Eve's guess), bits
  double detect_prob = 0.0;  // P(Bob's letter != Alice's letter) per tested pair
  Eigen::Matrix4d bob_given_letter = Eigen::Matrix4d::Zero();    // row: sent, col: Bob
  Eigen::Matrix4d guess_given_letter = Eigen::Matrix4d::Zero();  // row: sent, col: guess
  std::vector<GuessEntry> guess_table;

  // Guess for a record; unseen records fall back to the letter labelled 00.
  std::size_t guess_for(const MeasurementRecord& record) const;
  std::size_t fallback_guess = 0;
};

// One measurement branch of Eve's program for a fixed input.
struct AttackBranch {
  double probability = 0.0;
  PureState state;
  MeasurementRecord record;
};

// Every branch with probability above 1e-14, in outcome order.
std::vector<AttackBranch> enumerate_branches(const AttackStrategy& attack, const PureState& letter);

// One sampled branch (probability field holds the branch probability).
AttackBranch sample_branch(const AttackStrategy& attack, const PureState& letter, Rng& rng);

EveStats exact_eve_stats(const LetterBasis& basis, const AttackStrategy& attack);

// --- Intercept-resend sweeps -----------------------------------------------

struct InterceptGrid {
  std::vector<std::optional<LocalBasisSpec>> qubit1;
  std::vector<std::optional<LocalBasisSpec>> qubit2;
};

// "q1=<items>;q2=<items>" where items are comma separated "none", "<theta>",
// "<theta>/<phi>" or a range "<from>:<to>:<step>" (degrees, inclusive).
InterceptGrid parse_grid(std::string_view spec);

struct SweepPoint {
  std::optional<LocalBasisSpec> qubit1;
  std::optional<LocalBasisSpec> qubit2;
  EveStats stats;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // qubit1-major grid order
  std::size_t best_info = 0;       // first argmax of info_gain
  std::size_t least_detect = 0;    // first argmin of detect_prob
  std::size_t most_detect = 0;     // first argmax of detect_prob
};

SweepResult strategy_sweep(const LetterBasis& basis, const InterceptGrid& grid,
                           unsigned threads = 1);

// Screening verdict together with the exact stats of the two canonical attacks.
struct AttackedScreening {
  ScreeningReport screening;
  EveStats local_measurement;
  EveStats ancilla_swap;
};

AttackedScreening screen_with_attacks(const LetterBasis& basis);

}  // namespace hqkd
