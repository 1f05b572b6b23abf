#include "hqkd/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

#include "hqkd/errors.hpp"
#include "hqkd/infotheory.hpp"
#include "parallel.hpp"

namespace hqkd {
namespace {

constexpr double kBranchFloor = 1e-14;
constexpr double kTieTolerance = 1e-12;

std::vector<int> positions_of(const AttackStrategy& a, const std::vector<Wire>& wires) {
  std::vector<int> out;
  out.reserve(wires.size());
  for (auto w : wires) out.push_back(a.position(w));
  return out;
}

// --- validation --------------------------------------------------------------

struct StageScope {
  int stage;
  std::set<Wire> allowed;
  std::set<Wire> forwarded;
};

void check_targets(const std::vector<Wire>& targets, const StageScope& scope) {
  if (targets.empty()) throw InvalidArgument("attack step has no target qubits");
  std::set<Wire> seen;
  for (auto w : targets) {
    if (!seen.insert(w).second) throw InvalidArgument("attack step lists a qubit twice");
    if (scope.forwarded.contains(w)) {
      throw SequentialAccessViolation("stage " + std::to_string(scope.stage) + " touches " +
                                      wire_name(w) + " after it was forwarded to Bob");
    }
    if (scope.stage == 1 && w == Wire::travel2) {
      throw SequentialAccessViolation(
          "stage 1 touches travel qubit 2 before travel qubit 1 is forwarded");
    }
    if (!scope.allowed.contains(w)) {
      throw InvalidArgument("attack step references undeclared " + wire_name(w));
    }
  }
}

void check_gate(const GateStep& g, const StageScope& scope) {
  check_targets(g.targets, scope);
  if (g.gate.dim() != (std::size_t{1} << g.targets.size())) {
    throw DimensionError("gate dimension does not match its targets");
  }
}

void check_measure(const MeasureStep& m, const StageScope& scope) {
  check_targets(m.targets, scope);
  const std::size_t dim = std::size_t{1} << m.targets.size();
  require_orthonormal(m.basis, dim);
  if (m.basis.size() != dim) throw InvalidArgument("measurement basis is incomplete");
  if (!m.corrections.empty() && m.corrections.size() != m.basis.size()) {
    throw InvalidArgument("corrections must be given for every outcome or none");
  }
  for (const auto& c : m.corrections) {
    if (c) check_gate(*c, scope);
  }
}

void check_stage(const Stage& stage, const StageScope& scope) {
  for (const auto& step : stage.steps) {
    std::visit(
        [&](const auto& s) {
          if constexpr (std::is_same_v<std::decay_t<decltype(s)>, GateStep>) {
            check_gate(s, scope);
          } else {
            check_measure(s, scope);
          }
        },
        step);
  }
  if (scope.forwarded.contains(stage.forward)) {
    throw SequentialAccessViolation("stage " + std::to_string(scope.stage) + " forwards " +
                                    wire_name(stage.forward) + " a second time");
  }
  if (scope.stage == 1 && stage.forward == Wire::travel2) {
    throw SequentialAccessViolation("stage 1 cannot forward travel qubit 2");
  }
  if (!scope.allowed.contains(stage.forward)) {
    throw InvalidArgument("stage forwards undeclared " + wire_name(stage.forward));
  }
}

// --- execution ---------------------------------------------------------------

struct Partial {
  double probability;
  PureState state;
  MeasurementRecord record;
};

PureState apply_gate(const AttackStrategy& a, const GateStep& g, const PureState& s) {
  const auto pos = positions_of(a, g.targets);
  return apply_unitary(s, g.gate, pos);
}

template <typename Chooser>
void run_measure(const AttackStrategy& a, const MeasureStep& m, std::vector<Partial>& live,
                 Chooser&& choose) {
  const auto pos = positions_of(a, m.targets);
  std::vector<Partial> next;
  for (auto& branch : live) {
    auto outcomes = measure_subsystem(branch.state, m.basis, pos);
    for (std::size_t k : choose(outcomes, branch.probability)) {
      auto& o = outcomes[k];
      PureState post(std::move(o.post));
      if (!m.corrections.empty() && m.corrections[k]) post = apply_gate(a, *m.corrections[k], post);
      auto record = branch.record;
      record.push_back(static_cast<std::uint8_t>(k));
      next.push_back({branch.probability * o.probability, std::move(post), std::move(record)});
    }
  }
  live = std::move(next);
}

template <typename Chooser>
std::vector<Partial> execute(const AttackStrategy& a, const PureState& letter, Chooser&& choose) {
  if (letter.dim() != 4) throw DimensionError("letters must be two-qubit states");
  PureState initial = a.ancilla() ? tensor_product(letter, *a.ancilla()) : letter;
  std::vector<Partial> live;
  live.push_back({1.0, std::move(initial), {}});

  auto run_step = [&](const Step& step) {
    if (const auto* g = std::get_if<GateStep>(&step)) {
      for (auto& b : live) b.state = apply_gate(a, *g, b.state);
    } else {
      run_measure(a, std::get<MeasureStep>(step), live, choose);
    }
  };
  for (const auto& s : a.stage1().steps) run_step(s);
  for (const auto& s : a.stage2().steps) run_step(s);
  for (const auto& m : a.final_measurements()) run_measure(a, m, live, choose);
  return live;
}

double parse_angle(std::string_view text, const char* what) {
  try {
    std::size_t used = 0;
    const std::string s(text);
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("bad");
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("invalid ") + what + ": '" + std::string(text) + "'");
  }
}

std::optional<LocalBasisSpec> parse_local(std::string_view text) {
  if (text == "none" || text == "-") return std::nullopt;
  LocalBasisSpec spec;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    spec.theta_deg = parse_angle(text.substr(0, slash), "theta");
    spec.phi_deg = parse_angle(text.substr(slash + 1), "phi");
  } else {
    spec.theta_deg = parse_angle(text, "theta");
  }
  return spec;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? text.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string local_str(const std::optional<LocalBasisSpec>& s) { return s ? s->str() : "none"; }

}  // namespace

std::string wire_name(Wire w) {
  switch (w) {
    case Wire::travel1: return "travel qubit 1";
    case Wire::travel2: return "travel qubit 2";
    case Wire::ancilla1: return "ancilla 1";
    case Wire::ancilla2: return "ancilla 2";
  }
  return "?";
}

AttackStrategy::AttackStrategy(std::string name, std::optional<PureState> ancilla, Stage stage1,
                               Stage stage2, std::vector<MeasureStep> final_measurements)
    : name_(std::move(name)),
      ancilla_(std::move(ancilla)),
      stage1_(std::move(stage1)),
      stage2_(std::move(stage2)),
      final_(std::move(final_measurements)) {
  if (ancilla_ && ancilla_->qubits() > 2) {
    throw DimensionError("at most two ancilla qubits are supported");
  }
  StageScope scope{1, {Wire::travel1}, {}};
  if (ancilla_qubits() >= 1) scope.allowed.insert(Wire::ancilla1);
  if (ancilla_qubits() >= 2) scope.allowed.insert(Wire::ancilla2);
  check_stage(stage1_, scope);

  scope.stage = 2;
  scope.allowed.erase(stage1_.forward);
  scope.forwarded.insert(stage1_.forward);
  scope.allowed.insert(Wire::travel2);
  check_stage(stage2_, scope);

  scope.stage = 3;
  scope.allowed.erase(stage2_.forward);
  scope.forwarded.insert(stage2_.forward);
  for (const auto& m : final_) check_measure(m, scope);
}

int AttackStrategy::position(Wire w) const {
  const int idx = static_cast<int>(w);
  if (idx >= register_qubits()) throw InvalidArgument(wire_name(w) + " is not part of this attack");
  return idx;
}

std::array<int, 2> AttackStrategy::bob_positions() const {
  return {position(stage1_.forward), position(stage2_.forward)};
}

std::array<PureState, 2> LocalBasisSpec::states() const {
  const double t = theta_deg * std::numbers::pi / 180.0;
  const double p = phi_deg * std::numbers::pi / 180.0;
  const Complex phase = std::polar(1.0, p);
  CVector b0(2), b1(2);
  b0 << std::cos(t), phase * std::sin(t);
  b1 << -std::conj(phase) * std::sin(t), std::cos(t);
  return {PureState::normalized(b0), PureState::normalized(b1)};
}

std::string LocalBasisSpec::str() const {
  char buf[64];
  if (phi_deg == 0.0) {
    std::snprintf(buf, sizeof buf, "%g", theta_deg);
  } else {
    std::snprintf(buf, sizeof buf, "%g/%g", theta_deg, phi_deg);
  }
  return buf;
}

AttackStrategy no_attack() {
  return AttackStrategy("none", std::nullopt, Stage{{}, Wire::travel1}, Stage{{}, Wire::travel2});
}

AttackStrategy local_measure_qubit2() {
  MeasureStep m{{Wire::travel2}, {PureState::basis(1, 0), PureState::basis(1, 1)}, {}};
  return AttackStrategy("local-measure-q2", std::nullopt, Stage{{}, Wire::travel1},
                        Stage{{m}, Wire::travel2});
}

AttackStrategy ancilla_swap(const std::optional<LetterBasis>& measurement) {
  const LetterBasis basis = measurement.value_or(LetterBasis::bell());
  MeasureStep bell_measure{{Wire::travel1, Wire::travel2}, {}, {}};
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& target = basis.state(k);
    bell_measure.basis.push_back(target);
    // (I x U)|Phi+> = |target> for U = sqrt2 * M^T, M the amplitude matrix of target.
    CMatrix u(2, 2);
    u << target[0], target[2], target[1], target[3];
    u *= std::sqrt(2.0);
    try {
      bell_measure.corrections.push_back(GateStep{{Wire::ancilla2}, UnitaryMap(u)});
    } catch (const InvalidArgument&) {
      throw InvalidArgument("ancilla-swap measurement basis must be maximally entangled");
    }
  }
  CVector phi_plus(4);
  phi_plus << 1, 0, 0, 1;
  return AttackStrategy(measurement ? "ancilla-swap(custom)" : "ancilla-swap",
                        PureState::normalized(phi_plus), Stage{{}, Wire::ancilla1},
                        Stage{{bell_measure}, Wire::ancilla2});
}

AttackStrategy intercept_resend(const std::optional<LocalBasisSpec>& qubit1,
                                const std::optional<LocalBasisSpec>& qubit2) {
  Stage s1{{}, Wire::travel1};
  Stage s2{{}, Wire::travel2};
  if (qubit1) {
    const auto b = qubit1->states();
    s1.steps.push_back(MeasureStep{{Wire::travel1}, {b[0], b[1]}, {}});
  }
  if (qubit2) {
    const auto b = qubit2->states();
    s2.steps.push_back(MeasureStep{{Wire::travel2}, {b[0], b[1]}, {}});
  }
  return AttackStrategy("intercept-resend," + local_str(qubit1) + "," + local_str(qubit2),
                        std::nullopt, std::move(s1), std::move(s2));
}

std::vector<AttackStrategy> catalog() {
  return {no_attack(), local_measure_qubit2(), ancilla_swap(),
          intercept_resend(LocalBasisSpec{0.0, 0.0}, LocalBasisSpec{0.0, 0.0}),
          intercept_resend(LocalBasisSpec{45.0, 0.0}, LocalBasisSpec{45.0, 0.0})};
}

AttackStrategy parse_attack(std::string_view spec) {
  const auto parts = split(trim(spec), ',');
  const auto name = trim(parts[0]);
  auto no_params = [&] {
    if (parts.size() != 1) throw ParseError("attack '" + std::string(name) + "' takes no parameters");
  };
  if (name == "none") {
    no_params();
    return no_attack();
  }
  if (name == "local-measure-q2") {
    no_params();
    return local_measure_qubit2();
  }
  if (name == "ancilla-swap") {
    no_params();
    return ancilla_swap();
  }
  if (name == "intercept-resend") {
    if (parts.size() != 3) {
      throw ParseError("intercept-resend expects two parameters: <qubit1>,<qubit2>");
    }
    return intercept_resend(parse_local(trim(parts[1])), parse_local(trim(parts[2])));
  }
  throw ParseError("unknown attack '" + std::string(name) + "'");
}

std::size_t EveStats::guess_for(const MeasurementRecord& record) const {
  for (const auto& e : guess_table) {
    if (e.record == record) return e.guess;
  }
  return fallback_guess;
}

std::vector<AttackBranch> enumerate_branches(const AttackStrategy& attack, const PureState& letter) {
  auto all = [](const std::vector<SubsystemOutcome>& outcomes, double prior) {
    std::vector<std::size_t> keep;
    for (const auto& o : outcomes) {
      if (prior * o.probability > kBranchFloor) keep.push_back(o.outcome);
    }
    return keep;
  };
  auto partials = execute(attack, letter, all);
  std::vector<AttackBranch> out;
  out.reserve(partials.size());
  for (auto& p : partials) out.push_back({p.probability, std::move(p.state), std::move(p.record)});
  return out;
}

AttackBranch sample_branch(const AttackStrategy& attack, const PureState& letter, Rng& rng) {
  auto one = [&rng](const std::vector<SubsystemOutcome>& outcomes, double) {
    std::vector<double> probs;
    probs.reserve(outcomes.size());
    for (const auto& o : outcomes) probs.push_back(o.probability);
    return std::vector<std::size_t>{sample_index(probs, rng)};
  };
  auto partials = execute(attack, letter, one);
  auto& p = partials.front();
  return {p.probability, std::move(p.state), std::move(p.record)};
}

EveStats exact_eve_stats(const LetterBasis& basis, const AttackStrategy& attack) {
  EveStats stats;
  const auto bob = attack.bob_positions();
  std::map<MeasurementRecord, std::array<double, 4>> record_given_letter;

  for (std::size_t i = 0; i < 4; ++i) {
    for (const auto& branch : enumerate_branches(attack, basis.state(i))) {
      for (std::size_t j = 0; j < 4; ++j) {
        const double pj = project_onto(branch.state, basis.state(j), bob).squaredNorm();
        stats.bob_given_letter(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
            branch.probability * pj;
      }
      auto& row = record_given_letter[branch.record];
      row[i] += branch.probability;
    }
  }

  double detect = 0.0;
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      if (i != j) detect += 0.25 * stats.bob_given_letter(i, j);
    }
  }
  stats.detect_prob = std::clamp(detect, 0.0, 1.0);

  // Maximum-likelihood guess; near-ties go to the smallest label, which keeps
  // the result independent of letter order.
  for (std::size_t i = 0; i < 4; ++i) {
    if (basis.label(i) == 0) stats.fallback_guess = i;
  }
  for (const auto& [record, likelihood] : record_given_letter) {
    const double best = *std::max_element(likelihood.begin(), likelihood.end());
    std::size_t guess = 4;
    for (std::size_t i = 0; i < 4; ++i) {
      if (likelihood[i] < best - kTieTolerance) continue;
      if (guess == 4 || basis.label(i) < basis.label(guess)) guess = i;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      total += 0.25 * likelihood[i];
      stats.guess_given_letter(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(guess)) +=
          likelihood[i];
    }
    stats.guess_table.push_back({record, total, guess});
  }

  Eigen::MatrixXd joint = 0.25 * stats.guess_given_letter;
  joint /= joint.sum();  // absorb pruned branches below the floor
  stats.info_gain = std::clamp(mutual_information(JointDistribution(joint)), 0.0, 2.0);
  return stats;
}

InterceptGrid parse_grid(std::string_view spec) {
  InterceptGrid grid;
  bool seen1 = false, seen2 = false;
  for (auto part : split(spec, ';')) {
    part = trim(part);
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) throw ParseError("grid axis must look like q1=... or q2=...");
    const auto axis = trim(part.substr(0, eq));
    std::vector<std::optional<LocalBasisSpec>>* target = nullptr;
    if (axis == "q1") {
      target = &grid.qubit1;
      seen1 = true;
    } else if (axis == "q2") {
      target = &grid.qubit2;
      seen2 = true;
    } else {
      throw ParseError("unknown grid axis '" + std::string(axis) + "'");
    }
    for (auto item : split(part.substr(eq + 1), ',')) {
      item = trim(item);
      if (item.empty()) throw ParseError("empty grid item");
      if (item.find(':') != std::string_view::npos) {
        const auto r = split(item, ':');
        if (r.size() != 3) throw ParseError("range must be <from>:<to>:<step>");
        const double from = parse_angle(r[0], "range start");
        const double to = parse_angle(r[1], "range end");
        const double step = parse_angle(r[2], "range step");
        if (!(step > 0.0) || to < from) throw ParseError("range needs step > 0 and to >= from");
        const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9));
        for (std::size_t k = 0; k <= count; ++k) {
          target->push_back(LocalBasisSpec{from + static_cast<double>(k) * step, 0.0});
        }
      } else {
        target->push_back(parse_local(item));
      }
    }
  }
  if (!seen1 && !seen2) throw ParseError("grid spec names no axis");
  if (!seen1) grid.qubit1.push_back(std::nullopt);
  if (!seen2) grid.qubit2.push_back(std::nullopt);
  return grid;
}

SweepResult strategy_sweep(const LetterBasis& basis, const InterceptGrid& grid, unsigned threads) {
  if (grid.qubit1.empty() || grid.qubit2.empty()) throw InvalidArgument("sweep grid is empty");
  SweepResult result;
  for (const auto& a : grid.qubit1) {
    for (const auto& b : grid.qubit2) result.points.push_back({a, b, {}});
  }
  detail::parallel_for(result.points.size(), threads, [&](std::size_t k) {
    auto& p = result.points[k];
    p.stats = exact_eve_stats(basis, intercept_resend(p.qubit1, p.qubit2));
  });
  for (std::size_t k = 1; k < result.points.size(); ++k) {
    const auto& s = result.points[k].stats;
    if (s.info_gain > result.points[result.best_info].stats.info_gain + kTieTolerance) {
      result.best_info = k;
    }
    if (s.detect_prob < result.points[result.least_detect].stats.detect_prob - kTieTolerance) {
      result.least_detect = k;
    }
    if (s.detect_prob > result.points[result.most_detect].stats.detect_prob + kTieTolerance) {
      result.most_detect = k;
    }
  }
  return result;
}

AttackedScreening screen_with_attacks(const LetterBasis& basis) {
  return {screen_basis(basis), exact_eve_stats(basis, local_measure_qubit2()),
          exact_eve_stats(basis, ancilla_swap())};
}

}  // namespace hqkd
