#include "hqkd/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "hqkd/errors.hpp"
#include "parallel.hpp"

namespace hqkd {
namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct StepContext {
  const ProtocolConfig& config;
  AnalyzerMode analyzer;
  const std::optional<PatternDecoder>& decoder;
  const EveStats& eve;
};

StepRecord execute_step(const StepContext& ctx, std::uint64_t index) {
  auto rng = Rng::derive(ctx.config.seed, StreamId::protocol_step, index);
  const auto& basis = ctx.config.basis;

  StepRecord rec;
  rec.step = index;
  rec.sent = static_cast<std::size_t>(rng.below(4));

  const auto branch = sample_branch(ctx.config.attack, basis.state(rec.sent), rng);
  rec.eve_guess = ctx.eve.guess_for(branch.record);

  const auto bob = ctx.config.attack.bob_positions();
  const auto pair = reduced_density(branch.state, bob);
  if (ctx.analyzer == AnalyzerMode::optics) {
    const auto pattern = sample_click(analyzer_distribution(pair), rng);
    rec.pattern = pattern;
    rec.inferred = ctx.decoder->decode(pattern);
  } else {
    std::array<double, 4> probs{};
    for (std::size_t j = 0; j < 4; ++j) {
      const auto& v = basis.state(j).amplitudes();
      probs[j] = std::max(0.0, (v.adjoint() * pair.matrix() * v)(0, 0).real());
    }
    rec.inferred = sample_index(probs, rng);
  }
  return rec;
}

std::string bits_of(const LetterBasis& basis, std::optional<std::size_t> letter) {
  return letter ? label_bits(basis.label(*letter)) : "-";
}

}  // namespace

TimingSchedule timing_schedule(const TimingParams& t) {
  if (!(t.path_length > 0.0) || !(t.ring_length > 0.0) || !(t.speed > 0.0)) {
    throw InvalidArgument("path length, ring length and speed must be positive");
  }
  if (!(t.ring_length > t.path_length / 2.0)) {
    throw SequentialAccessViolation("storage ring too short: need l > L/2 (L = " +
                                    fmt_double(t.path_length) + ", l = " +
                                    fmt_double(t.ring_length) + ")");
  }
  const double L = t.path_length / t.speed;
  const double l = t.ring_length / t.speed;

  TimingSchedule s;
  s.events = {
      {"qubit1 leaves Alice", 0.0},
      {"qubit2 leaves Alice's ring", l},
      {"qubit1 enters Bob's ring", L},
      {"qubit1 reaches analyzer", L + l},
      {"qubit2 reaches analyzer", l + L},
  };
  std::stable_sort(s.events.begin(), s.events.end(),
                   [](const TimingEvent& a, const TimingEvent& b) { return a.time < b.time; });
  s.analyzer_time = L + l;
  s.eve_holds_qubit1 = {0.0, L};
  s.eve_holds_qubit2 = {l, l + L};
  return s;
}

std::string analyzer_name(AnalyzerMode m) {
  switch (m) {
    case AnalyzerMode::automatic: return "auto";
    case AnalyzerMode::optics: return "optics";
    case AnalyzerMode::projective: return "projective";
  }
  return "auto";
}

AnalyzerMode parse_analyzer(std::string_view name) {
  if (name == "auto") return AnalyzerMode::automatic;
  if (name == "optics") return AnalyzerMode::optics;
  if (name == "projective") return AnalyzerMode::projective;
  throw ParseError("unknown analyzer '" + std::string(name) + "' (auto|optics|projective)");
}

void ClassicalChannel::announce(std::string topic, std::string payload) {
  log_.push_back({std::move(topic), std::move(payload)});
}

ProtocolRun run_protocol(const ProtocolConfig& config) {
  if (config.steps == 0) throw InvalidArgument("protocol needs at least one step");
  if (!(config.test_fraction >= 0.0 && config.test_fraction <= 1.0)) {
    throw InvalidArgument("test_fraction must lie in [0, 1]");
  }

  ProtocolRun run;
  auto& summary = run.summary;
  summary.steps = config.steps;
  summary.schedule = timing_schedule(config.timing);

  const auto decoder = PatternDecoder::for_basis(config.basis);
  AnalyzerMode analyzer = config.analyzer;
  if (analyzer == AnalyzerMode::automatic) {
    analyzer = decoder ? AnalyzerMode::optics : AnalyzerMode::projective;
  } else if (analyzer == AnalyzerMode::optics && !decoder) {
    throw InvalidArgument("the linear-optics analyzer cannot separate this alphabet");
  }
  summary.analyzer = analyzer;

  const EveStats eve = exact_eve_stats(config.basis, config.attack);
  const StepContext ctx{config, analyzer, decoder, eve};

  // Single pair in flight: the next pair leaves once the previous one is analyzed.
  summary.channel.announce("timing", "arrival=" + fmt_double(summary.schedule.analyzer_time) +
                                         ";pair_delay=" +
                                         fmt_double(summary.schedule.analyzer_time));

  run.steps.resize(config.steps);
  detail::parallel_for(config.steps, config.threads,
                       [&](std::size_t i) { run.steps[i] = execute_step(ctx, i); });

  // Seeded Fisher-Yates over step indices; the first ceil(f m) are tested.
  std::vector<std::uint64_t> order(config.steps);
  std::iota(order.begin(), order.end(), std::uint64_t{0});
  auto shuffle_rng = Rng::derive(config.seed, StreamId::test_selection);
  for (std::size_t k = order.size() - 1; k > 0; --k) {
    std::swap(order[k], order[shuffle_rng.below(k + 1)]);
  }
  const auto tested = static_cast<std::size_t>(
      std::ceil(config.test_fraction * static_cast<double>(config.steps) - 1e-9));
  std::vector<std::uint64_t> test_indices(order.begin(),
                                          order.begin() + static_cast<std::ptrdiff_t>(tested));
  std::sort(test_indices.begin(), test_indices.end());

  std::string idx_list, alice_bits, bob_bits;
  for (auto i : test_indices) {
    auto& rec = run.steps[i];
    rec.tested = true;
    rec.mismatch = !rec.inferred || *rec.inferred != rec.sent;
    if (!idx_list.empty()) idx_list += ',';
    idx_list += std::to_string(i);
    alice_bits += label_bits(config.basis.label(rec.sent));
    bob_bits += bits_of(config.basis, rec.inferred);
  }
  summary.channel.announce("test-indices", std::move(idx_list));
  summary.channel.announce("test-alice", std::move(alice_bits));
  summary.channel.announce("test-bob", std::move(bob_bits));

  for (const auto& rec : run.steps) {
    if (rec.eve_guess == rec.sent) ++summary.eve_correct_guesses;
    if (rec.tested) {
      ++summary.tested_pairs;
      if (rec.mismatch) ++summary.mismatches;
      continue;
    }
    if (!rec.inferred) continue;  // a reject leaves Bob without bits for this step
    summary.alice_key += label_bits(config.basis.label(rec.sent));
    summary.bob_key += label_bits(config.basis.label(*rec.inferred));
  }
  summary.eavesdropper_detected = summary.mismatches > 0;

  // Two secret bits over two qubits and no per-step classical bits.
  summary.cost = ProtocolCost{2.0, 2.0, 0.0};
  summary.efficiency = efficiency(summary.cost);
  return run;
}

std::vector<double> detection_curve(double p, std::size_t n_max) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("detection probability must lie in [0, 1]");
  std::vector<double> curve;
  curve.reserve(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) {
    curve.push_back(1.0 - std::pow(1.0 - p, static_cast<double>(n)));
  }
  return curve;
}

void write_transcript(std::ostream& out, const LetterBasis& basis,
                      const std::vector<StepRecord>& steps) {
  out << "step,letter,pattern,inferred,tested,mismatch\n";
  for (const auto& r : steps) {
    out << r.step << ',' << label_bits(basis.label(r.sent)) << ','
        << (r.pattern ? r.pattern->str() : "-") << ',' << bits_of(basis, r.inferred) << ','
        << (r.tested ? 1 : 0) << ',' << (r.mismatch ? 1 : 0) << '\n';
  }
}

void write_summary(std::ostream& out, const RunSummary& s) {
  out << "steps = " << s.steps << '\n'
      << "analyzer = " << analyzer_name(s.analyzer) << '\n'
      << "tested_pairs = " << s.tested_pairs << '\n'
      << "mismatches = " << s.mismatches << '\n'
      << "detected = " << (s.eavesdropper_detected ? "true" : "false") << '\n'
      << "key_bits = " << s.alice_key.size() << '\n'
      << "keys_equal = " << (s.alice_key == s.bob_key ? "true" : "false") << '\n'
      << "alice_key = " << s.alice_key << '\n'
      << "bob_key = " << s.bob_key << '\n'
      << "eve_correct_guesses = " << s.eve_correct_guesses << '\n'
      << "b_s = " << fmt_double(s.cost.secret_bits) << '\n'
      << "q_t = " << fmt_double(s.cost.qubits) << '\n'
      << "b_t = " << fmt_double(s.cost.classical_bits) << '\n'
      << "efficiency = " << fmt_double(s.efficiency.value) << '\n'
      << "efficiency_warning = " << (s.efficiency.exceeds_bound ? "true" : "false") << '\n'
      << "analyzer_time = " << fmt_double(s.schedule.analyzer_time) << '\n';
}

}  // namespace hqkd
