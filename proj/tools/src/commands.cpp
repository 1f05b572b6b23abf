#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hqkd/attacks.hpp"
#include "hqkd/basisclass.hpp"
#include "hqkd/cli.hpp"
#include "hqkd/errors.hpp"
#include "hqkd/infotheory.hpp"
#include "hqkd/optics.hpp"
#include "hqkd/protocol.hpp"

namespace hqkd::cli {
namespace {

constexpr std::string_view kInline = "inline:";
constexpr std::uint64_t kDefaultSeed = 42;

using Params = std::map<std::string, std::string>;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  try {
    if (!v.empty() && v[0] != '-') {
      const auto x = std::stoull(v, &used, 10);
      if (used == v.size()) return x;
    }
  } catch (const std::exception&) {
  }
  throw ParseError("--" + key + " expects a non-negative integer, got '" + v + "'");
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  try {
    const double x = std::stod(v, &used);
    if (used == v.size() && std::isfinite(x)) return x;
  } catch (const std::exception&) {
  }
  throw ParseError("--" + key + " expects a real number, got '" + v + "'");
}

void check_keys(const std::string& sub, const Params& p, std::set<std::string> allowed,
                std::set<std::string> required = {}) {
  for (const auto& [k, v] : p) {
    if (!allowed.count(k)) throw InvalidArgument(sub + ": unknown parameter '" + k + "'");
  }
  for (const auto& k : required) {
    if (!p.count(k)) throw InvalidArgument(sub + ": missing required parameter '" + k + "'");
  }
}

// Built-in names stay as they are; anything else becomes inline contents.
std::string canonical_basis(const std::string& value, const std::filesystem::path& base = {}) {
  if (value.starts_with(kInline) || builtin_basis(value)) return value;
  const auto path = base.empty() ? std::filesystem::path(value) : base / value;
  return std::string(kInline) + read_file(path.string());
}

LetterBasis load_basis(const std::string& canonical) {
  if (canonical.starts_with(kInline)) return parse_basis(canonical.substr(kInline.size()));
  if (auto b = builtin_basis(canonical)) return *b;
  throw InvalidArgument("unresolved basis '" + canonical + "'");
}

Json matrix_json(const Eigen::Matrix4d& m) {
  Json rows = Json::array();
  for (int r = 0; r < 4; ++r) {
    Json row = Json::array();
    for (int c = 0; c < 4; ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Json eve_json(const EveStats& s) {
  return Json{{"info_gain", s.info_gain}, {"detect_prob", s.detect_prob}};
}

Json labels_json(const LetterBasis& b) {
  Json out = Json::array();
  for (std::size_t i = 0; i < 4; ++i) out.push_back(label_bits(b.label(i)));
  return out;
}

// --- run ---------------------------------------------------------------------

const std::set<std::string> kRunKeys{"steps",  "basis", "attack",   "test_fraction", "seed",
                                     "L",      "l",     "speed",    "analyzer",      "threads"};

Json canonical_run_config(const Params& p) {
  Json cfg = Json::object();
  std::filesystem::path base;
  if (auto it = p.find("config"); it != p.end()) {
    std::string text;
    if (it->second.starts_with(kInline)) {
      text = it->second.substr(kInline.size());
    } else {
      text = read_file(it->second);
      base = std::filesystem::path(it->second).parent_path();
    }
    try {
      cfg = Json::parse(text);
    } catch (const Json::exception& e) {
      throw ParseError(std::string("run config is not valid JSON: ") + e.what());
    }
    if (!cfg.is_object()) throw ParseError("run config must be a JSON object");
    for (const auto& [k, v] : cfg.items()) {
      if (!kRunKeys.count(k)) throw ParseError("run config: unknown key '" + k + "'");
    }
  }
  if (auto it = p.find("seed"); it != p.end()) cfg["seed"] = to_u64("seed", it->second);

  auto take = [&](const char* key, Json fallback) {
    if (!cfg.contains(key)) return fallback;
    return cfg[key];
  };
  auto expect = [](const Json& v, bool ok, const char* key, const char* what) {
    if (!ok) throw ParseError(std::string("run config: '") + key + "' must be " + what);
    return v;
  };
  auto uint_field = [&](const char* key, std::uint64_t d) {
    const auto v = take(key, d);
    return expect(v, v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0),
                  key, "a non-negative integer");
  };
  auto real_field = [&](const char* key, double d) {
    const auto v = take(key, d);
    return expect(v, v.is_number(), key, "a number");
  };
  auto str_field = [&](const char* key, const char* d) {
    const auto v = take(key, d);
    return expect(v, v.is_string(), key, "a string");
  };

  Json out = Json::object();
  out["steps"] = uint_field("steps", 1000);
  out["basis"] = canonical_basis(str_field("basis", "202").get<std::string>(), base);
  out["attack"] = str_field("attack", "none");
  out["test_fraction"] = real_field("test_fraction", 0.5).get<double>();
  out["seed"] = uint_field("seed", kDefaultSeed);
  out["L"] = real_field("L", 100.0).get<double>();
  out["l"] = real_field("l", 60.0).get<double>();
  out["speed"] = real_field("speed", 1.0).get<double>();
  out["analyzer"] = str_field("analyzer", "auto");
  out["threads"] = uint_field("threads", 1);
  return out;
}

Json run_payload(const Json& cfg, const std::optional<std::string>& transcript_path) {
  ProtocolConfig c;
  c.steps = cfg["steps"].get<std::uint64_t>();
  c.basis = load_basis(cfg["basis"].get<std::string>());
  c.attack = parse_attack(cfg["attack"].get<std::string>());
  c.test_fraction = cfg["test_fraction"].get<double>();
  c.seed = cfg["seed"].get<std::uint64_t>();
  c.timing = {cfg["L"].get<double>(), cfg["l"].get<double>(), cfg["speed"].get<double>()};
  c.analyzer = parse_analyzer(cfg["analyzer"].get<std::string>());
  c.threads = static_cast<unsigned>(std::max<std::uint64_t>(1, cfg["threads"].get<std::uint64_t>()));

  const auto run = run_protocol(c);
  const auto& s = run.summary;

  if (transcript_path) {
    std::ofstream out(*transcript_path);
    if (!out) throw InvalidArgument("cannot write '" + *transcript_path + "'");
    write_transcript(out, c.basis, run.steps);
  }

  Json channel = Json::array();
  for (const auto& a : s.channel.transcript()) {
    channel.push_back({{"topic", a.topic}, {"payload", a.payload}});
  }
  Json events = Json::array();
  for (const auto& e : s.schedule.events) events.push_back({{"event", e.label}, {"time", e.time}});

  return Json{
      {"steps", s.steps},
      {"basis", classify_pnm(c.basis).code()},
      {"attack", c.attack.name()},
      {"analyzer", analyzer_name(s.analyzer)},
      {"tested_pairs", s.tested_pairs},
      {"mismatches", s.mismatches},
      {"detected", s.eavesdropper_detected},
      {"key_bits", s.alice_key.size()},
      {"keys_equal", s.alice_key == s.bob_key},
      {"eve_correct_guesses", s.eve_correct_guesses},
      {"b_s", s.cost.secret_bits},
      {"q_t", s.cost.qubits},
      {"b_t", s.cost.classical_bits},
      {"efficiency", s.efficiency.value},
      {"efficiency_warning", s.efficiency.exceeds_bound},
      {"analyzer_time", s.schedule.analyzer_time},
      {"eve_window_qubit1", {s.schedule.eve_holds_qubit1.begin, s.schedule.eve_holds_qubit1.end}},
      {"eve_window_qubit2", {s.schedule.eve_holds_qubit2.begin, s.schedule.eve_holds_qubit2.end}},
      {"alice_key", s.alice_key},
      {"bob_key", s.bob_key},
      {"events", events},
      {"channel", channel},
  };
}

// --- screen-basis --------------------------------------------------------------

Json screen_payload(const LetterBasis& basis) {
  const auto r = screen_with_attacks(basis);
  const auto& sig = r.screening.signature;
  Json conc = Json::array();
  for (double c : sig.concurrences) conc.push_back(c);
  Json near = Json::array();
  for (auto i : sig.near_boundary) near.push_back(i);
  Json pairs = Json::array();
  for (const auto& p : r.screening.mor.pairs) {
    pairs.push_back({{"i", p.i},
                     {"j", p.j},
                     {"first_nonorthogonal", p.first_nonorthogonal},
                     {"first_nonidentical", p.first_nonidentical},
                     {"second_nonorthogonal", p.second_nonorthogonal},
                     {"satisfies", p.satisfies}});
  }
  return Json{
      {"pnm", sig.code()},
      {"labels", labels_json(basis)},
      {"concurrences", conc},
      {"near_boundary", near},
      {"mor_satisfying_pairs", r.screening.mor.satisfying_pairs()},
      {"mor_pairs", pairs},
      {"local_measure_q2", eve_json(r.local_measurement)},
      {"ancilla_swap", eve_json(r.ancilla_swap)},
      {"verdict", verdict_name(r.screening.verdict)},
  };
}

// --- analyzer-check ------------------------------------------------------------

Json analyzer_payload(std::uint64_t shots, std::uint64_t seed) {
  const auto basis = LetterBasis::two_zero_two();
  const auto decoder = PatternDecoder::for_basis(basis);
  Json letters = Json::array();
  bool all_ok = true;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& dist = decoder->letter_distributions()[i];
    std::array<std::uint64_t, kPairStates> counts{};
    auto rng = Rng::derive(seed, StreamId::analyzer_check, i);
    for (std::uint64_t s = 0; s < shots; ++s) ++counts[sample_click(dist, rng).index()];

    double success = 0.0;
    double max_z = 0.0;
    std::uint64_t stray = 0;  // clicks on patterns with zero probability
    Json patterns = Json::array();
    for (std::size_t k = 0; k < kPairStates; ++k) {
      const auto pat = ClickPattern::at(k);
      if (discriminate(pat) == i) success += dist[k];
      const double n = static_cast<double>(shots);
      const double var = n * dist[k] * (1.0 - dist[k]);
      const double dev = std::abs(static_cast<double>(counts[k]) - n * dist[k]);
      if (var > 0) max_z = std::max(max_z, dev / std::sqrt(var));
      else stray += counts[k];
      if (dist[k] <= 1e-12 && counts[k] == 0) continue;
      patterns.push_back({{"pattern", pat.str()}, {"probability", dist[k]}, {"counts", counts[k]}});
    }
    const bool ok = std::abs(success - 1.0) <= 1e-10 && max_z <= 3.0 && stray == 0;
    all_ok = all_ok && ok;
    letters.push_back({{"letter", i},
                       {"label", label_bits(basis.label(i))},
                       {"patterns", patterns},
                       {"success", success},
                       {"max_z", max_z},
                       {"stray_clicks", stray},
                       {"ok", ok}});
  }
  return Json{{"shots", shots}, {"letters", letters}, {"ok", all_ok}};
}

// --- eve-stats / sweep -----------------------------------------------------------

Json eve_stats_payload(const LetterBasis& basis, const AttackStrategy& attack) {
  const auto s = exact_eve_stats(basis, attack);
  return Json{{"pnm", classify_pnm(basis).code()},
              {"attack", attack.name()},
              {"info_gain", s.info_gain},
              {"detect_prob", s.detect_prob},
              {"bob_given_letter", matrix_json(s.bob_given_letter)},
              {"guess_given_letter", matrix_json(s.guess_given_letter)}};
}

std::string axis_str(const std::optional<LocalBasisSpec>& s) { return s ? s->str() : "none"; }

Json sweep_payload(const LetterBasis& basis, const std::string& grid, unsigned threads) {
  const auto r = strategy_sweep(basis, parse_grid(grid), threads);
  Json points = Json::array();
  for (const auto& p : r.points) {
    points.push_back({{"q1", axis_str(p.qubit1)},
                      {"q2", axis_str(p.qubit2)},
                      {"info_gain", p.stats.info_gain},
                      {"detect_prob", p.stats.detect_prob}});
  }
  return Json{{"pnm", classify_pnm(basis).code()},
              {"points", points},
              {"best_info", r.best_info},
              {"least_detect", r.least_detect},
              {"most_detect", r.most_detect}};
}

Json curve_payload(double p, std::uint64_t n_max) {
  const auto c = detection_curve(p, n_max);
  Json rows = Json::array();
  for (std::size_t n = 0; n < c.size(); ++n) rows.push_back({{"n", n + 1}, {"probability", c[n]}});
  return Json{{"p", p}, {"curve", rows}};
}

Json table1_payload() {
  Json rows = Json::array();
  for (const auto& row : published_schemes()) {
    const auto e = evaluate_scheme(row);
    rows.push_back({{"scheme", row.scheme},
                    {"b_s", qualifier_symbol(row.secret_bits_qualifier) + row.secret_bits.str()},
                    {"q_t", row.qubits.str()},
                    {"b_t", (row.classical_bits_lower_bound ? ">=" : "") + row.classical_bits.str()},
                    {"efficiency", e.efficiency.str()},
                    {"efficiency_value", e.efficiency.value()},
                    {"qualifier", qualifier_name(e.qualifier)},
                    {"display", e.display}});
  }
  return Json{{"rows", rows}};
}

// Resolves files, defaults and seeds so that the result replays exactly.
Params canonicalize(const std::string& sub, const Params& p) {
  Params c = p;
  if (sub == "run") {
    check_keys(sub, p, {"config", "seed"});
    c.clear();
    c["config"] = std::string(kInline) + canonical_run_config(p).dump();
  } else if (sub == "screen-basis") {
    check_keys(sub, p, {"basis", "strict"}, {"basis"});
    c["basis"] = canonical_basis(p.at("basis"));
    c["strict"] = p.count("strict") && p.at("strict") != "false" ? "true" : "false";
  } else if (sub == "analyzer-check") {
    check_keys(sub, p, {"shots", "seed"});
    c["shots"] = std::to_string(p.count("shots") ? to_u64("shots", p.at("shots")) : 100000);
    c["seed"] = std::to_string(p.count("seed") ? to_u64("seed", p.at("seed")) : kDefaultSeed);
  } else if (sub == "eve-stats") {
    check_keys(sub, p, {"basis", "attack"}, {"basis", "attack"});
    c["basis"] = canonical_basis(p.at("basis"));
  } else if (sub == "sweep") {
    check_keys(sub, p, {"basis", "grid", "threads"}, {"basis", "grid"});
    c["basis"] = canonical_basis(p.at("basis"));
    c.erase("threads");  // does not affect the result
  } else if (sub == "detection-curve") {
    check_keys(sub, p, {"p", "n-max"}, {"p", "n-max"});
  } else if (sub == "table1") {
    check_keys(sub, p, {});
  } else {
    throw InvalidArgument("unknown subcommand '" + sub + "'");
  }
  return c;
}

}  // namespace

std::string version() { return HQKD_VERSION; }

Format parse_format(std::string_view name) {
  if (name == "human") return Format::human;
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw ParseError("unknown format '" + std::string(name) + "' (human|csv|json)");
}

CommandRequest request_from_json(const Json& request) {
  CommandRequest r;
  try {
    r.subcommand = request.at("subcommand").get<std::string>();
    for (const auto& [k, v] : request.at("params").items()) r.params[k] = v.get<std::string>();
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed request: ") + e.what());
  }
  return r;
}

ReportDocument execute(const CommandRequest& request) {
  const auto& sub = request.subcommand;
  const Params p = canonicalize(sub, request.params);

  ReportDocument doc;
  doc.subcommand = sub;
  Json params = Json::object();
  for (const auto& [k, v] : p) params[k] = v;
  doc.provenance.request = Json{{"subcommand", sub}, {"params", params}};
  doc.provenance.config_hash = hex64(fnv1a(doc.provenance.request.dump()));
  doc.provenance.version = version();

  if (sub == "run") {
    const auto cfg = Json::parse(p.at("config").substr(kInline.size()));
    doc.provenance.seed = cfg["seed"].get<std::uint64_t>();
    doc.payload = run_payload(cfg, request.transcript_path);
  } else if (sub == "screen-basis") {
    doc.payload = screen_payload(load_basis(p.at("basis")));
    if (p.at("strict") == "true" && doc.payload["verdict"] != "candidate-secure") doc.exit_code = 3;
  } else if (sub == "analyzer-check") {
    const auto seed = to_u64("seed", p.at("seed"));
    doc.provenance.seed = seed;
    doc.payload = analyzer_payload(to_u64("shots", p.at("shots")), seed);
  } else if (sub == "eve-stats") {
    doc.payload = eve_stats_payload(load_basis(p.at("basis")), parse_attack(p.at("attack")));
  } else if (sub == "sweep") {
    const auto threads = request.params.count("threads")
                             ? static_cast<unsigned>(to_u64("threads", request.params.at("threads")))
                             : 1u;
    doc.payload = sweep_payload(load_basis(p.at("basis")), p.at("grid"), std::max(1u, threads));
  } else if (sub == "detection-curve") {
    doc.payload = curve_payload(to_double("p", p.at("p")), to_u64("n-max", p.at("n-max")));
  } else {
    doc.payload = table1_payload();
  }
  return doc;
}

}  // namespace hqkd::cli
