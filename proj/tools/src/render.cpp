#include <algorithm>
#include <cstdio>
#include <sstream>
#include <vector>

#include "hqkd/cli.hpp"
#include "hqkd/errors.hpp"

namespace hqkd::cli {
namespace {

using Row = std::vector<std::string>;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string scalar(const Json& v, bool human) {
  if (v.is_string()) {
    auto s = v.get<std::string>();
    if (human && s.size() > 64) s = s.substr(0, 48) + "... (" + std::to_string(s.size()) + " chars)";
    return s;
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return fmt(human ? "%.4f" : "%.17g", v.get<double>());
  if (v.is_null()) return "-";
  return v.dump();
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// Dotted keys for nested objects, bracketed indices for arrays.
void flatten(const Json& v, const std::string& prefix, std::vector<std::pair<std::string, Json>>& out) {
  if (v.is_object()) {
    for (const auto& [k, x] : v.items()) flatten(x, prefix.empty() ? k : prefix + "." + k, out);
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out.emplace_back(prefix, v);
  }
}

struct Table {
  Row header;
  std::vector<Row> rows;
};

Table key_value(const Json& payload, bool human) {
  std::vector<std::pair<std::string, Json>> flat;
  flatten(payload, "", flat);
  Table t{{"key", "value"}, {}};
  for (const auto& [k, v] : flat) t.rows.push_back({k, scalar(v, human)});
  return t;
}

Table records(const Json& list, const Row& columns, bool human) {
  Table t{columns, {}};
  for (const auto& item : list) {
    Row r;
    for (const auto& c : columns) r.push_back(scalar(item.at(c), human));
    t.rows.push_back(std::move(r));
  }
  return t;
}

Table tabulate(const std::string& sub, const Json& p, bool human) {
  if (sub == "table1") {
    if (human) return records(p.at("rows"), {"scheme", "b_s", "q_t", "b_t", "display"}, true);
    return records(p.at("rows"),
                   {"scheme", "b_s", "q_t", "b_t", "efficiency", "efficiency_value", "qualifier", "display"},
                   false);
  }
  if (sub == "detection-curve") return records(p.at("curve"), {"n", "probability"}, human);
  if (sub == "sweep") return records(p.at("points"), {"q1", "q2", "info_gain", "detect_prob"}, human);
  if (sub == "analyzer-check") {
    Table t{{"letter", "label", "pattern", "probability", "counts"}, {}};
    for (const auto& l : p.at("letters")) {
      for (const auto& pat : l.at("patterns")) {
        t.rows.push_back({scalar(l.at("letter"), human), scalar(l.at("label"), human),
                          scalar(pat.at("pattern"), human), scalar(pat.at("probability"), human),
                          scalar(pat.at("counts"), human)});
      }
    }
    return t;
  }
  return key_value(p, human);
}

std::string aligned(const Table& t) {
  std::vector<std::size_t> width(t.header.size(), 0);
  auto measure = [&](const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  };
  measure(t.header);
  for (const auto& r : t.rows) measure(r);
  std::ostringstream out;
  auto line = [&](const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      out << r[i];
      if (i + 1 < r.size()) out << std::string(width[i] - r[i].size() + 2, ' ');
    }
    out << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out.str();
}

std::string human_summary(const ReportDocument& doc) {
  const auto& p = doc.payload;
  std::ostringstream out;
  if (doc.subcommand == "sweep") {
    const auto& pts = p.at("points");
    auto point = [&](const char* key) {
      const auto& x = pts.at(p.at(key).get<std::size_t>());
      return "q1=" + x.at("q1").get<std::string>() + " q2=" + x.at("q2").get<std::string>();
    };
    out << "\nbest info:     " << point("best_info") << '\n'
        << "least detect:  " << point("least_detect") << '\n'
        << "most detect:   " << point("most_detect") << '\n';
  } else if (doc.subcommand == "analyzer-check") {
    out << '\n';
    for (const auto& l : p.at("letters")) {
      out << "letter " << l.at("label").get<std::string>() << ": success "
          << scalar(l.at("success"), true) << ", max |z| " << scalar(l.at("max_z"), true)
          << (l.at("ok").get<bool>() ? "" : "  FAIL") << '\n';
    }
  }
  return out.str();
}

}  // namespace

std::string render(const ReportDocument& doc, Format format) {
  switch (format) {
    case Format::json: {
      Json prov{{"seed", doc.provenance.seed ? Json(*doc.provenance.seed) : Json(nullptr)},
                {"config_hash", doc.provenance.config_hash},
                {"version", doc.provenance.version},
                {"request", doc.provenance.request}};
      Json out{{"subcommand", doc.subcommand}, {"payload", doc.payload}, {"provenance", prov}};
      return out.dump(2) + "\n";
    }
    case Format::csv: {
      const auto t = tabulate(doc.subcommand, doc.payload, false);
      std::string out;
      auto line = [&](const Row& r) {
        for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_cell(r[i]);
        out += '\n';
      };
      line(t.header);
      for (const auto& r : t.rows) line(r);
      return out;
    }
    case Format::human:
      break;
  }
  std::string out = aligned(tabulate(doc.subcommand, doc.payload, true));
  out += human_summary(doc);
  out += "\n# " + doc.subcommand + " v" + doc.provenance.version + " config " +
         doc.provenance.config_hash;
  if (doc.provenance.seed) out += " seed " + std::to_string(*doc.provenance.seed);
  return out + "\n";
}

ReportDocument parse_report(std::string_view text) {
  ReportDocument doc;
  try {
    const auto j = Json::parse(text);
    doc.subcommand = j.at("subcommand").get<std::string>();
    doc.payload = j.at("payload");
    const auto& prov = j.at("provenance");
    if (!prov.at("seed").is_null()) doc.provenance.seed = prov.at("seed").get<std::uint64_t>();
    doc.provenance.config_hash = prov.at("config_hash").get<std::string>();
    doc.provenance.version = prov.at("version").get<std::string>();
    doc.provenance.request = prov.at("request");
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
  return doc;
}

}  // namespace hqkd::cli
