#pragma once

// Serialisation of campaign, tail and sweep reports: JSON summaries, CSV
// per-cell tables and a short text form.

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "apsis/campaigns.hpp"
#include "apsis/error.hpp"
#include "apsis/grid.hpp"
#include "apsis/sweep.hpp"
#include "apsis/tail.hpp"

namespace apsis {

// ordered_json keeps insertion order, so output field order is fixed.
using Json = nlohmann::ordered_json;

enum class ReportFormat { json, csv, text };

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string hex_hash(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline Json box_to_json(const Box& b) {
  Json arr = Json::array();
  for (std::size_t i = 0; i < b.dim; ++i) arr.push_back({b[i].lo(), b[i].hi()});
  return arr;
}

inline Box box_from_json(const Json& j) {
  Box b;
  b.dim = j.size();
  if (b.dim > kMaxDims) throw DomainError("box with more than 3 axes");
  for (std::size_t i = 0; i < b.dim; ++i) b[i] = Interval(j[i][0].get<double>(), j[i][1].get<double>());
  return b;
}

inline Json cell_to_json(const CellResult& c) {
  Json j;
  j["index"] = c.index;
  j["box"] = box_to_json(c.box);
  j["value"] = {c.value.lo(), c.value.hi()};
  return j;
}

inline CellResult cell_from_json(const Json& j) {
  return {j.at("index").get<std::size_t>(), box_from_json(j.at("box")),
          Interval(j.at("value")[0].get<double>(), j.at("value")[1].get<double>())};
}

/// The summary record. Timing lives only under "timing" so the rest is
/// reproducible byte for byte.
inline Json report_to_json(const CampaignReport& r) {
  Json j;
  j["campaign"] = r.name;
  j["status"] = to_string(r.verdict());
  j["axes"] = r.axis_names;
  j["cell_count"] = r.cell_count;
  j["min_lower"] = r.min_lower;
  if (r.reference_min) {
    j["reference_min"] = *r.reference_min;
    j["within_reference"] = within_reference(r);
  } else {
    j["reference_min"] = nullptr;
    j["within_reference"] = nullptr;
  }
  j["argmin_index"] = r.argmin_index;
  j["argmin_box"] = box_to_json(r.argmin_box);
  j["failure_count"] = r.failure_count;
  j["failures"] = Json::array();
  for (const auto& c : r.failures) j["failures"].push_back(cell_to_json(c));
  j["undecided_count"] = r.undecided_count;
  j["undecided"] = Json::array();
  for (const auto& c : r.undecided) j["undecided"].push_back(cell_to_json(c));
  j["refined_cells"] = r.refined_cells;
  j["grid_hash"] = hex_hash(r.grid_hash);
  j["notes"] = r.notes;
  j["timing"] = {{"wall_time_s", r.wall_time_s}};
  return j;
}

inline CampaignReport report_from_json(const Json& j) {
  CampaignReport r;
  r.name = j.at("campaign").get<std::string>();
  r.axis_names = j.at("axes").get<std::vector<std::string>>();
  r.cell_count = j.at("cell_count").get<std::size_t>();
  r.min_lower = j.at("min_lower").get<double>();
  if (!j.at("reference_min").is_null()) r.reference_min = j.at("reference_min").get<double>();
  r.argmin_index = j.at("argmin_index").get<std::size_t>();
  r.argmin_box = box_from_json(j.at("argmin_box"));
  r.failure_count = j.at("failure_count").get<std::size_t>();
  for (const auto& c : j.at("failures")) r.failures.push_back(cell_from_json(c));
  r.undecided_count = j.at("undecided_count").get<std::size_t>();
  for (const auto& c : j.at("undecided")) r.undecided.push_back(cell_from_json(c));
  r.refined_cells = j.at("refined_cells").get<std::size_t>();
  r.grid_hash = std::stoull(j.at("grid_hash").get<std::string>(), nullptr, 16);
  r.notes = j.at("notes").get<std::vector<std::string>>();
  if (j.contains("timing")) r.wall_time_s = j.at("timing").at("wall_time_s").get<double>();
  return r;
}

/// Per-cell CSV: index, alpha_lo, alpha_hi, [s_lo, s_hi,] q_lo, q_hi, lower, upper.
inline void write_cells_csv(std::ostream& os, const CampaignReport& r) {
  os << "index";
  for (const auto& a : r.axis_names) os << ',' << a << "_lo," << a << "_hi";
  os << ",lower,upper\n";
  for (const auto& c : r.cells) {
    os << c.index;
    for (std::size_t i = 0; i < c.box.dim; ++i) {
      os << ',' << format_double(c.box[i].lo()) << ',' << format_double(c.box[i].hi());
    }
    os << ',' << format_double(c.value.lo()) << ',' << format_double(c.value.hi()) << '\n';
  }
}

inline std::string report_text(const CampaignReport& r) {
  std::ostringstream os;
  os << r.name << ": " << to_string(r.verdict()) << '\n';
  os << "  cells            " << r.cell_count << '\n';
  os << "  min lower bound  " << format_double(r.min_lower) << '\n';
  if (r.reference_min) {
    os << "  reference min    " << format_double(*r.reference_min) << " ("
       << (within_reference(r) ? "within" : "outside") << " +-10%)\n";
  }
  os << "  argmin cell      " << detail::describe(r.argmin_box) << '\n';
  os << "  failures         " << r.failure_count << '\n';
  if (r.undecided_count) os << "  undecided        " << r.undecided_count << '\n';
  os << "  grid hash        " << hex_hash(r.grid_hash) << '\n';
  for (const auto& n : r.notes) os << "  note: " << n << '\n';
  return os.str();
}

inline std::string emit_report(const CampaignReport& r, ReportFormat format) {
  switch (format) {
    case ReportFormat::json: return report_to_json(r).dump(2) + "\n";
    case ReportFormat::csv: {
      std::ostringstream os;
      write_cells_csv(os, r);
      return os.str();
    }
    case ReportFormat::text: return report_text(r);
  }
  return {};
}

/// Summary of several campaigns, in the order given.
inline Json campaigns_to_json(const std::vector<CampaignReport>& reports) {
  Json j;
  bool all = true;
  for (const auto& r : reports) all = all && r.passed();
  j["status"] = all ? "pass" : "fail";
  j["campaigns"] = Json::array();
  for (const auto& r : reports) j["campaigns"].push_back(report_to_json(r));
  return j;
}

/// One JSON object per line per tail record.
inline void write_tail_jsonl(std::ostream& os, const TailReport& r) {
  for (const auto& rec : r.records) {
    Json j;
    j["check"] = rec.check;
    j["p"] = rec.p;
    j["quantity"] = rec.quantity;
    j["expected"] = rec.expected;
    j["value"] = {rec.value.lo(), rec.value.hi()};
    j["ok"] = rec.ok;
    os << j.dump() << '\n';
  }
  Json s;
  s["check"] = "summary";
  s["p_min"] = r.p_min;
  s["p_max"] = r.p_max;
  s["checks"] = r.checks;
  s["violations"] = r.violations;
  s["ok"] = r.passed();
  os << s.dump() << '\n';
}

}  // namespace apsis
