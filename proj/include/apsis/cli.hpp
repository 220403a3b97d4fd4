#pragma once

// Command-line front end. run_cli is the whole program; tools/apsis.cpp
// only forwards argv.
//
// Exit codes: 0 all requested checks pass, 1 verification failure or
// undecided cells, 2 usage or domain error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "apsis/campaigns.hpp"
#include "apsis/config.hpp"
#include "apsis/error.hpp"
#include "apsis/orbit.hpp"
#include "apsis/report.hpp"
#include "apsis/tail.hpp"

namespace apsis {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write '" + path + "'");
  out << content;
}

inline std::vector<std::string> all_campaign_names() {
  std::vector<std::string> names;
  for (const auto& c : kCampaigns) names.emplace_back(c.name);
  return names;
}

inline ReportFormat parse_format(const std::string& f) {
  if (f == "json") return ReportFormat::json;
  if (f == "csv") return ReportFormat::csv;
  if (f == "text") return ReportFormat::text;
  throw DomainError("unknown format '" + f + "' (json, csv or text)");
}

inline int run_verify(RunConfig cfg, std::ostream& out) {
  if (cfg.campaigns.empty() ||
      (cfg.campaigns.size() == 1 && cfg.campaigns.front() == "all")) {
    cfg.campaigns = all_campaign_names();
  }
  cfg.validate();
  if (!cfg.csv_path.empty() && cfg.campaigns.size() != 1) {
    throw DomainError("per-cell CSV output needs a single campaign");
  }
  // Build every grid first so bad overrides fail before any sweep starts.
  for (const auto& name : cfg.campaigns) campaign_grids(name, cfg.consts, cfg.scale_for(name));

  std::vector<CampaignReport> reports;
  std::string text;
  for (const auto& name : cfg.campaigns) {
    CampaignOptions opts;
    opts.sweep.workers = cfg.workers;
    opts.sweep.refine_depth = cfg.refine_depth;
    opts.sweep.record_cells = !cfg.csv_path.empty();
    opts.grid_scale = cfg.scale_for(name);
    reports.push_back(run_campaign(name, cfg.consts, opts));
    text += report_text(reports.back());
    out << report_text(reports.back()) << std::flush;
  }
  const Json summary = campaigns_to_json(reports);
  if (!cfg.json_path.empty()) write_file(cfg.json_path, summary.dump(2) + "\n");
  if (!cfg.text_path.empty()) write_file(cfg.text_path, text);
  if (!cfg.csv_path.empty()) write_file(cfg.csv_path, emit_report(reports.front(), ReportFormat::csv));
  bool all = true;
  for (const auto& r : reports) all = all && r.passed();
  out << "verify: " << (all ? "pass" : "fail") << " (" << reports.size() << " campaign"
      << (reports.size() == 1 ? "" : "s") << ")\n";
  return all ? kExitPass : kExitFail;
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    v.push_back(parse_number("--alphas", item));
  }
  if (v.empty()) throw DomainError("--alphas needs at least one value");
  return v;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interval verification of apsidal-angle monotonicity and orbit computations", "apsis"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file");

  RunConfig cfg;
  std::vector<std::string> campaigns;
  double grid_scale = 0.0;
  auto* verify = app.add_subcommand("verify", "run positivity campaigns");
  verify->add_option("--campaign", campaigns, "campaign names (comma separated) or 'all'")
      ->delimiter(',')
      ->default_str("all");
  verify->add_option("--workers", cfg.workers, "worker threads (default APSIS_WORKERS or all cores)");
  verify->add_option("--refine-depth", cfg.refine_depth, "bisection depth for non-positive cells");
  verify->add_option("--grid-scale", grid_scale, "coarsen every grid by this factor");
  verify->add_option("--json", cfg.json_path, "write the JSON summary here");
  verify->add_option("--csv", cfg.csv_path, "write per-cell lower bounds here (single campaign)");
  verify->add_option("--text", cfg.text_path, "write the text report here");

  double alpha = 0.0;
  double q = -1.0;
  double e = -1.0;
  auto* angle = app.add_subcommand("angle", "apsidal angle for one orbit");
  angle->add_option("--alpha", alpha, "power-law exponent (< 2)")->required();
  auto* q_opt = angle->add_option("--q", q, "q = 1 - r_-/r_+ in (0, 1)");
  auto* e_opt = angle->add_option("--e", e, "eccentricity in (0, 1)");
  q_opt->excludes(e_opt);
  e_opt->excludes(q_opt);

  std::string alphas;
  int e_steps = 50;
  std::string sweep_csv;
  auto* sweep_cmd = app.add_subcommand("sweep", "apsidal angle over an e grid (CSV table)");
  sweep_cmd->add_option("--alphas", alphas, "comma-separated exponents")->required();
  sweep_cmd->add_option("--e-steps", e_steps, "number of e points in (0, 1)")->default_val(50);
  sweep_cmd->add_option("--csv", sweep_csv, "write the CSV here instead of stdout");

  long p_max = 200;
  std::string tail_jsonl;
  auto* tail = app.add_subcommand("tail", "tail ladder and direct T^p check");
  tail->add_option("--p-max", p_max, "last p of the ladder")->default_val(200);
  tail->add_option("--jsonl", tail_jsonl, "write JSON-lines records here");

  std::string in_path;
  std::string format = "text";
  auto* report = app.add_subcommand("report", "re-emit a saved JSON summary");
  report->add_option("--in", in_path, "JSON summary written by verify")->required();
  report->add_option("--format", format, "text or json")->default_val("text");

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*verify) {
      if (!config_path.empty()) {
        RunConfig from_file;
        load_config_file(config_path, from_file);
        // Command-line values win over the file.
        if (verify->count("--workers") == 0) cfg.workers = from_file.workers;
        if (verify->count("--refine-depth") == 0) cfg.refine_depth = from_file.refine_depth;
        if (verify->count("--json") == 0) cfg.json_path = from_file.json_path;
        if (verify->count("--csv") == 0) cfg.csv_path = from_file.csv_path;
        if (verify->count("--text") == 0) cfg.text_path = from_file.text_path;
        cfg.grid_scale = from_file.grid_scale;
        cfg.campaign_grid_scale = from_file.campaign_grid_scale;
        cfg.consts = from_file.consts;
      }
      cfg.command = "verify";
      if (verify->count("--grid-scale")) cfg.grid_scale = grid_scale;
      if (!campaigns.empty()) cfg.campaigns = campaigns;
      return detail::run_verify(cfg, out);
    }
    if (*angle) {
      if (angle->count("--q") + angle->count("--e") != 1) {
        err << "error: angle needs exactly one of --q or --e\n\n" << angle->help();
        return kExitUsage;
      }
      const double qq = angle->count("--q") ? q : e_to_q(e);
      const auto r = apsidal_angle_detailed(alpha, qq);
      char buf[160];
      std::snprintf(buf, sizeof buf, "alpha=%.17g q=%.17g e=%.17g delta_theta=%.17g\n", alpha, qq,
                    q_to_e(qq), r.value);
      out << buf;
      return kExitPass;
    }
    if (*sweep_cmd) {
      const auto m = monotonicity_sweep(detail::parse_list(alphas), default_e_grid(e_steps));
      std::ostringstream csv;
      write_monotonicity_csv(csv, m);
      if (sweep_csv.empty()) {
        out << csv.str();
      } else {
        detail::write_file(sweep_csv, csv.str());
      }
      for (const auto& s : m.summary) {
        if (!s.consistent) {
          err << "alpha=" << s.alpha << ": " << s.violations
              << " finite difference(s) with the wrong sign\n";
        }
      }
      return m.all_consistent() ? kExitPass : kExitFail;
    }
    if (*tail) {
      const TailReport ladder = sign_ladder_report(p_max);
      const TailReport coeff = default_tail_coeff_check_report();
      if (!tail_jsonl.empty()) {
        std::ostringstream os;
        write_tail_jsonl(os, ladder);
        write_tail_jsonl(os, coeff);
        detail::write_file(tail_jsonl, os.str());
      }
      out << "sign_ladder p=11.." << p_max << ": " << ladder.checks << " checks, "
          << ladder.violations << " violations\n";
      out << "tail_coeff_check p=11..40: " << coeff.checks << " checks, " << coeff.violations
          << " violations\n";
      const bool ok = ladder.passed() && coeff.passed();
      out << "tail: " << (ok ? "pass" : "fail") << '\n';
      return ok ? kExitPass : kExitFail;
    }
    if (*report) {
      std::ifstream in(in_path);
      if (!in) throw DomainError("cannot read '" + in_path + "'");
      const Json j = Json::parse(in);
      std::vector<CampaignReport> reports;
      if (j.contains("campaigns")) {
        for (const auto& c : j.at("campaigns")) reports.push_back(report_from_json(c));
      } else {
        reports.push_back(report_from_json(j));
      }
      const ReportFormat f = detail::parse_format(format);
      if (f == ReportFormat::csv) throw DomainError("saved summaries carry no per-cell data");
      if (f == ReportFormat::json) {
        out << campaigns_to_json(reports).dump(2) << '\n';
      } else {
        for (const auto& r : reports) out << report_text(r);
      }
      bool all = true;
      for (const auto& r : reports) all = all && r.passed();
      return all ? kExitPass : kExitFail;
    }
  } catch (const VerificationFailure& ex) {
    err << "verification failure: " << ex.what() << '\n';
    return kExitFail;
  } catch (const DomainError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace apsis
