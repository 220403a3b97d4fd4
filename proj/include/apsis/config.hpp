#pragma once

// Run configuration: key = value text files with '#' comments.
//
//   workers = 8
//   refine_depth = 0
//   grid_scale = 1            # all campaigns
//   grid_scale.Z_f = 2        # one campaign
//   consts.alpha_bar = 0.15   # also alpha_hat, q_bar, alpha_0
//   output.json = report.json
//   output.csv = cells.csv
//   output.text = report.txt

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "apsis/campaigns.hpp"
#include "apsis/error.hpp"
#include "apsis/funcs.hpp"

namespace apsis {

struct RunConfig {
  std::string command;
  std::vector<std::string> campaigns;
  double grid_scale = 1.0;
  std::map<std::string, double> campaign_grid_scale;
  BoundConstants consts;
  std::string json_path;
  std::string csv_path;
  std::string text_path;
  unsigned workers = 0;
  int refine_depth = 0;

  double scale_for(const std::string& campaign) const {
    const auto it = campaign_grid_scale.find(campaign);
    return it == campaign_grid_scale.end() ? grid_scale : it->second;
  }

  void validate() const {
    consts.validate();
    if (!(grid_scale > 0.0)) throw DomainError("grid_scale must be positive");
    for (const auto& [name, s] : campaign_grid_scale) {
      campaign_info(name);
      if (!(s > 0.0)) throw DomainError("grid_scale." + name + " must be positive");
    }
    for (const auto& c : campaigns) campaign_info(c);
    if (refine_depth < 0) throw DomainError("refine_depth must be >= 0");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw DomainError("config key '" + key + "': '" + v + "' is not a number");
  }
  if (used != v.size()) throw DomainError("config key '" + key + "': '" + v + "' is not a number");
  return x;
}

}  // namespace detail

/// Applies the settings in `text` on top of `cfg`.
inline void apply_config_text(const std::string& text, RunConfig& cfg) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DomainError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key == "workers") {
      const double w = detail::parse_number(key, val);
      if (w < 0 || w != static_cast<unsigned>(w)) throw DomainError("workers must be a non-negative integer");
      cfg.workers = static_cast<unsigned>(w);
    } else if (key == "refine_depth") {
      const double d = detail::parse_number(key, val);
      if (d != static_cast<int>(d)) throw DomainError("refine_depth must be an integer");
      cfg.refine_depth = static_cast<int>(d);
    } else if (key == "grid_scale") {
      cfg.grid_scale = detail::parse_number(key, val);
    } else if (key.rfind("grid_scale.", 0) == 0) {
      cfg.campaign_grid_scale[key.substr(11)] = detail::parse_number(key, val);
    } else if (key == "consts.alpha_bar") {
      cfg.consts.alpha_bar = detail::parse_number(key, val);
    } else if (key == "consts.alpha_hat") {
      cfg.consts.alpha_hat = detail::parse_number(key, val);
    } else if (key == "consts.q_bar") {
      cfg.consts.q_bar = detail::parse_number(key, val);
    } else if (key == "consts.alpha_0") {
      cfg.consts.alpha_0 = detail::parse_number(key, val);
    } else if (key == "output.json") {
      cfg.json_path = val;
    } else if (key == "output.csv") {
      cfg.csv_path = val;
    } else if (key == "output.text") {
      cfg.text_path = val;
    } else {
      throw DomainError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
}

inline void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(ss.str(), cfg);
}

}  // namespace apsis
