#pragma once

// The positivity campaigns: each binds one bound function to its grid and
// certifies a strictly positive lower bound on every cell.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "apsis/error.hpp"
#include "apsis/funcs.hpp"
#include "apsis/grid.hpp"
#include "apsis/interval.hpp"
#include "apsis/sweep.hpp"

namespace apsis {

struct CampaignInfo {
  std::string_view name;
  double reference_min;
  std::string_view description;
};

inline constexpr std::array<CampaignInfo, 8> kCampaigns{{
    {"N0", 0.0056, "N0 on alpha in [0, alpha_bar], q in [0.9, q_max(alpha)]"},
    {"N0_tilde", 0.2721, "N0~ on alpha in [0, alpha_bar], q in [q_max(alpha), 1]"},
    {"N1", 0.01246, "N1 on alpha in [alpha_hat, 1], q in [0.9, q_hat]"},
    {"N1_tilde", 1.7509, "N1~ on alpha in [alpha_hat, 1], q in [q_hat, 1]"},
    {"N_mid", 0.0108, "(q/alpha^2) N~ on alpha in [alpha_bar, alpha_hat], q in [0.9, 1]"},
    {"M_f", 0.1223, "M^f on alpha in [0, 1], s in [0, 1/2], q in [0, q_bar]"},
    {"Z_f", 0.01987, "Z^f on alpha in [0, alpha_0], s in [0, 1/2], q in [q_bar, 0.9]"},
    {"I_tilde_f", 0.09260, "I~f on alpha in [alpha_0, 1], s in [0, 1/2], q in [q_bar, 0.9]"},
}};

inline const CampaignInfo& campaign_info(std::string_view name) {
  for (const auto& c : kCampaigns) {
    if (c.name == name) return c;
  }
  throw DomainError("unknown campaign '" + std::string(name) + "'");
}

/// Relative tolerance on the reference minima.
inline constexpr double kReferenceTolerance = 0.10;

inline bool within_reference(const CampaignReport& r) {
  if (!r.reference_min) return true;
  const double ref = *r.reference_min;
  return r.min_lower >= ref * (1.0 - kReferenceTolerance) &&
         r.min_lower <= ref * (1.0 + kReferenceTolerance);
}

struct CampaignOptions {
  SweepOptions sweep;
  // Multiplies every step (divides every equispaced count); > 1 coarsens.
  double grid_scale = 1.0;
};

namespace detail {

inline Axis scaled_axis(std::string name, std::vector<AxisSegment> segs, double scale) {
  if (!(scale > 0.0)) throw DomainError("grid_scale must be positive");
  if (scale != 1.0) {
    for (auto& s : segs) s = s.coarsened(scale);
  }
  return build_axis(std::move(name), segs);
}

// Alpha-dependent tables, rebuilt only when a worker moves to a new alpha
// cell. Cells are ordered alpha-outermost so this hits almost always.
inline const AlphaData<Interval>& cached_alpha_data(const Interval& alpha) {
  thread_local std::optional<AlphaData<Interval>> cache;
  if (!cache || !(cache->alpha == alpha)) cache.emplace(alpha);
  return *cache;
}

// r~ coefficients at (alpha, s) and (alpha, 1 - s), reused along the q axis.
inline const FinitePartCoefficients<Interval>& cached_s_coefficients(const AlphaData<Interval>& ad,
                                                                     const Interval& s) {
  struct Entry {
    Interval alpha;
    Interval s;
    FinitePartCoefficients<Interval> fc;
  };
  thread_local std::optional<Entry> cache;
  if (!cache || !(cache->alpha == ad.alpha) || !(cache->s == s)) {
    cache.emplace(Entry{ad.alpha, s, finite_part_coefficients(ad, s)});
  }
  return cache->fc;
}

// One 2-D block per alpha cell, with its own q band.
template <class Band>
std::vector<GridSpec> banded_blocks(const Axis& alpha_axis, Band band) {
  std::vector<GridSpec> blocks;
  for (std::size_t i = 0; i < alpha_axis.cells(); ++i) {
    const Interval a = alpha_axis.cell(i);
    Axis ax{"alpha", {a.lo(), a.hi()}};
    blocks.emplace_back(std::vector<Axis>{ax, band(a)});
  }
  return blocks;
}

}  // namespace detail

/// Grids of a campaign (one or more blocks, swept in order).
inline std::vector<GridSpec> campaign_grids(std::string_view name, const BoundConstants& c,
                                            double scale = 1.0) {
  using Seg = AxisSegment;
  using detail::scaled_axis;
  if (name == "N0") {
    const Axis alpha = scaled_axis(
        "alpha", {Seg::stepped(0.0, 0.04, 0.002), Seg::stepped(0.04, c.alpha_bar, 0.01)}, scale);
    return detail::banded_blocks(alpha, [&](const Interval& a) {
      return scaled_axis("q", {Seg::equispaced(0.9, q_max(a).hi(), 50)}, scale);
    });
  }
  if (name == "N0_tilde") {
    const Axis alpha = scaled_axis("alpha", {Seg::stepped(0.0, c.alpha_bar, 0.01)}, scale);
    return detail::banded_blocks(alpha, [&](const Interval& a) {
      return scaled_axis("q", {Seg::equispaced(q_max(a).lo(), 1.0, 5)}, scale);
    });
  }
  if (name == "N1") {
    const Axis alpha = scaled_axis(
        "alpha", {Seg::stepped(c.alpha_hat, 0.9, 0.002), Seg::stepped(0.9, 1.0, 0.01)}, scale);
    const Axis q = scaled_axis("q", {Seg::equispaced(0.9, q_hat<Interval>(c.alpha_hat).hi(), 30)}, scale);
    return {GridSpec({alpha, q})};
  }
  if (name == "N1_tilde") {
    const Axis alpha = scaled_axis("alpha", {Seg::stepped(c.alpha_hat, 1.0, 0.04)}, scale);
    const Axis q = scaled_axis("q", {Seg::equispaced(q_hat<Interval>(c.alpha_hat).lo(), 1.0, 5)}, scale);
    return {GridSpec({alpha, q})};
  }
  if (name == "N_mid") {
    const Axis alpha = scaled_axis("alpha", {Seg::stepped(c.alpha_bar, c.alpha_hat, 0.001)}, scale);
    const Axis q = scaled_axis(
        "q", {Seg::stepped(0.9, 0.95, 0.0015), Seg::stepped(0.95, 1.0, 0.003)}, scale);
    return {GridSpec({alpha, q})};
  }
  if (name == "M_f") {
    return {GridSpec({scaled_axis("alpha", {Seg::stepped(0.0, 1.0, 0.025)}, scale),
                      scaled_axis("s", {Seg::stepped(0.0, 0.5, 0.01)}, scale),
                      scaled_axis("q", {Seg::stepped(0.0, c.q_bar, 0.01)}, scale)})};
  }
  if (name == "Z_f") {
    return {GridSpec({scaled_axis("alpha", {Seg::stepped(0.0, c.alpha_0, 0.002)}, scale),
                      scaled_axis("s", {Seg::stepped(0.0, 0.5, 0.002)}, scale),
                      scaled_axis("q", {Seg::stepped(c.q_bar, 0.9, 0.001)}, scale)})};
  }
  if (name == "I_tilde_f") {
    return {GridSpec({scaled_axis("alpha", {Seg::stepped(c.alpha_0, 1.0, 0.005)}, scale),
                      scaled_axis("s", {Seg::stepped(0.0, 0.5, 0.005)}, scale),
                      scaled_axis("q", {Seg::stepped(c.q_bar, 0.9, 0.005)}, scale)})};
  }
  throw DomainError("unknown campaign '" + std::string(name) + "'");
}

/// Interval-valued function a campaign certifies. Boxes are (alpha, q) or
/// (alpha, s, q).
inline BoxFunction campaign_function(std::string_view name, const BoundConstants& c) {
  if (name == "N0") return [c](const Box& b) { return N0_pair(b[0], b[1], c, BandForm::plain); };
  if (name == "N0_tilde") return [c](const Box& b) { return N0_pair(b[0], b[1], c, BandForm::tilde); };
  if (name == "N1") return [c](const Box& b) { return N1_pair(b[0], b[1], c, BandForm::plain); };
  if (name == "N1_tilde") return [c](const Box& b) { return N1_pair(b[0], b[1], c, BandForm::tilde); };
  if (name == "N_mid") return [c](const Box& b) { return N_tilde(b[0], b[1], c); };
  if (name == "M_f") {
    return [c](const Box& b) {
      const auto& ad = detail::cached_alpha_data(b[0]);
      const auto& fc = detail::cached_s_coefficients(ad, b[1]);
      return M_f_from_coefficients(ad.alpha, b[1], fc.at_s, fc.at_complement, b[2], c);
    };
  }
  if (name == "Z_f") {
    return [c](const Box& b) {
      const auto& ad = detail::cached_alpha_data(b[0]);
      const auto& fc = detail::cached_s_coefficients(ad, b[1]);
      return Z_f_from_coefficients(ad.alpha, fc.at_s, fc.at_complement, b[2], c);
    };
  }
  if (name == "I_tilde_f") {
    return [c](const Box& b) {
      const auto& ad = detail::cached_alpha_data(b[0]);
      const auto& fc = detail::cached_s_coefficients(ad, b[1]);
      return I_tilde_f_from_coefficients(ad.alpha, fc.at_s, fc.at_complement, b[2], c);
    };
  }
  throw DomainError("unknown campaign '" + std::string(name) + "'");
}

inline std::vector<std::string> campaign_notes(std::string_view name) {
  if (name == "N0") {
    return {"reference printed as 'N0 <= 0.0056'; read as a lower bound like every other campaign",
            "q band per alpha cell ends at sup q_max(alpha cell)"};
  }
  if (name == "N0_tilde") return {"q band per alpha cell starts at inf q_max(alpha cell)"};
  if (name == "N1") return {"q band ends at sup of the enclosure of q_hat = 1 - exp(-4/alpha_hat)"};
  if (name == "N1_tilde") return {"q band starts at inf of the enclosure of q_hat"};
  if (name == "M_f" || name == "Z_f") {
    return {"checked on the whole box, not only where R~(1-s,q) < 0",
            "finite part uses p = 4..10; the tail p >= 11 is covered by the tail ladder"};
  }
  if (name == "I_tilde_f") {
    return {"region is the complement [alpha_0,1] x [0,1/2] x [q_bar,0.9] of the M_f and Z_f boxes",
            "finite part uses p = 4..10; the tail p >= 11 is covered by the tail ladder"};
  }
  return {};
}

inline CampaignReport run_campaign(std::string_view name, const BoundConstants& consts = {},
                                   const CampaignOptions& opts = {}) {
  consts.validate();
  const auto& info = campaign_info(name);
  CampaignReport r = sweep_blocks(campaign_function(name, consts),
                                  campaign_grids(name, consts, opts.grid_scale), opts.sweep);
  r.name = std::string(info.name);
  r.reference_min = info.reference_min;
  r.notes = campaign_notes(name);
  if (opts.grid_scale != 1.0) {
    r.notes.push_back("grid coarsened by factor " + std::to_string(opts.grid_scale));
  }
  return r;
}

}  // namespace apsis
