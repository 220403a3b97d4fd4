#pragma once

// Box sweeping: evaluate an interval-valued function on every cell of one
// or more grids and certify a strictly positive lower bound.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "apsis/error.hpp"
#include "apsis/grid.hpp"
#include "apsis/interval.hpp"

namespace apsis {

using BoxFunction = std::function<Interval(const Box&)>;

enum class Verdict { pass, fail, undecided };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::undecided: return "undecided";
  }
  return "?";
}

struct CellResult {
  std::size_t index = 0;
  Box box;
  Interval value;
};

struct CampaignReport {
  std::string name;
  std::vector<std::string> axis_names;
  std::size_t cell_count = 0;
  double min_lower = std::numeric_limits<double>::infinity();
  std::size_t argmin_index = 0;
  Box argmin_box;
  std::size_t failure_count = 0;
  std::vector<CellResult> failures;   // first kMaxListedCells, by index
  std::size_t undecided_count = 0;
  std::vector<CellResult> undecided;  // leaves left open by refinement
  std::size_t refined_cells = 0;
  double wall_time_s = 0.0;
  std::uint64_t grid_hash = 0;
  std::optional<double> reference_min;
  std::vector<std::string> notes;
  std::vector<CellResult> cells;  // filled only when recording per-cell output

  static constexpr std::size_t kMaxListedCells = 1000;

  Verdict verdict() const {
    if (failure_count > 0) return Verdict::fail;
    if (undecided_count > 0) return Verdict::undecided;
    return Verdict::pass;
  }
  bool passed() const { return verdict() == Verdict::pass; }
};

struct SweepOptions {
  unsigned workers = 0;  // 0: APSIS_WORKERS or hardware concurrency
  int refine_depth = 0;  // > 0: bisect non-positive cells before failing them
  bool record_cells = false;
};

/// Worker count from APSIS_WORKERS, else hardware concurrency.
inline unsigned default_workers() {
  if (const char* env = std::getenv("APSIS_WORKERS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(n);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

namespace detail {

inline std::string describe(const Box& b) {
  std::string s;
  for (std::size_t i = 0; i < b.dim; ++i) {
    if (i) s += " x ";
    s += b[i].str();
  }
  return s;
}

// Widths are measured relative to `root`, so repeated bisection splits every
// axis in turn regardless of the units of each coordinate.
inline std::size_t widest_axis(const Box& b, const Box& root) {
  std::size_t widest = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < b.dim; ++i) {
    const double rw = root[i].hi() - root[i].lo();
    const double w = rw > 0.0 ? (b[i].hi() - b[i].lo()) / rw : 0.0;
    if (w > best) {
      best = w;
      widest = i;
    }
  }
  return widest;
}

inline Box bisect(const Box& b, const Box& root, bool upper_half) {
  const std::size_t widest = widest_axis(b, root);
  Box out = b;
  const double m = b[widest].mid();
  out[widest] = upper_half ? Interval(m, b[widest].hi()) : Interval(b[widest].lo(), m);
  return out;
}

struct RefineOutcome {
  double min_lower = std::numeric_limits<double>::infinity();
  bool failed = false;  // some sub-box is certainly non-positive
  std::vector<Box> open;
};

inline void refine(const BoxFunction& fn, const Box& box, const Box& root, int depth,
                   RefineOutcome& out) {
  const Interval v = fn(box);
  if (v.lo() > 0.0) {
    out.min_lower = std::min(out.min_lower, v.lo());
    return;
  }
  if (v.hi() <= 0.0) {
    out.failed = true;
    out.min_lower = std::min(out.min_lower, v.lo());
    out.open.push_back(box);
    return;
  }
  const Interval& split = box[widest_axis(box, root)];
  if (depth == 0 || split.mid() == split.lo()) {
    out.min_lower = std::min(out.min_lower, v.lo());
    out.open.push_back(box);
    return;
  }
  refine(fn, bisect(box, root, false), root, depth - 1, out);
  refine(fn, bisect(box, root, true), root, depth - 1, out);
}

struct ChunkResult {
  double min_lower = std::numeric_limits<double>::infinity();
  std::size_t argmin = 0;
  std::vector<CellResult> failures;
  std::vector<CellResult> undecided;
  std::size_t failure_count = 0;
  std::size_t undecided_count = 0;
  std::size_t refined = 0;
  std::vector<CellResult> cells;
  std::optional<std::pair<std::size_t, std::string>> error;
};

}  // namespace detail

/// Bisects `box` along its widest axis (relative to `box` itself) until every piece is certified
/// positive or `max_depth` levels are used. Leaves that stay open are
/// reported as undecided; leaves certainly <= 0 as failures.
inline CampaignReport adaptive_refine(const BoxFunction& fn, const Box& box, int max_depth) {
  if (max_depth < 1) throw DomainError("adaptive_refine needs max_depth >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  detail::RefineOutcome out;
  detail::refine(fn, box, box, max_depth, out);
  CampaignReport r;
  r.name = "adaptive_refine";
  r.cell_count = 1;
  r.min_lower = out.min_lower;
  r.argmin_box = box;
  r.refined_cells = 1;
  for (const auto& b : out.open) {
    CellResult c{0, b, fn(b)};
    if (out.failed && c.value.hi() <= 0.0) {
      ++r.failure_count;
      r.failures.push_back(c);
    } else {
      ++r.undecided_count;
      r.undecided.push_back(c);
    }
  }
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// Evaluates `fn` on every cell of every grid in `blocks` (global cell index
/// runs through the blocks in order). Aggregation is by cell index, so the
/// report does not depend on the number of workers.
inline CampaignReport sweep_blocks(const BoxFunction& fn, const std::vector<GridSpec>& blocks,
                                   const SweepOptions& opts = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::size_t> offsets;
  std::size_t total = 0;
  for (const auto& g : blocks) {
    offsets.push_back(total);
    total += g.cell_count();
  }
  auto locate = [&](std::size_t global) -> Box {
    const auto it = std::upper_bound(offsets.begin(), offsets.end(), global);
    const std::size_t b = static_cast<std::size_t>(it - offsets.begin()) - 1;
    return blocks[b].cell(global - offsets[b]);
  };

  constexpr std::size_t kChunk = 4096;
  const std::size_t n_chunks = (total + kChunk - 1) / kChunk;
  std::vector<detail::ChunkResult> chunks(n_chunks);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      auto& out = chunks[c];
      const std::size_t end = std::min(total, (c + 1) * kChunk);
      for (std::size_t i = c * kChunk; i < end; ++i) {
        const Box box = locate(i);
        Interval v;
        try {
          v = fn(box);
        } catch (const std::exception& e) {
          out.error = {i, e.what()};
          return;
        }
        if (opts.record_cells) out.cells.push_back({i, box, v});
        double lower = v.lo();
        if (lower <= 0.0 && opts.refine_depth > 0) {
          ++out.refined;
          detail::RefineOutcome ro;
          try {
            detail::refine(fn, box, box, opts.refine_depth, ro);
          } catch (const std::exception& e) {
            out.error = {i, e.what()};
            return;
          }
          lower = ro.min_lower;
          if (!ro.open.empty()) {
            auto& list = ro.failed ? out.failures : out.undecided;
            auto& count = ro.failed ? out.failure_count : out.undecided_count;
            ++count;
            if (list.size() < CampaignReport::kMaxListedCells) list.push_back({i, box, v});
          }
        } else if (lower <= 0.0) {
          ++out.failure_count;
          if (out.failures.size() < CampaignReport::kMaxListedCells) {
            out.failures.push_back({i, box, v});
          }
        }
        if (lower < out.min_lower) {
          out.min_lower = lower;
          out.argmin = i;
        }
      }
    }
  };

  const unsigned workers =
      std::max(1U, std::min<unsigned>(opts.workers ? opts.workers : default_workers(),
                                      static_cast<unsigned>(std::max<std::size_t>(n_chunks, 1))));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  CampaignReport r;
  r.cell_count = total;
  for (const auto& g : blocks) r.grid_hash = combine_hash(r.grid_hash, g.hash());
  if (!blocks.empty()) {
    for (const auto& a : blocks.front().axes()) r.axis_names.push_back(a.name);
  }
  for (const auto& ch : chunks) {
    if (ch.error) {
      throw DomainError("evaluation failed on cell " + std::to_string(ch.error->first) + " " +
                        detail::describe(locate(ch.error->first)) + ": " + ch.error->second);
    }
  }
  for (const auto& ch : chunks) {
    if (ch.min_lower < r.min_lower) {
      r.min_lower = ch.min_lower;
      r.argmin_index = ch.argmin;
    }
    r.failure_count += ch.failure_count;
    r.undecided_count += ch.undecided_count;
    r.refined_cells += ch.refined;
    for (const auto& f : ch.failures) {
      if (r.failures.size() < CampaignReport::kMaxListedCells) r.failures.push_back(f);
    }
    for (const auto& u : ch.undecided) {
      if (r.undecided.size() < CampaignReport::kMaxListedCells) r.undecided.push_back(u);
    }
    r.cells.insert(r.cells.end(), ch.cells.begin(), ch.cells.end());
  }
  if (total > 0) r.argmin_box = locate(r.argmin_index);
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline CampaignReport sweep(const BoxFunction& fn, const GridSpec& grid, const SweepOptions& opts = {}) {
  return sweep_blocks(fn, {grid}, opts);
}

}  // namespace apsis
