#pragma once

// Axis breakpoint lists and the boxes (cells) of their Cartesian product.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "apsis/error.hpp"
#include "apsis/interval.hpp"

namespace apsis {

/// One piece of an axis: [min, max] split by a fixed step (last cell may be
/// shorter) or into `count` numerically equispaced cells.
struct AxisSegment {
  enum class Kind { step, equispaced };

  double min = 0.0;
  double max = 1.0;
  Kind kind = Kind::step;
  double step = 0.0;
  int count = 0;

  static AxisSegment stepped(double lo, double hi, double delta) {
    return {lo, hi, Kind::step, delta, 0};
  }
  static AxisSegment equispaced(double lo, double hi, int n) {
    return {lo, hi, Kind::equispaced, 0.0, n};
  }

  /// Same segment with `factor` times fewer cells.
  AxisSegment coarsened(double factor) const {
    AxisSegment c = *this;
    if (kind == Kind::step) {
      c.step = step * factor;
    } else {
      c.count = std::max(1, static_cast<int>(std::ceil(count / factor)));
    }
    return c;
  }
};

struct Axis {
  std::string name;
  std::vector<double> breakpoints;

  std::size_t cells() const { return breakpoints.size() - 1; }
  Interval cell(std::size_t i) const { return {breakpoints[i], breakpoints[i + 1]}; }
  double min() const { return breakpoints.front(); }
  double max() const { return breakpoints.back(); }
};

/// Concatenates segments into one ascending breakpoint list. Adjacent
/// segments must share their boundary value.
inline Axis build_axis(std::string name, const std::vector<AxisSegment>& segments) {
  if (segments.empty()) throw DomainError("axis '" + name + "' has no segments");
  Axis axis{std::move(name), {}};
  for (const auto& seg : segments) {
    if (!(seg.min < seg.max)) {
      throw DomainError("axis '" + axis.name + "': segment min must be < max");
    }
    if (axis.breakpoints.empty()) {
      axis.breakpoints.push_back(seg.min);
    } else if (axis.breakpoints.back() != seg.min) {
      throw DomainError("axis '" + axis.name + "': segments are not contiguous");
    }
    if (seg.kind == AxisSegment::Kind::step) {
      if (!(seg.step > 0.0)) throw DomainError("axis '" + axis.name + "': step must be positive");
      const double slack = 1e-9 * seg.step;
      for (long i = 1;; ++i) {
        const double v = seg.min + static_cast<double>(i) * seg.step;
        if (v >= seg.max - slack) break;
        axis.breakpoints.push_back(v);
      }
    } else {
      if (seg.count < 1) throw DomainError("axis '" + axis.name + "': equispaced(n) needs n >= 1");
      const double h = (seg.max - seg.min) / seg.count;
      for (int j = 1; j < seg.count; ++j) axis.breakpoints.push_back(seg.min + j * h);
    }
    axis.breakpoints.push_back(seg.max);
  }
  return axis;
}

inline constexpr std::size_t kMaxDims = 3;

struct Box {
  std::array<Interval, kMaxDims> x{};
  std::size_t dim = 0;

  const Interval& operator[](std::size_t i) const { return x[i]; }
  Interval& operator[](std::size_t i) { return x[i]; }
};

/// Cartesian product of axes; cell indices are row-major (last axis fastest).
class GridSpec {
 public:
  GridSpec() = default;
  explicit GridSpec(std::vector<Axis> axes) : axes_(std::move(axes)) {
    if (axes_.empty() || axes_.size() > kMaxDims) throw DomainError("grid needs 1..3 axes");
  }

  const std::vector<Axis>& axes() const { return axes_; }
  std::size_t dim() const { return axes_.size(); }

  std::size_t cell_count() const {
    std::size_t n = 1;
    for (const auto& a : axes_) n *= a.cells();
    return n;
  }

  Box cell(std::size_t index) const {
    Box b;
    b.dim = axes_.size();
    for (std::size_t k = axes_.size(); k-- > 0;) {
      const std::size_t n = axes_[k].cells();
      b[k] = axes_[k].cell(index % n);
      index /= n;
    }
    return b;
  }

  /// FNV-1a over axis names and breakpoint bit patterns.
  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* data, std::size_t len) {
      const auto* p = static_cast<const unsigned char*>(data);
      for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
      }
    };
    for (const auto& a : axes_) {
      mix(a.name.data(), a.name.size());
      for (double v : a.breakpoints) mix(&v, sizeof v);
    }
    return h;
  }

 private:
  std::vector<Axis> axes_;
};

inline std::uint64_t combine_hash(std::uint64_t seed, std::uint64_t h) {
  return seed ^ (h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace apsis
