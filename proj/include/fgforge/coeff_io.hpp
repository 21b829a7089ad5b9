#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "fgforge/geometry.hpp"

namespace fgforge {

// Versioned line-based text format for expansion coefficients.  Every float
// is encoded as a C99 hex literal, so write-then-read reproduces the metric
// bit for bit and identical runs produce byte-identical files.  Layout:
// a header (magic, eps, grid, floor, stored count, trusted ceiling), then
// one block per order and component in a fixed traversal order carrying a
// sup norm, a handful of projected Fourier modes for human inspection, and
// the dense grid values, then an explicit end marker.
inline constexpr const char* kCoeffMagic = "fgforge-coefficients-v1";

// Component names in symmetric storage order.
inline constexpr const char* kMetricComponentNames[6] = {"11", "12", "13",
                                                         "22", "23", "33"};

// Storage slot for a component name; throws ParseError on unknown names.
int metric_component_slot(const std::string& name);

// One projected Fourier mode of a stored coefficient block.
struct ModeSample {
  std::array<int, 3> k{0, 0, 0};
  double amp_cos = 0.0;
  double amp_sin = 0.0;
};

// Human-oriented digest of one (order, component) block; also embedded in
// run reports.
struct BlockSummary {
  int order = 0;
  std::string component;
  double sup = 0.0;
  std::vector<ModeSample> modes;
};

std::vector<BlockSummary> summarize_metric(const BulkMetric& bm);

// Exact textual encoding of a double used throughout the file (%a).
std::string hex_double(double v);

void write_coefficients(std::ostream& out, const BulkMetric& bm);
void write_coefficient_file(const std::string& path, const BulkMetric& bm);

// Strict parser: any structural deviation (wrong keyword, bad count, trailing
// content, unparsable number) throws ParseError.
BulkMetric read_coefficients(std::istream& in);
BulkMetric read_coefficient_file(const std::string& path);

}  // namespace fgforge
