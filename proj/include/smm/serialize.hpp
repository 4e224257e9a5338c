#pragma once

#include <optional>
#include <string>
#include <utility>

#include "smm/analysis.hpp"
#include "smm/montecarlo.hpp"

namespace smm {

// Edge list CSV: header `i,j,length`, one edge per row.
std::string edges_to_csv(const Matching& matching, const PointConfig& points);
// Parses an edge list for `points`. Degrees are taken from the edges, so the
// returned marks have no leftovers.
std::pair<Matching, MarkedConfig> edges_from_csv(const std::string& text, const PointConfig& points);

// {schema, scheme, n, edges, leftovers, rounds}
ordered_json matching_summary(const Matching& matching);

struct AnalyzeOptions {
  std::optional<std::pair<double, double>> good_window;
  bool component_lists = false;
};

ordered_json analyze_json(const Matching& matching, const MarkedConfig& marked, const AnalyzeOptions& options);

// Per-point rows `index,pos,degree,M,X,class`.
std::string point_stats_csv(const Matching& matching, const MarkedConfig& marked);

struct DrawOptions {
  bool color_stubs = false;  // directed schemes: tick marks per right/left stub
  bool meta = true;          // timestamp comment
  double width = 1200.0;
};

// Arc diagram: points on a horizontal axis, one semicircular <path> per edge.
std::string draw_svg(const Matching& matching, const PointConfig& points, const DrawOptions& options);

}  // namespace smm
