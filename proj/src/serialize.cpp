#include "smm/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <set>
#include <sstream>

#include "smm/errors.hpp"

namespace smm {

std::string edges_to_csv(const Matching& matching, const PointConfig& points) {
  std::ostringstream out;
  out << "i,j,length\n";
  for (const Edge& e : matching.edges)
    out << e.u << ',' << e.v << ',' << format_real(points.distance(e.u, e.v)) << '\n';
  return out.str();
}

namespace {

std::uint32_t parse_index(std::string_view s, std::size_t line) {
  std::uint32_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ParseError(line, "malformed index '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::pair<Matching, MarkedConfig> edges_from_csv(const std::string& text, const PointConfig& points) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "i,j,length") throw ParseError(1, "expected header 'i,j,length'");

  const std::size_t n = points.size();
  std::vector<Edge> edges;
  std::set<Edge> seen;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos) throw ParseError(lineno, "expected three fields");
    const std::string_view view(line);
    const std::uint32_t i = parse_index(view.substr(0, c1), lineno);
    const std::uint32_t j = parse_index(view.substr(c1 + 1, c2 - c1 - 1), lineno);
    if (i >= n || j >= n) throw ParseError(lineno, "index out of range");
    if (i == j) throw ParseError(lineno, "self-loop");
    const Edge e(i, j);
    if (!seen.insert(e).second) throw ParseError(lineno, "duplicate edge");
    edges.push_back(e);
  }
  std::sort(edges.begin(), edges.end());

  Matching m;
  m.scheme = Scheme::Stable;
  m.n = n;
  m.edges = std::move(edges);
  m.leftover.assign(n, 0);
  MarkedConfig marked{points, m.degrees(), std::nullopt};
  // Isolated points still carry one (unused) stub so the marks stay valid.
  for (std::size_t k = 0; k < n; ++k) {
    if (marked.degrees[k] == 0) {
      marked.degrees[k] = 1;
      m.leftover[k] = 1;
    }
  }
  return {std::move(m), std::move(marked)};
}

ordered_json matching_summary(const Matching& matching) {
  ordered_json j;
  j["schema"] = 1;
  j["scheme"] = to_string(matching.scheme);
  j["n"] = matching.n;
  j["edges"] = matching.edges.size();
  j["leftovers"] = matching.total_leftover();
  j["rounds"] = matching.rounds;
  return j;
}

ordered_json analyze_json(const Matching& matching, const MarkedConfig& marked, const AnalyzeOptions& options) {
  const PointConfig& pts = marked.config;
  const ComponentSummary comps = components(matching);
  ordered_json j;
  j["schema"] = 1;
  j["n"] = matching.n;
  j["edges"] = matching.edges.size();
  j["leftovers"] = matching.total_leftover();
  j["components"] = comps.components.size();
  j["largest_component"] = comps.largest_size();
  j["largest_fraction"] = comps.largest_fraction;
  std::map<std::size_t, std::size_t> sizes;
  for (const auto& c : comps.components) ++sizes[c.size()];
  ordered_json hist = ordered_json::object();
  for (const auto& [size, count] : sizes) hist[std::to_string(size)] = count;
  j["component_sizes"] = hist;
  if (options.component_lists) j["component_lists"] = comps.components;

  j["crossing_pairs"] = count_crossing_pairs(matching);
  j["closure_violations"] = check_cross_closure(matching).size();

  const EdgeStats stats = point_stats(matching, pts);
  double sum_m = 0.0, sum_x = 0.0;
  for (const auto& s : stats.points) {
    sum_m += s.longest;
    sum_x += s.mean;
  }
  const double n = std::max<double>(1.0, static_cast<double>(matching.n));
  j["mean_longest_edge"] = sum_m / n;
  j["mean_edge_length"] = sum_x / n;

  if (options.good_window) {
    const auto [a, b] = *options.good_window;
    j["window"] = ordered_json{a, b};
    j["good"] = is_good(matching, pts, a, b);
    const auto path = spanning_path(matching, pts, a, b);
    if (path) j["spanning_path"] = *path;
    else j["spanning_path"] = nullptr;
  }
  return j;
}

std::string point_stats_csv(const Matching& matching, const MarkedConfig& marked) {
  std::vector<PointClass> classes(marked.size(), PointClass::Other);
  if (matching.rights) {
    MarkedConfig oriented = marked;
    oriented.rights = matching.rights;
    classes = classify_beaks(oriented);
  } else if (marked.has_rights()) {
    classes = classify_beaks(marked);
  }
  const EdgeStats stats = point_stats(matching, marked.config, &classes);
  std::ostringstream out;
  out << "index,pos,degree,M,X,class\n";
  for (std::size_t i = 0; i < stats.points.size(); ++i) {
    const auto& s = stats.points[i];
    out << i << ',' << format_real(marked.config[i]) << ',' << s.degree << ',' << format_real(s.longest) << ','
        << format_real(s.mean) << ',' << to_string(s.cls) << '\n';
  }
  return out.str();
}

std::string draw_svg(const Matching& matching, const PointConfig& points, const DrawOptions& options) {
  if (matching.n != points.size()) throw ArgumentError("matching and points disagree on size");
  const double margin = 20.0;
  const double width = options.width;
  const double span = width - 2.0 * margin;
  const double extent = points.topology().extent;
  auto sx = [&](double x) { return margin + span * x / extent; };

  double tallest = 0.0;
  for (const Edge& e : matching.edges) tallest = std::max(tallest, (sx(points[e.v]) - sx(points[e.u])) / 2.0);
  const double axis_y = margin + std::max(10.0, tallest);
  const double height = axis_y + margin + 10.0;

  auto num = [](double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
  };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
  if (options.meta) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "<!-- generated " << stamp << " -->\n";
  }
  out << "<line class=\"axis\" x1=\"" << num(margin) << "\" y1=\"" << num(axis_y) << "\" x2=\""
      << num(width - margin) << "\" y2=\"" << num(axis_y) << "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  out << "<g fill=\"none\" stroke=\"#1f3b73\" stroke-width=\"0.8\">\n";
  for (const Edge& e : matching.edges) {
    const double x1 = sx(points[e.u]);
    const double x2 = sx(points[e.v]);
    const double r = (x2 - x1) / 2.0;
    out << "<path class=\"arc\" d=\"M " << num(x1) << ' ' << num(axis_y) << " A " << num(r) << ' ' << num(r)
        << " 0 0 1 " << num(x2) << ' ' << num(axis_y) << "\"/>\n";
  }
  out << "</g>\n";

  if (options.color_stubs && matching.rights) {
    out << "<g stroke-width=\"1\">\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double x = sx(points[i]);
      const int right = (*matching.rights)[i];
      const int left = matching.degrees()[i] + matching.leftover[i] - right;
      for (int k = 0; k < right; ++k)
        out << "<line class=\"stub-right\" x1=\"" << num(x) << "\" y1=\"" << num(axis_y - 2.0 * k)
            << "\" x2=\"" << num(x + 4.0) << "\" y2=\"" << num(axis_y - 2.0 * k - 3.0) << "\" stroke=\"#c0392b\"/>\n";
      for (int k = 0; k < left; ++k)
        out << "<line class=\"stub-left\" x1=\"" << num(x) << "\" y1=\"" << num(axis_y - 2.0 * k)
            << "\" x2=\"" << num(x - 4.0) << "\" y2=\"" << num(axis_y - 2.0 * k - 3.0) << "\" stroke=\"#27ae60\"/>\n";
    }
    out << "</g>\n";
  }

  out << "<g fill=\"#111\">\n";
  for (std::size_t i = 0; i < points.size(); ++i)
    out << "<circle cx=\"" << num(sx(points[i])) << "\" cy=\"" << num(axis_y) << "\" r=\"1.6\"/>\n";
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace smm
