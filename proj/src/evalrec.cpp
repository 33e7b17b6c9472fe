#include "farpn/evalrec.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace farpn {

namespace {

[[noreturn]] void parse_fail(int lineno, const std::string& what) {
  throw std::runtime_error("annotation parse error at line " +
                           std::to_string(lineno) + ": " + what);
}

}  // namespace

Dataset parse_annotations(const std::string& text) {
  Dataset ds;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;

  auto next_line = [&](std::string& out) -> bool {
    while (std::getline(is, out)) {
      ++lineno;
      if (!out.empty() && out.back() == '\r') out.pop_back();
      if (!out.empty()) return true;
    }
    return false;
  };

  while (next_line(line)) {
    DatasetEntry entry;
    entry.image_id = line;

    if (!next_line(line)) parse_fail(lineno, "missing image size");
    {
      std::istringstream ls(line);
      if (!(ls >> entry.width >> entry.height) || entry.width <= 0.0 ||
          entry.height <= 0.0) {
        parse_fail(lineno, "bad image size");
      }
    }

    if (!next_line(line)) parse_fail(lineno, "missing box count");
    long n = 0;
    {
      std::istringstream ls(line);
      if (!(ls >> n) || n < 0) parse_fail(lineno, "bad box count");
    }

    for (long i = 0; i < n; ++i) {
      if (!next_line(line)) parse_fail(lineno, "missing box line");
      std::istringstream ls(line);
      double x, y, w, h;
      if (!(ls >> x >> y >> w >> h)) parse_fail(lineno, "bad box");
      Box b = clip(Box{x, y, x + w, y + h}, entry.width, entry.height);
      if (b.area() <= 0.0) {
        ++ds.dropped_zero_area;
        continue;
      }
      entry.gts.push_back(b);
    }
    ds.entries.push_back(std::move(entry));
  }
  return ds;
}

std::string format_annotations(const Dataset& dataset) {
  std::ostringstream os;
  os.precision(17);
  for (const DatasetEntry& e : dataset.entries) {
    os << e.image_id << '\n' << e.width << ' ' << e.height << '\n'
       << e.gts.size() << '\n';
    for (const Box& b : e.gts) {
      os << b.x1 << ' ' << b.y1 << ' ' << b.width() << ' ' << b.height()
         << '\n';
    }
  }
  return os.str();
}

namespace {

// Matched ground-truth count for one image under rank-greedy one-to-one
// matching of the top_n proposals at the given IoU threshold.
int match_image(const std::vector<Proposal>& proposals,
                const std::vector<Box>& gts, int top_n, double thresh) {
  std::vector<bool> taken(gts.size(), false);
  int matched = 0;
  const int limit = std::min<int>(top_n, static_cast<int>(proposals.size()));
  for (int p = 0; p < limit; ++p) {
    int best = -1;
    double best_iou = 0.0;
    for (int g = 0; g < static_cast<int>(gts.size()); ++g) {
      if (taken[g]) continue;
      const double ov = iou(proposals[p].box, gts[g]);
      if (ov >= thresh && ov > best_iou) {
        best = g;
        best_iou = ov;
      }
    }
    if (best >= 0) {
      taken[best] = true;
      ++matched;
    }
  }
  return matched;
}

}  // namespace

RecallReport recall_at(const std::vector<std::vector<Proposal>>& per_image,
                       const Dataset& dataset,
                       const std::vector<double>& iou_thresholds,
                       const std::vector<int>& top_ns) {
  if (per_image.size() != dataset.entries.size()) {
    throw std::invalid_argument("proposal list count != dataset entry count");
  }
  RecallReport report;
  report.total_gts = dataset.total_gts();
  for (const auto& p : per_image) report.total_proposals += p.size();

  bool first_cell = true;
  for (int top_n : top_ns) {
    for (double thresh : iou_thresholds) {
      std::size_t matched = 0;
      std::vector<int> per_image_matched(per_image.size(), 0);
#pragma omp parallel for schedule(static) reduction(+ : matched)
      for (std::int64_t i = 0; i < static_cast<std::int64_t>(per_image.size());
           ++i) {
        const int m =
            match_image(per_image[i], dataset.entries[i].gts, top_n, thresh);
        per_image_matched[i] = m;
        matched += m;
      }
      const double recall =
          report.total_gts == 0
              ? 0.0
              : static_cast<double>(matched) / report.total_gts;
      report.cells.push_back(RecallCell{top_n, thresh, recall});
      if (first_cell) {
        report.matched_per_image = std::move(per_image_matched);
        first_cell = false;
      }
    }
  }
  return report;
}

std::string emit_report_csv(const RecallReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "top_n,iou_thresh,recall\n";
  for (const RecallCell& c : report.cells) {
    os << c.top_n << ',' << c.iou_thresh << ',' << c.recall << '\n';
  }
  return os.str();
}

std::string emit_report_json(const RecallReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const RecallCell& c : report.cells) {
    cells.push_back({{"top_n", c.top_n},
                     {"iou_thresh", c.iou_thresh},
                     {"recall", c.recall}});
  }
  nlohmann::json j{{"cells", cells},
                   {"total_gts", report.total_gts},
                   {"total_proposals", report.total_proposals}};
  return j.dump(2);
}

RecallReport parse_report_csv(const std::string& text) {
  RecallReport report;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "top_n,iou_thresh,recall") {
    throw std::runtime_error("bad report header");
  }
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    RecallCell c;
    if (!(ls >> c.top_n >> c.iou_thresh >> c.recall)) {
      throw std::runtime_error("malformed report row at line " +
                               std::to_string(lineno));
    }
    report.cells.push_back(c);
  }
  return report;
}

}  // namespace farpn
