#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pcm/geometry.hpp"

namespace pcm {

struct MarkedPoint {
  double x = 0.0;
  double y = 0.0;
  int mark = 1;  // cell type, 1..n_types
};

struct MarkedPointPattern {
  std::string subject_id;
  std::vector<MarkedPoint> points;
  Rect window;
  std::optional<int> group;  // 0 = control, 1 = cancer; absent = single group

  std::size_t size() const { return points.size(); }
};

// Points CSV: header subject_id,x,y,type[,group]; windows CSV: header
// subject_id,xmin,xmax,ymin,ymax. Subjects keep first-appearance order.
// Validation failures (missing window, point outside window, bad mark,
// degenerate window) throw with the offending row identified.
std::vector<MarkedPointPattern> load_patterns(const std::string& points_file,
                                              const std::string& windows_file,
                                              int n_types);

void write_points_csv(const std::string& path,
                      const std::vector<MarkedPointPattern>& patterns);
void write_windows_csv(const std::string& path,
                       const std::vector<MarkedPointPattern>& patterns);

}  // namespace pcm
