#include "pcm/ingest.hpp"

#include <map>
#include <stdexcept>
#include <string>

#include "pcm/csv.hpp"

namespace pcm {

namespace {

std::string row_tag(const std::string& file, std::size_t row) {
  // +2: 1-based and the header line
  return file + ":" + std::to_string(row + 2);
}

}  // namespace

std::vector<MarkedPointPattern> load_patterns(const std::string& points_file,
                                              const std::string& windows_file,
                                              int n_types) {
  if (n_types < 1) throw std::runtime_error("n_types must be >= 1");

  const CsvTable windows = read_csv(windows_file);
  for (const char* col : {"subject_id", "xmin", "xmax", "ymin", "ymax"})
    if (windows.column(col) < 0)
      throw std::runtime_error(windows_file + ": missing column " +
                               std::string(col));
  std::map<std::string, Rect> window_by_subject;
  {
    const int c_id = windows.column("subject_id");
    const int c_x0 = windows.column("xmin");
    const int c_x1 = windows.column("xmax");
    const int c_y0 = windows.column("ymin");
    const int c_y1 = windows.column("ymax");
    for (std::size_t r = 0; r < windows.rows.size(); ++r) {
      const auto& row = windows.rows[r];
      const std::string where = row_tag(windows_file, r);
      Rect w;
      w.xmin = parse_double(row.at(c_x0), where);
      w.xmax = parse_double(row.at(c_x1), where);
      w.ymin = parse_double(row.at(c_y0), where);
      w.ymax = parse_double(row.at(c_y1), where);
      if (!w.valid())
        throw std::runtime_error("non-positive window at " + where);
      if (!window_by_subject.emplace(row.at(c_id), w).second)
        throw std::runtime_error("duplicate window for subject '" +
                                 row.at(c_id) + "' at " + where);
    }
  }

  const CsvTable points = read_csv(points_file);
  for (const char* col : {"subject_id", "x", "y", "type"})
    if (points.column(col) < 0)
      throw std::runtime_error(points_file + ": missing column " +
                               std::string(col));
  const int c_id = points.column("subject_id");
  const int c_x = points.column("x");
  const int c_y = points.column("y");
  const int c_type = points.column("type");
  const int c_group = points.column("group");

  std::vector<MarkedPointPattern> patterns;
  std::map<std::string, std::size_t> index_by_subject;
  for (std::size_t r = 0; r < points.rows.size(); ++r) {
    const auto& row = points.rows[r];
    const std::string where = row_tag(points_file, r);
    const std::string& id = row.at(c_id);
    auto it = index_by_subject.find(id);
    if (it == index_by_subject.end()) {
      auto win = window_by_subject.find(id);
      if (win == window_by_subject.end())
        throw std::runtime_error("no window for subject '" + id + "' at " +
                                 where);
      MarkedPointPattern p;
      p.subject_id = id;
      p.window = win->second;
      it = index_by_subject.emplace(id, patterns.size()).first;
      patterns.push_back(std::move(p));
    }
    MarkedPointPattern& pat = patterns[it->second];

    MarkedPoint pt;
    pt.x = parse_double(row.at(c_x), where);
    pt.y = parse_double(row.at(c_y), where);
    pt.mark = static_cast<int>(parse_long(row.at(c_type), where));
    if (pt.mark < 1 || pt.mark > n_types)
      throw std::runtime_error("mark " + std::to_string(pt.mark) +
                               " outside 1.." + std::to_string(n_types) +
                               " at " + where);
    if (!pat.window.contains(pt.x, pt.y))
      throw std::runtime_error("point outside window at " + where);
    pat.points.push_back(pt);

    if (c_group >= 0 && !row.at(c_group).empty()) {
      const long g = parse_long(row.at(c_group), where);
      if (g != 0 && g != 1)
        throw std::runtime_error("group must be 0 or 1 at " + where);
      if (pat.group && *pat.group != g)
        throw std::runtime_error("conflicting group for subject '" + id +
                                 "' at " + where);
      pat.group = static_cast<int>(g);
    }
  }
  return patterns;
}

void write_points_csv(const std::string& path,
                      const std::vector<MarkedPointPattern>& patterns) {
  CsvTable t;
  bool any_group = false;
  for (const auto& p : patterns) any_group = any_group || p.group.has_value();
  t.header = {"subject_id", "x", "y", "type"};
  if (any_group) t.header.push_back("group");
  for (const auto& p : patterns) {
    for (const auto& pt : p.points) {
      std::vector<std::string> row = {p.subject_id, format_double(pt.x),
                                      format_double(pt.y),
                                      std::to_string(pt.mark)};
      if (any_group)
        row.push_back(p.group ? std::to_string(*p.group) : std::string());
      t.rows.push_back(std::move(row));
    }
  }
  write_csv(path, t);
}

void write_windows_csv(const std::string& path,
                       const std::vector<MarkedPointPattern>& patterns) {
  CsvTable t;
  t.header = {"subject_id", "xmin", "xmax", "ymin", "ymax"};
  for (const auto& p : patterns) {
    t.rows.push_back({p.subject_id, format_double(p.window.xmin),
                      format_double(p.window.xmax),
                      format_double(p.window.ymin),
                      format_double(p.window.ymax)});
  }
  write_csv(path, t);
}

}  // namespace pcm
