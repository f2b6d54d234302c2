#pragma once

#include <algorithm>
#include <cmath>

namespace pcm {

// Axis-aligned rectangle; all window/region membership tests use closed
// intervals on every side.
struct Rect {
  double xmin = 0.0;
  double xmax = 0.0;
  double ymin = 0.0;
  double ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }

  bool valid() const { return width() > 0.0 && height() > 0.0; }

  bool contains(double x, double y) const {
    return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
  }

  // True when `inner` lies fully inside `*this`. The tolerance absorbs
  // round-off when a grid exactly spans a window.
  bool covers(const Rect& inner, double tol = 0.0) const {
    return inner.xmin >= xmin - tol && inner.xmax <= xmax + tol &&
           inner.ymin >= ymin - tol && inner.ymax <= ymax + tol;
  }
};

}  // namespace pcm
