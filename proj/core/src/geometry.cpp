#include "edctr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edctr/error.hpp"

namespace edctr {

double distance(Point a, Point b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

double chebyshev_distance(Point a, Point b) noexcept {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

std::string_view to_string(Region region) noexcept {
  switch (region) {
    case Region::Inner: return "inner";
    case Region::Middle: return "middle";
    case Region::Outer: return "outer";
  }
  return "?";
}

namespace {

void require_non_negative(double d, const char* what) {
  if (!(d >= 0.0) || !std::isfinite(d)) {
    throw Error(ErrorCategory::InvalidGeometry,
                std::string(what) + " must be a finite non-negative distance, got " + std::to_string(d));
  }
}

SquareCorners square_at(Point c, double d) {
  return SquareCorners{
      .top_right = {c.x + d, c.y + d},
      .bottom_right = {c.x + d, c.y - d},
      .top_left = {c.x - d, c.y + d},
      .bottom_left = {c.x - d, c.y - d},
  };
}

}  // namespace

SquareCorners internal_square_corners(Point center, double d) {
  require_non_negative(d, "d");
  return square_at(center, d);
}

SquareCorners nth_square_corners(Point center, double d_n) {
  require_non_negative(d_n, "d_n");
  return square_at(center, d_n);
}

FieldPartition::FieldPartition(Point center, std::array<double, 3> distances)
    : center_(center), distances_(distances) {
  if (!std::isfinite(center.x) || !std::isfinite(center.y)) {
    throw Error(ErrorCategory::InvalidGeometry, "field center must be finite");
  }
  double previous = 0.0;
  for (std::size_t k = 0; k < distances_.size(); ++k) {
    require_non_negative(distances_[k], "square distance");
    if (distances_[k] <= previous) {
      throw Error(ErrorCategory::InvalidGeometry,
                  "square distances must be positive and strictly increasing (index " +
                      std::to_string(k) + ")");
    }
    previous = distances_[k];
    squares_[k] = nth_square_corners(center_, distances_[k]);
  }
  segments_ = build_segments(*this);
}

FieldPartition FieldPartition::equal_rings(double field_side) {
  if (!(field_side > 0.0) || !std::isfinite(field_side)) {
    throw Error(ErrorCategory::InvalidGeometry, "field side must be positive");
  }
  const double half = field_side / 2.0;
  const double d = field_side / 6.0;
  return FieldPartition({half, half}, {d, 2.0 * d, half});
}

Rect FieldPartition::field_bounds() const noexcept {
  return Rect{squares_[2].bottom_left, squares_[2].top_right};
}

bool FieldPartition::in_field(Point p) const noexcept {
  return std::isfinite(p.x) && std::isfinite(p.y) && field_bounds().contains(p);
}

Region FieldPartition::classify(Point p) const {
  if (!in_field(p)) {
    throw Error(ErrorCategory::OutOfField,
                "point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") is outside the field");
  }
  const double c = chebyshev_distance(p, center_);
  if (c <= distances_[0]) return Region::Inner;
  if (c <= distances_[1]) return Region::Middle;
  return Region::Outer;
}

std::size_t FieldPartition::segment_index_of(Point p) const {
  const Region region = classify(p);
  if (region == Region::Inner) return 0;

  const double r_in = region == Region::Middle ? distances_[0] : distances_[1];
  const double dx = p.x - center_.x;
  const double dy = p.y - center_.y;
  const std::size_t base = region == Region::Middle ? 1 : 5;

  // Pinwheel ownership; order of RingSide in build_segments.
  if (dx > r_in && dy >= -r_in) return base + 1;   // right
  if (dy < -r_in && dx >= -r_in) return base + 2;  // bottom
  if (dx < -r_in && dy <= r_in) return base + 3;   // left
  return base;                                     // top
}

std::vector<Segment> build_segments(const FieldPartition& fp) {
  const Point c = fp.center();
  const auto& d = fp.distances();

  std::vector<Segment> out;
  out.reserve(9);

  Rect inner{{c.x - d[0], c.y - d[0]}, {c.x + d[0], c.y + d[0]}};
  out.push_back(Segment{Region::Inner, 0, RingSide::Whole, inner, inner.centroid()});

  for (const Region ring : {Region::Middle, Region::Outer}) {
    const double ri = ring == Region::Middle ? d[0] : d[1];
    const double ro = ring == Region::Middle ? d[1] : d[2];
    const std::array<std::pair<RingSide, Rect>, 4> sides{{
        {RingSide::Top, Rect{{c.x - ro, c.y + ri}, {c.x + ri, c.y + ro}}},
        {RingSide::Right, Rect{{c.x + ri, c.y - ri}, {c.x + ro, c.y + ro}}},
        {RingSide::Bottom, Rect{{c.x - ri, c.y - ro}, {c.x + ro, c.y - ri}}},
        {RingSide::Left, Rect{{c.x - ro, c.y - ro}, {c.x - ri, c.y + ri}}},
    }};
    for (const auto& [side, rect] : sides) {
      out.push_back(Segment{ring, out.size(), side, rect, rect.centroid()});
    }
  }
  return out;
}

}  // namespace edctr
