#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

namespace edctr {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b) noexcept;
double chebyshev_distance(Point a, Point b) noexcept;

struct SquareCorners {
  Point top_right;
  Point bottom_right;
  Point top_left;
  Point bottom_left;

  friend bool operator==(const SquareCorners&, const SquareCorners&) = default;
};

enum class Region { Inner, Middle, Outer };

inline constexpr std::array<Region, 3> kAllRegions{Region::Inner, Region::Middle, Region::Outer};

std::string_view to_string(Region region) noexcept;

/// Ordinal of a region counted from the base station: Inner=1, Middle=2, Outer=3.
constexpr int region_rank(Region region) noexcept { return static_cast<int>(region) + 1; }
constexpr std::size_t region_index(Region region) noexcept { return static_cast<std::size_t>(region); }

/// Axis-aligned rectangle, closed on all sides.
struct Rect {
  Point min;
  Point max;

  bool contains(Point p) const noexcept {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  Point centroid() const noexcept { return {(min.x + max.x) / 2.0, (min.y + max.y) / 2.0}; }
  double area() const noexcept { return (max.x - min.x) * (max.y - min.y); }
};

/// Side of a ring a segment occupies. The inner square is a single segment
/// with side `Whole`.
enum class RingSide { Whole, Top, Right, Bottom, Left };

struct Segment {
  Region region = Region::Inner;
  std::size_t index = 0;
  RingSide side = RingSide::Whole;
  Rect bounds;
  Point midpoint;
};

/// Corners of the inner square at half-width `d` around `center`.
/// Throws InvalidGeometry for negative `d`.
SquareCorners internal_square_corners(Point center, double d);

/// Corners of the n-th concentric square at half-width `d_n`. Uses the same
/// corner-role convention as internal_square_corners (right => +d on x,
/// top => +d on y).
SquareCorners nth_square_corners(Point center, double d_n);

/// Three concentric squares (inner, middle, outer) around the base station.
///
/// The outer square is the field boundary. Regions are Chebyshev rings with
/// closed inner boundaries: a point on a square's edge belongs to the
/// inner-most square containing it. Each ring is tiled by four congruent
/// rectangles laid out as a pinwheel, so every field point is owned by
/// exactly one segment.
class FieldPartition {
 public:
  /// `distances` are the half-widths d, d2, d3; they must be positive and
  /// strictly increasing. The field side is 2 * d3.
  FieldPartition(Point center, std::array<double, 3> distances);

  /// Equal-width rings on a square field of `field_side` meters with the
  /// center at (side/2, side/2): d = side/6, d2 = 2d, d3 = 3d.
  static FieldPartition equal_rings(double field_side);

  Point center() const noexcept { return center_; }
  double reference_distance() const noexcept { return distances_[0]; }
  const std::array<double, 3>& distances() const noexcept { return distances_; }
  double field_side() const noexcept { return 2.0 * distances_[2]; }
  const std::array<SquareCorners, 3>& squares() const noexcept { return squares_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }
  Rect field_bounds() const noexcept;

  bool in_field(Point p) const noexcept;

  /// Throws OutOfField when `p` lies outside the field boundary.
  Region classify(Point p) const;

  /// Index into segments() of the unique segment owning `p`.
  std::size_t segment_index_of(Point p) const;
  const Segment& segment_of(Point p) const { return segments_[segment_index_of(p)]; }

 private:
  Point center_;
  std::array<double, 3> distances_;
  std::array<SquareCorners, 3> squares_;
  std::vector<Segment> segments_;
};

/// One inner segment followed by four per ring (middle, then outer), each
/// ring in Top, Right, Bottom, Left order.
std::vector<Segment> build_segments(const FieldPartition& fp);

}  // namespace edctr
