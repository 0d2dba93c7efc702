#pragma once

#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace cflow {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
double norm(Point a);

struct Disc {
  double radius = 1.0;
};

struct Ellipse {
  double a = 1.0;  // semi-axis along x
  double b = 1.0;  // semi-axis along y
};

/// Axis-aligned [0,a] x [0,b].
struct Rectangle {
  double a = 1.0;
  double b = 1.0;
};

/// r(theta) = R (1 + sum_k c_k cos(k theta)), c_k stored from k = 1.
struct RadialFourier {
  double radius = 1.0;
  std::vector<double> coefficients;
};

/// Bounded, simply connected planar domain with an exact boundary
/// parametrisation. Construct through the named factories; they validate.
/// An optional rigid rotation about the origin is applied to every point.
class DomainSpec {
 public:
  using Kind = std::variant<Disc, Ellipse, Rectangle, RadialFourier>;

  static DomainSpec disc(double radius);
  static DomainSpec ellipse(double a, double b);
  static DomainSpec rectangle(double a, double b);
  static DomainSpec radial_fourier(double radius, std::vector<double> coefficients);

  const Kind& kind() const { return kind_; }
  double rotation() const { return rotation_; }
  DomainSpec rotated(double angle) const;
  /// Uniform dilation about the origin.
  DomainSpec scaled(double factor) const;

  bool is_polygonal() const { return std::holds_alternative<Rectangle>(kind_); }
  bool is_disc() const { return std::holds_alternative<Disc>(kind_); }

  /// Boundary parameter range is [0, period()). For rectangles the parameter
  /// is arc length starting at the origin corner, otherwise it is an angle.
  double period() const;
  /// Exact boundary point, traversed counterclockwise as t increases.
  Point boundary_point(double t) const;

  /// R for discs and radial-Fourier domains, min(a,b) otherwise.
  double feature_size() const;
  double diameter() const;
  /// Exact area (closed form for every kind).
  double area() const;

  /// "disc", "ellipse", "rectangle" or "fourier".
  std::string kind_name() const;
  /// Short identifier such as "ellipse(1.5,1)".
  std::string id() const;

  nlohmann::json to_json() const;
  static DomainSpec from_json(const nlohmann::json& j);

  /// Parses the CLI pair (--domain NAME, --params a,b,...). Missing params
  /// take the unit defaults (unit disc, unit square, ...).
  static DomainSpec parse(const std::string& name, const std::vector<double>& params);

 private:
  explicit DomainSpec(Kind kind) : kind_(std::move(kind)) {}
  Point rotate(Point p) const;

  Kind kind_;
  double rotation_ = 0.0;
};

}  // namespace cflow
