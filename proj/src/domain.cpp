#include "cflow/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cflow {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

double fourier_radius(const RadialFourier& f, double theta) {
  double s = 1.0;
  for (std::size_t k = 0; k < f.coefficients.size(); ++k) s += f.coefficients[k] * std::cos((k + 1) * theta);
  return f.radius * s;
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

double norm(Point a) { return std::hypot(a.x, a.y); }

DomainSpec DomainSpec::disc(double radius) {
  require_positive(radius, "disc radius");
  return DomainSpec(Disc{radius});
}

DomainSpec DomainSpec::ellipse(double a, double b) {
  require_positive(a, "ellipse semi-axis a");
  require_positive(b, "ellipse semi-axis b");
  return DomainSpec(Ellipse{a, b});
}

DomainSpec DomainSpec::rectangle(double a, double b) {
  require_positive(a, "rectangle side a");
  require_positive(b, "rectangle side b");
  return DomainSpec(Rectangle{a, b});
}

DomainSpec DomainSpec::radial_fourier(double radius, std::vector<double> coefficients) {
  require_positive(radius, "radial-Fourier base radius");
  RadialFourier f{radius, std::move(coefficients)};
  for (double c : f.coefficients)
    if (!std::isfinite(c)) throw std::invalid_argument("radial-Fourier coefficients must be finite");
  // r(theta) >= R/2 keeps the domain star-shaped about the origin with a
  // margin; checked on a grid fine enough for the highest mode.
  const int samples = 64 * static_cast<int>(f.coefficients.size() + 1);
  for (int i = 0; i < samples; ++i) {
    const double theta = kTwoPi * i / samples;
    if (fourier_radius(f, theta) < 0.5 * radius)
      throw std::invalid_argument("radial-Fourier boundary dips below R/2; domain rejected as not safely star-shaped");
  }
  return DomainSpec(std::move(f));
}

DomainSpec DomainSpec::rotated(double angle) const {
  DomainSpec out = *this;
  out.rotation_ += angle;
  return out;
}

DomainSpec DomainSpec::scaled(double factor) const {
  require_positive(factor, "scale factor");
  DomainSpec out = *this;
  std::visit(
      [factor](auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Disc>) {
          k.radius *= factor;
        } else if constexpr (std::is_same_v<T, RadialFourier>) {
          k.radius *= factor;
        } else {
          k.a *= factor;
          k.b *= factor;
        }
      },
      out.kind_);
  return out;
}

Point DomainSpec::rotate(Point p) const {
  if (rotation_ == 0.0) return p;
  const double c = std::cos(rotation_);
  const double s = std::sin(rotation_);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

double DomainSpec::period() const {
  if (const auto* r = std::get_if<Rectangle>(&kind_)) return 2.0 * (r->a + r->b);
  return kTwoPi;
}

Point DomainSpec::boundary_point(double t) const {
  const Point p = std::visit(
      [t](const auto& k) -> Point {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Disc>) {
          return {k.radius * std::cos(t), k.radius * std::sin(t)};
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          return {k.a * std::cos(t), k.b * std::sin(t)};
        } else if constexpr (std::is_same_v<T, RadialFourier>) {
          const double r = fourier_radius(k, t);
          return {r * std::cos(t), r * std::sin(t)};
        } else {
          const double per = 2.0 * (k.a + k.b);
          double s = std::fmod(t, per);
          if (s < 0.0) s += per;
          if (s <= k.a) return {s, 0.0};
          s -= k.a;
          if (s <= k.b) return {k.a, s};
          s -= k.b;
          if (s <= k.a) return {k.a - s, k.b};
          s -= k.a;
          return {0.0, k.b - s};
        }
      },
      kind_);
  return rotate(p);
}

double DomainSpec::feature_size() const {
  return std::visit(
      [](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Disc>) return k.radius;
        else if constexpr (std::is_same_v<T, RadialFourier>) return k.radius;
        else return std::min(k.a, k.b);
      },
      kind_);
}

double DomainSpec::diameter() const {
  return std::visit(
      [](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Disc>) {
          return 2.0 * k.radius;
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          return 2.0 * std::max(k.a, k.b);
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          return std::hypot(k.a, k.b);
        } else {
          double rmax = 0.0;
          for (int i = 0; i < 2048; ++i) rmax = std::max(rmax, fourier_radius(k, kTwoPi * i / 2048));
          return 2.0 * rmax;
        }
      },
      kind_);
}

double DomainSpec::area() const {
  return std::visit(
      [](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Disc>) {
          return std::numbers::pi * k.radius * k.radius;
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          return std::numbers::pi * k.a * k.b;
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          return k.a * k.b;
        } else {
          double s = 1.0;
          for (double c : k.coefficients) s += 0.5 * c * c;
          return std::numbers::pi * k.radius * k.radius * s;
        }
      },
      kind_);
}

std::string DomainSpec::kind_name() const {
  switch (kind_.index()) {
    case 0: return "disc";
    case 1: return "ellipse";
    case 2: return "rectangle";
    default: return "fourier";
  }
}

std::string DomainSpec::id() const {
  std::string params = std::visit(
      [](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Disc>) {
          return fmt_num(k.radius);
        } else if constexpr (std::is_same_v<T, RadialFourier>) {
          std::string s = fmt_num(k.radius);
          for (double c : k.coefficients) s += ";" + fmt_num(c);
          return s;
        } else {
          return fmt_num(k.a) + ";" + fmt_num(k.b);
        }
      },
      kind_);
  std::string out = kind_name() + "(" + params + ")";
  if (rotation_ != 0.0) out += "@" + fmt_num(rotation_);
  return out;
}

nlohmann::json DomainSpec::to_json() const {
  nlohmann::json j;
  j["kind"] = kind_name();
  std::visit(
      [&j](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Disc>) {
          j["radius"] = k.radius;
        } else if constexpr (std::is_same_v<T, RadialFourier>) {
          j["radius"] = k.radius;
          j["coefficients"] = k.coefficients;
        } else {
          j["a"] = k.a;
          j["b"] = k.b;
        }
      },
      kind_);
  j["rotation"] = rotation_;
  return j;
}

DomainSpec DomainSpec::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  DomainSpec out = [&]() {
    if (kind == "disc") return disc(j.at("radius").get<double>());
    if (kind == "ellipse") return ellipse(j.at("a").get<double>(), j.at("b").get<double>());
    if (kind == "rectangle") return rectangle(j.at("a").get<double>(), j.at("b").get<double>());
    if (kind == "fourier")
      return radial_fourier(j.at("radius").get<double>(), j.at("coefficients").get<std::vector<double>>());
    throw std::invalid_argument("unknown domain kind '" + kind + "'");
  }();
  out.rotation_ = j.value("rotation", 0.0);
  return out;
}

DomainSpec DomainSpec::parse(const std::string& name, const std::vector<double>& p) {
  auto at = [&p](std::size_t i, double fallback) { return i < p.size() ? p[i] : fallback; };
  if (name == "disc") {
    if (p.size() > 1) throw std::invalid_argument("disc takes one parameter (radius)");
    return disc(at(0, 1.0));
  }
  if (name == "ellipse") {
    if (p.size() > 2) throw std::invalid_argument("ellipse takes two parameters (a,b)");
    return ellipse(at(0, 1.5), at(1, 1.0));
  }
  if (name == "rectangle" || name == "square") {
    if (p.size() > 2) throw std::invalid_argument("rectangle takes two parameters (a,b)");
    const double a = at(0, 1.0);
    return rectangle(a, at(1, a));
  }
  if (name == "fourier") {
    if (p.empty()) return radial_fourier(1.0, {0.0, 0.1, 0.05});
    return radial_fourier(p[0], std::vector<double>(p.begin() + 1, p.end()));
  }
  throw std::invalid_argument("unknown domain '" + name + "' (expected disc|ellipse|rectangle|fourier)");
}

}  // namespace cflow
