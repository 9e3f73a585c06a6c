#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gmetric/error.hpp"
#include "gmetric/point.hpp"
#include "gmetric/region.hpp"

namespace gmetric {

/// Which of the three slots a map occupies in a triple (T; S; K).
enum class MapLabel { T, S, K };

inline const char* to_string(MapLabel l) {
  switch (l) {
    case MapLabel::T: return "T";
    case MapLabel::S: return "S";
    case MapLabel::K: return "K";
  }
  return "?";
}

/// Region an image lands in for the intended role of the map: T rotates
/// A->B->C->A, S rotates A->C->B->A, K keeps each region.
inline Role image_role(MapLabel label, Role from) {
  switch (label) {
    case MapLabel::T: return from == Role::A ? Role::B : from == Role::B ? Role::C : Role::A;
    case MapLabel::S: return from == Role::A ? Role::C : from == Role::C ? Role::B : Role::A;
    case MapLabel::K: return from;
  }
  return from;
}

/// A self-map of A ∪ B ∪ C. Evaluation takes the role of the region the
/// argument is drawn from, so that maps defined piecewise over overlapping
/// regions are unambiguous.
class SelfMap {
 public:
  using Forward = std::function<Point(const Point&, Role)>;
  /// All solutions y in `codomain` (playing `role`) of forward(y, role) = target.
  using Inverse = std::function<std::vector<Point>(const Point& target, const Region& codomain, Role role)>;

  SelfMap(MapLabel label, Forward forward, std::optional<Inverse> inverse = std::nullopt, std::string text = {})
      : label_(label), forward_(std::move(forward)), inverse_(std::move(inverse)), text_(std::move(text)) {}

  /// Map given by one real function, regardless of region.
  static SelfMap scalar(MapLabel label, std::function<double(double)> f, std::string text = {}) {
    return SelfMap(
        label, [f = std::move(f)](const Point& p, Role) { return Point(f(p.x())); }, std::nullopt, std::move(text));
  }

  /// Map given by one real function per role.
  static SelfMap by_role(MapLabel label, std::function<double(double, Role)> f, std::string text = {}) {
    return SelfMap(
        label, [f = std::move(f)](const Point& p, Role r) { return Point(f(p.x(), r)); }, std::nullopt,
        std::move(text));
  }

  static SelfMap identity(MapLabel label) {
    return SelfMap(label, [](const Point& p, Role) { return p; }, std::nullopt, "x");
  }

  MapLabel label() const noexcept { return label_; }
  const std::string& text() const noexcept { return text_; }
  const std::optional<Inverse>& inverse() const noexcept { return inverse_; }

  Point operator()(const Point& p, Role from) const {
    return forward_(p, from);
  }

  SelfMap relabeled(MapLabel label) const {
    SelfMap m = *this;
    m.label_ = label;
    return m;
  }

 private:
  MapLabel label_;
  Forward forward_;
  std::optional<Inverse> inverse_;
  std::string text_;
};

}  // namespace gmetric
