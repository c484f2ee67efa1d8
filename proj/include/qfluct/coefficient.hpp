#pragma once

#include <string>
#include <string_view>

namespace qfluct {

// Scalar time functions k * f(t) with f from a fixed whitelist. Every member
// has closed-form derivatives of any order, which keeps analytic overlays exact.
class Coefficient {
 public:
  enum class Kind { linear, square, cosine, sine, constant };

  Coefficient() = default;
  Coefficient(Kind kind, double scale) : kind_(kind), scale_(scale) {}

  static Coefficient t() { return {Kind::linear, 1.0}; }
  static Coefficient constant(double value) { return {Kind::constant, value}; }

  /// Parses "t", "t^2", "cos t", "sin t" or "const". Throws std::invalid_argument.
  static Coefficient parse(std::string_view name, double scale = 1.0);

  double operator()(double t) const { return derivative(t, 0); }
  double derivative(double t, int order) const;

  Kind kind() const noexcept { return kind_; }
  double scale() const noexcept { return scale_; }
  std::string name() const;

 private:
  Kind kind_ = Kind::constant;
  double scale_ = 0.0;
};

}  // namespace qfluct
