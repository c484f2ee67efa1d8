#include "qfluct/coefficient.hpp"

#include <cmath>
#include <stdexcept>

namespace qfluct {

Coefficient Coefficient::parse(std::string_view name, double scale) {
  if (name == "t") return {Kind::linear, scale};
  if (name == "t^2" || name == "t2") return {Kind::square, scale};
  if (name == "cos t" || name == "cos") return {Kind::cosine, scale};
  if (name == "sin t" || name == "sin") return {Kind::sine, scale};
  if (name == "const") return {Kind::constant, scale};
  throw std::invalid_argument("unknown coefficient function '" + std::string(name) +
                              "' (expected one of: t, t^2, cos t, sin t, const)");
}

double Coefficient::derivative(double t, int order) const {
  if (order < 0) throw std::invalid_argument("Coefficient: negative derivative order");
  switch (kind_) {
    case Kind::linear:
      return order == 0 ? scale_ * t : order == 1 ? scale_ : 0.0;
    case Kind::square:
      return order == 0 ? scale_ * t * t : order == 1 ? 2.0 * scale_ * t : order == 2 ? 2.0 * scale_ : 0.0;
    case Kind::cosine:
      return scale_ * std::cos(t + order * M_PI_2);
    case Kind::sine:
      return scale_ * std::sin(t + order * M_PI_2);
    case Kind::constant:
      return order == 0 ? scale_ : 0.0;
  }
  return 0.0;
}

std::string Coefficient::name() const {
  switch (kind_) {
    case Kind::linear:
      return "t";
    case Kind::square:
      return "t^2";
    case Kind::cosine:
      return "cos t";
    case Kind::sine:
      return "sin t";
    case Kind::constant:
      return "const";
  }
  return "const";
}

}  // namespace qfluct
