#include "popchaos/maps.hpp"

#include <cmath>

namespace popchaos {

std::string_view to_string(MapKind kind) {
  return kind == MapKind::logistic ? "logistic" : "ricker";
}

std::optional<MapKind> parse_map_kind(std::string_view text) {
  if (text == "logistic") return MapKind::logistic;
  if (text == "ricker") return MapKind::ricker;
  return std::nullopt;
}

double det_step(MapKind kind, double r, double x) {
  switch (kind) {
    case MapKind::logistic:
      return r * x * (1.0 - x);
    case MapKind::ricker:
      return x * std::exp(r * (1.0 - x));
  }
  return x;
}

double det_derivative(MapKind kind, double r, double x) {
  switch (kind) {
    case MapKind::logistic:
      return r * (1.0 - 2.0 * x);
    case MapKind::ricker:
      return std::exp(r * (1.0 - x)) * (1.0 - r * x);
  }
  return 0.0;
}

}  // namespace popchaos
