#pragma once

#include <optional>
#include <string_view>

namespace popchaos {

enum class MapKind { logistic, ricker };

std::string_view to_string(MapKind kind);
std::optional<MapKind> parse_map_kind(std::string_view text);

/// Deterministic update: logistic r x (1 - x), Ricker x e^(r (1 - x)).
double det_step(MapKind kind, double r, double x);

/// Analytic derivative of det_step in x: logistic r (1 - 2x),
/// Ricker e^(r (1 - x)) (1 - r x).
double det_derivative(MapKind kind, double r, double x);

}  // namespace popchaos
