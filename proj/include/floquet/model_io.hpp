#pragma once

#include "floquet/model.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace floquet {

/// Parsed model file.
///
///   { "type": "xz" | "rabi" | "fluxonium" | "transmon" | "custom",
///     "units": "angular" | "GHz",
///     "parameters": { ... },
///     "drive_frequency": w_d,
///     "degenerate_set": [0, 1] }
///
/// "GHz" values are f = w / 2 pi and are multiplied by 2 pi on load; circuit
/// energies (ej, el, ec) are always E/h in GHz. Default units: GHz for
/// circuits, angular otherwise. Parameters per type:
///   xz:        omega01, omega_x, omega_z
///   rabi:      omega01, omega_x
///   fluxonium: ej, el, ec, amplitude, basis_size, level_cut
///   transmon:  omega_q, alpha, amplitude, basis_size, level_cut
///   custom:    energies [..], harmonics [{ "p": 1, "re": [[..]], "im": [[..]] }]
/// Unknown keys are rejected.
struct ModelFile {
  std::string type;
  std::string units;
  nlohmann::json parameters;
  std::optional<double> drive_frequency;
  std::optional<std::vector<int>> degenerate_set;
  /// Canonical dump of the input, hashed into run manifests.
  std::string canonical;

  /// The system at drive frequency w_d; `amplitude` overrides the drive
  /// strength (omega_x for xz/rabi, A for circuits, a scale factor for custom).
  DrivenSystem system(double omega_d, std::optional<double> amplitude = std::nullopt) const;
  /// The system at the file's drive frequency.
  DrivenSystem system() const;
  SystemFamily family(std::optional<double> amplitude = std::nullopt) const;
  /// Drive amplitude in the file, in the same convention as `amplitude`.
  double amplitude() const;
  /// Multiplier turning file frequencies into rad/ns.
  double frequency_scale() const;
  /// Multiplier turning an amplitude in file units into the `amplitude`
  /// convention (the flux amplitude A and custom scale factors are unitless).
  double amplitude_scale() const;
};

ModelFile parse_model(const nlohmann::json& j);
ModelFile load_model(const std::string& path);

}  // namespace floquet
