#include "floquet/model_io.hpp"

#include "floquet/error.hpp"

#include <fstream>
#include <memory>
#include <set>
#include <sstream>

namespace floquet {

namespace {

using nlohmann::json;

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ValidationError("unknown field '" + k + "' in " + where);
  }
}

double number(const json& p, const std::string& key, std::optional<double> fallback = std::nullopt) {
  if (!p.contains(key)) {
    if (fallback) return *fallback;
    throw ValidationError("missing parameter '" + key + "'");
  }
  if (!p.at(key).is_number()) throw ValidationError("parameter '" + key + "' must be a number");
  return p.at(key).get<double>();
}

int integer(const json& p, const std::string& key, int fallback) {
  if (!p.contains(key)) return fallback;
  if (!p.at(key).is_number_integer()) throw ValidationError("parameter '" + key + "' must be an integer");
  return p.at(key).get<int>();
}

RMatrix real_matrix(const json& j, int n, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw ValidationError(what + " must be an " + std::to_string(n) + "x" + std::to_string(n) + " array");
  }
  RMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw ValidationError(what + " rows must have " + std::to_string(n) + " entries");
    }
    for (int k = 0; k < n; ++k) {
      if (!row[static_cast<std::size_t>(k)].is_number()) throw ValidationError(what + " entries must be numbers");
      m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
  }
  return m;
}

FluxoniumSpec fluxonium_spec(const json& p) {
  only_keys(p, {"ej", "el", "ec", "amplitude", "basis_size", "level_cut"}, "fluxonium parameters");
  FluxoniumSpec s;
  s.ej_ghz = number(p, "ej", s.ej_ghz);
  s.el_ghz = number(p, "el", s.el_ghz);
  s.ec_ghz = number(p, "ec", s.ec_ghz);
  s.amplitude = number(p, "amplitude", 0.0);
  s.basis_size = integer(p, "basis_size", s.basis_size);
  s.level_cut = integer(p, "level_cut", s.level_cut);
  s.validate();
  return s;
}

TransmonSpec transmon_spec(const json& p, double scale) {
  only_keys(p, {"omega_q", "alpha", "amplitude", "basis_size", "level_cut"}, "transmon parameters");
  TransmonSpec s;
  if (p.contains("omega_q")) s.omega_q = scale * number(p, "omega_q");
  if (p.contains("alpha")) s.alpha = scale * number(p, "alpha");
  s.basis_size = integer(p, "basis_size", s.basis_size);
  s.level_cut = integer(p, "level_cut", s.level_cut);
  s.validate();
  return s;
}

}  // namespace

double ModelFile::frequency_scale() const { return units == "GHz" ? kTwoPi : 1.0; }

double ModelFile::amplitude_scale() const {
  return type == "fluxonium" || type == "custom" ? 1.0 : frequency_scale();
}

double ModelFile::amplitude() const {
  const double f = frequency_scale();
  if (type == "xz" || type == "rabi") return f * number(parameters, "omega_x");
  if (type == "fluxonium") return number(parameters, "amplitude", 0.0);
  if (type == "transmon") return f * number(parameters, "amplitude", 0.0);
  return 1.0;
}

DrivenSystem ModelFile::system(double omega_d, std::optional<double> amplitude_override) const {
  return family(amplitude_override)(omega_d);
}

DrivenSystem ModelFile::system() const {
  if (!drive_frequency) throw ValidationError("model file has no drive_frequency");
  return system(*drive_frequency);
}

SystemFamily ModelFile::family(std::optional<double> amp) const {
  const double f = frequency_scale();
  const double a = amp.value_or(amplitude());
  if (type == "xz") {
    const double w01 = f * number(parameters, "omega01");
    const double wz = f * number(parameters, "omega_z", 0.0);
    return [w01, a, wz](double w) { return xz_model(w01, a, wz, w); };
  }
  if (type == "rabi") {
    const double w01 = f * number(parameters, "omega01");
    return [w01, a](double w) { return rabi_model(w01, a, w); };
  }
  if (type == "fluxonium") {
    auto circuit = std::make_shared<FluxoniumCircuit>(fluxonium_spec(parameters));
    return [circuit, a](double w) { return circuit->system(w, a); };
  }
  if (type == "transmon") {
    auto circuit = std::make_shared<TransmonCircuit>(transmon_spec(parameters, f));
    return [circuit, a](double w) { return circuit->system(w, a); };
  }
  // custom
  std::vector<double> e;
  for (const auto& x : parameters.at("energies")) e.push_back(f * x.get<double>());
  const int n = static_cast<int>(e.size());
  std::map<int, CMatrix> harmonics;
  for (const auto& h : parameters.at("harmonics")) {
    const int p = h.at("p").get<int>();
    CMatrix m = real_matrix(h.at("re"), n, "harmonic re").cast<cplx>();
    if (h.contains("im")) m += cplx(0.0, 1.0) * real_matrix(h.at("im"), n, "harmonic im").cast<cplx>();
    harmonics.try_emplace(p, CMatrix::Zero(n, n)).first->second += f * m;
  }
  const DrivenSystem base(e, harmonics, 1.0);
  return [base, a](double w) { return base.with_drive_frequency(w).with_drive_scaled(a); };
}

ModelFile parse_model(const json& j) {
  only_keys(j, {"type", "units", "parameters", "drive_frequency", "degenerate_set"}, "model file");
  ModelFile m;
  if (!j.contains("type") || !j.at("type").is_string()) throw ValidationError("model file needs a string 'type'");
  m.type = j.at("type").get<std::string>();
  static const std::set<std::string> types{"xz", "rabi", "fluxonium", "transmon", "custom"};
  if (!types.count(m.type)) throw ValidationError("unknown model type '" + m.type + "'");
  const bool circuit = m.type == "fluxonium" || m.type == "transmon";
  m.units = j.value("units", circuit ? std::string("GHz") : std::string("angular"));
  if (m.units != "GHz" && m.units != "angular") throw ValidationError("units must be 'GHz' or 'angular'");
  m.parameters = j.value("parameters", json::object());
  if (m.type == "xz") only_keys(m.parameters, {"omega01", "omega_x", "omega_z"}, "xz parameters");
  if (m.type == "rabi") only_keys(m.parameters, {"omega01", "omega_x"}, "rabi parameters");
  if (m.type == "fluxonium") fluxonium_spec(m.parameters);
  if (m.type == "transmon") transmon_spec(m.parameters, m.frequency_scale());
  if (m.type == "custom") {
    only_keys(m.parameters, {"energies", "harmonics"}, "custom parameters");
    if (!m.parameters.contains("energies") || !m.parameters.at("energies").is_array()) {
      throw ValidationError("custom model needs an 'energies' array");
    }
    if (!m.parameters.contains("harmonics") || !m.parameters.at("harmonics").is_array()) {
      throw ValidationError("custom model needs a 'harmonics' array");
    }
    for (const auto& h : m.parameters.at("harmonics")) only_keys(h, {"p", "re", "im"}, "harmonic");
  }
  if (j.contains("drive_frequency")) {
    if (!j.at("drive_frequency").is_number()) throw ValidationError("drive_frequency must be a number");
    m.drive_frequency = m.frequency_scale() * j.at("drive_frequency").get<double>();
  }
  if (j.contains("degenerate_set")) {
    std::vector<int> d;
    for (const auto& x : j.at("degenerate_set")) {
      if (!x.is_number_integer()) throw ValidationError("degenerate_set entries must be integers");
      d.push_back(x.get<int>());
    }
    m.degenerate_set = d;
  }
  m.canonical = j.dump();
  try {
    // Builds once so that parameter errors surface at load time.
    if (m.type == "xz" || m.type == "rabi" || m.type == "custom") m.family()(m.drive_frequency.value_or(1.0));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed model file: ") + e.what());
  }
  return m;
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("model file " + path + " is not valid JSON: " + e.what());
  }
  return parse_model(j);
}

}  // namespace floquet
