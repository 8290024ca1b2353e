#pragma once

#include "floquet/model_io.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace floquet::cli {

using nlohmann::json;

/// Flags shared by every subcommand that reads a model.
struct CommonFlags {
  std::string model;
  int order = 2;
  int w_order = 1;
  std::string out;
  std::string format;
  int threads = 1;
  bool allow_near_resonance = false;
};

/// %.17g, the round-trip representation used in every CSV cell.
std::string fmt(double x);

std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t h);

/// Comma-separated table with a header row.
class Csv {
public:
  explicit Csv(std::vector<std::string> header);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);
  std::string str() const;

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Run metadata. `truncation` and `orders` are filled by the subcommand.
struct Manifest {
  std::string command;
  json flags = json::object();
  std::string model_canonical;
  json truncation = json::object();
  json orders = json::object();
  json annotations;

  json to_json() const;
};

/// The options given on the command line, in declaration order.
json given_flags(const CLI::App& app);

/// Writes `text` to --out (and OUT.manifest.json next to it) or to stdout.
void emit(const CommonFlags& flags, const Manifest& manifest, const std::string& text);
/// JSON outputs embed their manifest under "manifest".
void emit_json(const CommonFlags& flags, const Manifest& manifest, json body);

/// "a,b,c" -> doubles / ints.
std::vector<double> parse_doubles(const std::string& list);
std::vector<int> parse_ints(const std::string& list);

json matrix_json(const Eigen::MatrixXcd& m);
json complex_json(cplx z);

/// UTC ISO-8601 time of SOURCE_DATE_EPOCH when set, else of the clock.
std::string timestamp();

const char* version();

}  // namespace floquet::cli
