#include "cli_support.hpp"

#include "floquet/error.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

namespace floquet::cli {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Csv::Csv(std::vector<std::string> header) : header_(std::move(header)) {}

void Csv::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(fmt(v));
  row(cells);
}

void Csv::row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) throw std::logic_error("CSV row width does not match header");
  rows_.push_back(cells);
}

std::string Csv::str() const {
  std::ostringstream os;
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

const char* version() { return FLOQUET_DPT_VERSION; }

std::string timestamp() {
  std::time_t t = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (*end != '\0' || v < 0) throw ValidationError("SOURCE_DATE_EPOCH must be a non-negative integer");
    t = static_cast<std::time_t>(v);
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json Manifest::to_json() const {
  json j;
  j["tool"] = "floquet-dpt";
  j["version"] = version();
  j["command"] = command;
  j["flags"] = flags;
  j["model_hash"] = "fnv1a64:" + hex64(fnv1a64(model_canonical));
  j["truncation"] = truncation;
  j["orders"] = orders;
  j["timestamp"] = timestamp();
  if (!annotations.is_null()) j["annotations"] = annotations;
  return j;
}

json given_flags(const CLI::App& app) {
  json j = json::object();
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    const auto& res = opt->results();
    std::string name = opt->get_name();
    while (!name.empty() && name.front() == '-') name.erase(name.begin());
    if (opt->get_type_size() == 0) {
      j[name] = true;
    } else if (res.size() == 1) {
      j[name] = res.front();
    } else {
      j[name] = res;
    }
  }
  return j;
}

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path);
  f << text;
  if (!f) throw ValidationError("failed writing " + path);
}

}  // namespace

void emit(const CommonFlags& flags, const Manifest& manifest, const std::string& text) {
  if (flags.out.empty()) {
    std::cout << text;
    return;
  }
  write_file(flags.out, text);
  write_file(flags.out + ".manifest.json", manifest.to_json().dump(2) + "\n");
}

void emit_json(const CommonFlags& flags, const Manifest& manifest, json body) {
  body["manifest"] = manifest.to_json();
  emit(flags, manifest, body.dump(2) + "\n");
}

std::vector<double> parse_doubles(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ValidationError("'" + item + "' is not a number");
    }
    if (used != item.size()) throw ValidationError("'" + item + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError("empty number list");
  return out;
}

std::vector<int> parse_ints(const std::string& list) {
  std::vector<int> out;
  for (double v : parse_doubles(list)) {
    if (v != static_cast<int>(v)) throw ValidationError("'" + fmt(v) + "' is not an integer");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

json matrix_json(const Eigen::MatrixXcd& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rr = json::array(), ri = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      rr.push_back(m(i, k).real());
      ri.push_back(m(i, k).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return {{"re", re}, {"im", im}};
}

json complex_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace floquet::cli
