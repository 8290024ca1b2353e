#include "commands.hpp"

#include "floquet/error.hpp"
#include "floquet/evolve.hpp"
#include "floquet/figures.hpp"
#include "floquet/opalg.hpp"
#include "floquet/oracle.hpp"
#include "floquet/pert.hpp"
#include "floquet/pulse.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <memory>

namespace floquet::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Command {
  CLI::App* app = nullptr;
  std::function<void()> run;
};

std::vector<Command>& registry() {
  static std::vector<Command> r;
  return r;
}

void add_common(CLI::App* sub, CommonFlags& f, bool model, const std::string& default_format) {
  f.format = default_format;
  if (model) sub->add_option("--model", f.model, "Model file (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "Output path (stdout when omitted)");
  sub->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--threads", f.threads, "Worker threads for sweeps")->check(CLI::Range(1, 256));
}

void add_orders(CLI::App* sub, CommonFlags& f, int order, int w_order) {
  f.order = order;
  f.w_order = w_order;
  sub->add_option("--order", f.order, "Effective Hamiltonian order r_H")->check(CLI::Range(1, 12));
  sub->add_option("--w-order", f.w_order, "Transformation order r_W")->check(CLI::Range(0, 10));
  sub->add_flag("--allow-near-resonance", f.allow_near_resonance,
                "Record near-resonant denominators instead of failing");
}

SambeOptions sambe_options(const CommonFlags& f) {
  SambeOptions o;
  o.allow_near_resonance = f.allow_near_resonance;
  return o;
}

Manifest base_manifest(const CLI::App* sub, const std::string& canonical) {
  Manifest m;
  m.command = sub->get_name();
  m.flags = given_flags(*sub);
  m.model_canonical = canonical;
  return m;
}

json truncation(const ModelFile& model, int levels, int p_max) {
  json t = {{"levels", levels}, {"p_max", p_max}};
  if (model.type == "fluxonium") t["basis_size"] = model.parameters.value("basis_size", FluxoniumSpec{}.basis_size);
  if (model.type == "transmon") t["basis_size"] = model.parameters.value("basis_size", TransmonSpec{}.basis_size);
  return t;
}

ResonantDecomposition decomposition(const ModelFile& model, const DrivenSystem& s) {
  return decompose(s, kDefaultMembershipThreshold, model.degenerate_set);
}

int default_target(const ModelFile& model, int given) {
  if (given >= 0) return given;
  if (model.degenerate_set && model.degenerate_set->size() >= 2) return (*model.degenerate_set)[1];
  return 1;
}

/// n_target: the flag, or the nearest integer to (E_t - E_0) / w_d of the file.
int photons_for(const ModelFile& model, int target, int given) {
  if (given > 0) return given;
  if (!model.drive_frequency) throw ValidationError("--photons is required when the model has no drive_frequency");
  const DrivenSystem s = model.system();
  if (target <= 0 || target >= s.dimension()) throw ValidationError("target level out of range");
  const int n = static_cast<int>(std::lround((s.energy(target) - s.energy(0)) / s.drive_frequency()));
  if (n < 1) throw ValidationError("cannot infer a positive photon number for the target");
  return n;
}

json decomposition_json(const ResonantDecomposition& d) {
  return {{"drive_frequency", d.drive_frequency},
          {"degenerate_set", d.degenerate_set},
          {"photon_numbers", d.photon_numbers},
          {"detunings", d.detunings}};
}

// ---------------------------------------------------------------------------

struct CoeffsFlags {
  CommonFlags common;
  std::string kind = "heff";
  int order = 2;
} coeffs_flags;

void run_coeffs(const CLI::App* sub) {
  const CoeffsFlags& f = coeffs_flags;
  const opalg::TableKind kind = opalg::table_kind_from_string(f.kind);
  const opalg::CoefficientTable& t = opalg::coefficient_table(kind, f.order);
  Manifest m = base_manifest(sub, "");
  m.orders = {{"kind", f.kind}, {"order", f.order}};
  if (f.common.format == "json") {
    json entries = json::array();
    for (const auto& [e, c] : t.entries) {
      entries.push_back({{"exponents", e},
                         {"numerator", numerator(c).str()},
                         {"denominator", denominator(c).str()}});
    }
    emit_json(f.common, m, {{"kind", f.kind}, {"order", f.order}, {"rows", t.entries.size()}, {"entries", entries}});
    return;
  }
  std::vector<std::string> header;
  // heff tuples run m_{r-1}..m_1, W tuples m_r..m_1
  for (int j = t.tuple_length(); j >= 1; --j) header.push_back("m" + std::to_string(j));
  header.push_back("numerator");
  header.push_back("denominator");
  Csv csv(header);
  for (const auto& [e, c] : t.entries) {
    std::vector<std::string> cells;
    for (int x : e) cells.push_back(std::to_string(x));
    cells.push_back(numerator(c).str());
    cells.push_back(denominator(c).str());
    csv.row(cells);
  }
  emit(f.common, m, csv.str());
}

// ---------------------------------------------------------------------------

CommonFlags heff_flags;

void run_heff(const CLI::App* sub) {
  const CommonFlags& f = heff_flags;
  const ModelFile model = load_model(f.model);
  const DrivenSystem s = model.system();
  const ResonantDecomposition d = decomposition(model, s);
  const EffectiveHamiltonian h = effective_hamiltonian(s, d, f.order, sambe_options(f));

  Manifest m = base_manifest(sub, model.canonical);
  m.truncation = truncation(model, s.dimension(), h.p_max);
  m.orders = {{"r_H", f.order}};

  if (f.format == "csv") {
    Csv csv({"order", "row", "col", "re", "im"});
    for (int r = 1; r <= h.max_order(); ++r) {
      const CMatrix& o = h.orders[static_cast<std::size_t>(r - 1)];
      for (int i = 0; i < o.rows(); ++i) {
        for (int k = 0; k < o.cols(); ++k) {
          csv.row({static_cast<double>(r), static_cast<double>(h.basis[static_cast<std::size_t>(i)]),
                   static_cast<double>(h.basis[static_cast<std::size_t>(k)]), o(i, k).real(), o(i, k).imag()});
        }
      }
    }
    emit(f, m, csv.str());
    return;
  }

  json orders = json::array();
  for (int r = 1; r <= h.max_order(); ++r) {
    const CMatrix& o = h.orders[static_cast<std::size_t>(r - 1)];
    json shifts = json::array();
    for (int k = 0; k < h.dimension(); ++k) shifts.push_back(o(k, k).real());
    orders.push_back({{"order", r}, {"matrix", matrix_json(o)}, {"stark_shifts", shifts}});
  }
  json couplings = json::array();
  for (int l = 0; l < h.dimension(); ++l) {
    for (int k = 0; k < l; ++k) {
      couplings.push_back({{"l", h.basis[static_cast<std::size_t>(l)]},
                           {"k", h.basis[static_cast<std::size_t>(k)]},
                           {"omega", complex_json(h.omega(l, k))}});
    }
  }
  json shifts = json::array();
  for (int k = 0; k < h.dimension(); ++k) shifts.push_back(h.delta(k));
  json near = json::array();
  for (const auto& nr : h.near_resonances) {
    near.push_back({{"level", nr.level}, {"sector", nr.sector}, {"denominator", nr.denominator}});
  }
  json body = {{"model", model.type},
               {"decomposition", decomposition_json(d)},
               {"basis", h.basis},
               {"p_max", h.p_max},
               {"sambe_dimension", h.sambe_dimension},
               {"orders", orders},
               {"cumulative", matrix_json(h.cumulative())},
               {"stark_shifts", shifts},
               {"couplings", couplings},
               {"near_resonances", near}};
  if (h.dimension() == 2) {
    const RabiData rd = rabi_frequency(h);
    body["rabi"] = {{"detuning", rd.detuning},
                    {"coupling", complex_json(rd.coupling)},
                    {"rabi", rd.rabi},
                    {"t_pi", rd.t_pi}};
  }
  emit_json(f, m, body);
}

// ---------------------------------------------------------------------------

struct ProcessFlags {
  CommonFlags common;
  int from = -1;
  int to = -1;
  std::size_t cap = kDefaultProcessCap;
} process_flags;

void run_processes(const CLI::App* sub) {
  const ProcessFlags& f = process_flags;
  const ModelFile model = load_model(f.common.model);
  const DrivenSystem s = model.system();
  const ResonantDecomposition d = decomposition(model, s);
  const int k = f.from >= 0 ? f.from : d.degenerate_set.front();
  const int l = f.to >= 0 ? f.to : d.degenerate_set.back();
  if (!d.in_degenerate_set(k) || !d.in_degenerate_set(l)) {
    throw ValidationError("--from and --to must be levels of the degenerate set");
  }
  const auto terms = enumerate_processes(s, d, l, k, f.common.order, f.cap);
  const EffectiveHamiltonian h = effective_hamiltonian(s, d, f.common.order, sambe_options(f.common));
  const cplx element = h.orders.back()(d.index_in_degenerate_set(l), d.index_in_degenerate_set(k));

  Manifest m = base_manifest(sub, model.canonical);
  m.truncation = truncation(model, s.dimension(), h.p_max);
  m.orders = {{"r_H", f.common.order}};

  cplx sum = 0.0;
  json diagrams = json::array();
  for (const ProcessTerm& t : terms) {
    sum += t.amplitude;
    diagrams.push_back({{"photons", t.photons},
                        {"levels", t.levels},
                        {"exponents", t.exponents},
                        {"denominators", t.denominators},
                        {"resonant", t.resonant},
                        {"coefficient", t.coefficient.str()},
                        {"amplitude", complex_json(t.amplitude)}});
  }
  emit_json(f.common, m,
            {{"order", f.common.order},
             {"from", k},
             {"to", l},
             {"count", terms.size()},
             {"sum", complex_json(sum)},
             {"matrix_element", complex_json(element)},
             {"diagrams", diagrams}});
}

// ---------------------------------------------------------------------------

struct ResonanceFlags {
  CommonFlags common;
  int target = -1;
  int photons = 0;
  std::string bracket;
} resonance_flags;

void run_resonance(const CLI::App* sub) {
  const ResonanceFlags& f = resonance_flags;
  const ModelFile model = load_model(f.common.model);
  const SystemFamily family = model.family();
  ResonanceOptions ro;
  ro.r_h = f.common.order;
  ro.target = default_target(model, f.target);
  if (f.photons > 0 || model.drive_frequency) ro.photon_number = photons_for(model, ro.target, f.photons);
  ro.sambe = sambe_options(f.common);
  if (!f.bracket.empty()) {
    const auto b = parse_doubles(f.bracket);
    if (b.size() != 2) throw ValidationError("--bracket takes lo,hi");
    ro.bracket = std::make_pair(model.frequency_scale() * b[0], model.frequency_scale() * b[1]);
  }
  const ResonanceResult r = resonance_frequency(family, ro);
  const DrivenSystem s = family(r.omega_d);
  const int n = static_cast<int>(std::lround((s.energy(ro.target) - s.energy(0)) / r.omega_d));
  const auto d = decompose(s, kDefaultMembershipThreshold, std::vector<int>{0, ro.target}, {{ro.target, n}});
  const EffectiveHamiltonian h = effective_hamiltonian(s, d, ro.r_h, ro.sambe);
  const RabiData rd = rabi_frequency(h);

  Manifest m = base_manifest(sub, model.canonical);
  m.truncation = truncation(model, s.dimension(), h.p_max);
  m.orders = {{"r_H", ro.r_h}};
  emit_json(f.common, m,
            {{"target", ro.target},
             {"photon_number", n},
             {"omega_d", r.omega_d},
             {"epsilon", n * r.omega_d - (s.energy(ro.target) - s.energy(0))},
             {"roots", r.roots},
             {"initial_guess", r.initial_guess},
             {"bracket", {r.bracket.first, r.bracket.second}},
             {"multiple_roots", r.multiple_roots},
             {"residual", r.residual},
             {"coupling", complex_json(rd.coupling)},
             {"rabi", rd.rabi},
             {"t_pi", rd.t_pi}});
}

// ---------------------------------------------------------------------------

struct EvolveFlags {
  CommonFlags common;
  double t_end = 0.0;
  int samples_per_period = 64;
  int initial = 0;
  std::string product = "truncated";
} evolve_flags, oracle_flags;

std::vector<std::string> series_header(int levels) {
  std::vector<std::string> h{"t"};
  for (int k = 0; k < levels; ++k) {
    h.push_back("re_c" + std::to_string(k));
    h.push_back("im_c" + std::to_string(k));
  }
  for (int k = 0; k < levels; ++k) h.push_back("p" + std::to_string(k));
  h.push_back("leakage");
  return h;
}

std::string series_csv(const EvolutionResult& r) {
  Csv csv(series_header(r.levels()));
  const auto leak = r.leakage();
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    std::vector<double> v{r.times[i]};
    for (int k = 0; k < r.levels(); ++k) {
      v.push_back(r.amplitudes(row, k).real());
      v.push_back(r.amplitudes(row, k).imag());
    }
    for (int k = 0; k < r.levels(); ++k) v.push_back(std::norm(r.amplitudes(row, k)));
    v.push_back(leak[i]);
    csv.row(v);
  }
  return csv.str();
}

json series_json(const EvolutionResult& r) {
  json pops = json::array();
  const Eigen::MatrixXd p = r.populations();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < p.cols(); ++k) row.push_back(p(i, k));
    pops.push_back(row);
  }
  return {{"times", r.times}, {"populations", pops}, {"leakage", r.leakage()}, {"source", r.source}};
}

void run_evolve(const CLI::App* sub) {
  const EvolveFlags& f = evolve_flags;
  const ModelFile model = load_model(f.common.model);
  const DrivenSystem s = model.system();
  const ResonantDecomposition d = decomposition(model, s);
  const Expansion e = expand(s, d, f.common.order, f.common.w_order, sambe_options(f.common));
  EvolveOptions eo;
  eo.product = f.product == "full" ? WProduct::Full : WProduct::Truncated;
  const auto times = time_grid(f.t_end, s.drive_frequency(), f.samples_per_period);
  const EvolutionResult r =
      amplitudes(d, e.heff.cumulative(), e.w, basis_state(s.dimension(), f.initial), times, eo);

  Manifest m = base_manifest(sub, model.canonical);
  m.truncation = truncation(model, s.dimension(), e.heff.p_max);
  m.orders = {{"r_H", f.common.order}, {"r_W", f.common.w_order}};
  if (f.common.format == "json") {
    emit_json(f.common, m, series_json(r));
  } else {
    emit(f.common, m, series_csv(r));
  }
}

void run_oracle(const CLI::App* sub) {
  const EvolveFlags& f = oracle_flags;
  const ModelFile model = load_model(f.common.model);
  const DrivenSystem s = model.system();
  const ResonantDecomposition d = decomposition(model, s);
  const auto times = time_grid(f.t_end, s.drive_frequency(), f.samples_per_period);
  EvolutionResult r = integrate(s, basis_state(s.dimension(), f.initial), times);
  r.degenerate_set = d.degenerate_set;

  Manifest m = base_manifest(sub, model.canonical);
  m.truncation = truncation(model, s.dimension(), 0);
  if (f.common.format == "json") {
    const QuasiEnergies q = quasi_energies(s);
    json body = series_json(r);
    body["quasi_energies"] = q.values;
    body["labels"] = q.labels;
    body["ambiguous_labels"] = q.ambiguous;
    emit_json(f.common, m, body);
  } else {
    emit(f.common, m, series_csv(r));
  }
}

// ---------------------------------------------------------------------------

struct SweepFlags {
  CommonFlags common;
  std::string amplitudes;
  int target = -1;
  int photons = 0;
} sweep_flags;

void run_sweep(const CLI::App* sub) {
  const SweepFlags& f = sweep_flags;
  const ModelFile model = load_model(f.common.model);
  const int target = default_target(model, f.target);
  const int n = photons_for(model, target, f.photons);
  const auto amps = parse_doubles(f.amplitudes);
  struct Row {
    OrderPrediction pred;
    OraclePoint num;
  };
  std::vector<Row> rows(amps.size());
  parallel_for(static_cast<int>(amps.size()), f.common.threads, [&](int i) {
    const SystemFamily family = model.family(model.amplitude_scale() * amps[static_cast<std::size_t>(i)]);
    Row r;
    r.pred = predict_resonance(family, target, n, f.common.order, sambe_options(f.common));
    r.num = oracle_optimum(family, target, n, r.pred.omega_d, r.pred.rabi);
    rows[static_cast<std::size_t>(i)] = r;
  });

  Manifest m = base_manifest(sub, model.canonical);
  m.truncation = truncation(model, model.family(0.0)(1.0).dimension(), 0);
  m.orders = {{"r_H", f.common.order}};
  Csv csv({"A", "omega_num", "eps_num", "rabi_num", "F_max", "t_op", "omega_pred", "eps_pred", "rabi_pred",
           "flagged"});
  json list = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    csv.row({amps[i], r.num.omega_d, r.num.epsilon, r.num.rabi, r.num.fidelity, r.num.t_op, r.pred.omega_d,
             r.pred.epsilon, r.pred.rabi, r.num.flagged ? 1.0 : 0.0});
    list.push_back({{"A", amps[i]},
                    {"omega_num", r.num.omega_d},
                    {"eps_num", r.num.epsilon},
                    {"rabi_num", r.num.rabi},
                    {"F_max", r.num.fidelity},
                    {"t_op", r.num.t_op},
                    {"omega_pred", r.pred.omega_d},
                    {"eps_pred", r.pred.epsilon},
                    {"rabi_pred", r.pred.rabi},
                    {"flagged", r.num.flagged}});
  }
  if (f.common.format == "json") {
    emit_json(f.common, m, {{"target", target}, {"photon_number", n}, {"points", list}});
  } else {
    emit(f.common, m, csv.str());
  }
}

// ---------------------------------------------------------------------------

struct PulseFlags {
  CommonFlags common;
  std::optional<double> amplitude;
  std::string amplitudes;
  double sigma = 4.0;
  double t0 = 18.0;
  std::string orders = "7,4,2";
  std::string scheme = "toggling";
  int target = -1;
  int photons = 0;
  bool check_only = false;
} pulse_flags;

json design_json(const PulseDesign& p, const PulseEvaluation& ev) {
  const MagnusDesign& g = p.magnus;
  return {{"omega_d", p.omega_d},
          {"epsilon", p.epsilon},
          {"duration", p.duration},
          {"plateau", g.envelope.plateau()},
          {"sigma", g.envelope.sigma},
          {"t0", g.envelope.t0},
          {"scheme", to_string(g.scheme)},
          {"iterations", p.iterations},
          {"residual", p.residual},
          {"delta_m", g.delta_m},
          {"omega_x", g.omega_x},
          {"omega_y", g.omega_y},
          {"omega_m", g.omega_m},
          {"h_m", matrix_json(g.h_m)},
          {"convergence_integral", g.convergence_integral},
          {"converges", g.converges},
          {"adiabatic_ratio", g.adiabatic_ratio},
          {"adiabatic_flag", g.adiabatic_flag},
          {"magnus_order", g.magnus_order},
          {"nested_commutators", g.nested_commutators},
          {"square_omega_d", p.square_omega_d},
          {"square_t_pi", p.square_t_pi},
          {"fidelity", ev.fidelity},
          {"leakage", ev.leakage}};
}

void run_pulse(const CLI::App* sub) {
  const PulseFlags& f = pulse_flags;
  const ModelFile model = load_model(f.common.model);
  const auto ord = parse_ints(f.orders);
  if (ord.size() != 3) throw ValidationError("--orders takes r_H,r_W,magnus");
  if (ord[0] < 1) throw ValidationError("r_H must be positive");
  if (ord[2] != 2) throw ValidationError("only the second-order Magnus ramp terms are implemented (magnus = 2)");
  PulseOptions po;
  po.r_h = ord[0];
  po.target = default_target(model, f.target);
  po.photon_number = photons_for(model, po.target, f.photons);
  po.sigma = f.sigma;
  po.t0 = f.t0;
  po.scheme = magnus_scheme_from_string(f.scheme);
  po.sambe = sambe_options(f.common);

  Manifest m = base_manifest(sub, model.canonical);
  m.truncation = truncation(model, model.family(0.0)(1.0).dimension(), 0);
  m.orders = {{"r_H", ord[0]}, {"r_W", ord[1]}, {"magnus", ord[2]}};

  if (f.amplitudes.empty()) {
    po.check_only = f.check_only;
    const SystemFamily family = model.family(f.amplitude ? std::optional(model.amplitude_scale() * *f.amplitude)
                                                         : std::nullopt);
    const PulseDesign p = solve_pulse(family, po);
    const Envelope env{f.sigma, f.t0, p.duration};
    const PulseEvaluation ev = evaluate_pulse(family(p.omega_d), env, 0, po.target);
    emit_json(f.common, m, design_json(p, ev));
    return;
  }

  const auto amps = parse_doubles(f.amplitudes);
  po.check_only = true;
  std::vector<json> results(amps.size());
  parallel_for(static_cast<int>(amps.size()), f.common.threads, [&](int i) {
    const double a = amps[static_cast<std::size_t>(i)];
    const SystemFamily family = model.family(model.amplitude_scale() * a);
    json r = {{"A", a}};
    double f_square = kNaN;
    try {
      const PulseDesign p = solve_pulse(family, po);
      const Envelope env{f.sigma, f.t0, p.duration};
      const PulseEvaluation ev = evaluate_pulse(family(p.omega_d), env, 0, po.target);
      r["solved"] = true;
      r["design"] = design_json(p, ev);
      f_square = square_pulse_fidelity(family(p.square_omega_d), 0, po.target, p.square_t_pi);
    } catch (const NumericalError& e) {
      r["solved"] = false;
      r["failure"] = e.what();
      const OrderPrediction sq = predict_resonance(family, po.target, po.photon_number, po.r_h, po.sambe);
      f_square = square_pulse_fidelity(family(sq.omega_d), 0, po.target, sq.t_pi);
    }
    r["f_square"] = f_square;
    results[static_cast<std::size_t>(i)] = r;
  });

  if (f.common.format == "json") {
    emit_json(f.common, m, {{"points", results}});
    return;
  }
  Csv csv({"A", "solved", "omega_d", "duration", "delta_m", "omega_m", "convergence_integral", "converges",
           "F_designed", "F_square"});
  for (const json& r : results) {
    if (r.at("solved").get<bool>()) {
      const json& d = r.at("design");
      csv.row({r.at("A").get<double>(), 1.0, d.at("omega_d").get<double>(), d.at("duration").get<double>(),
               d.at("delta_m").get<double>(), d.at("omega_m").get<double>(),
               d.at("convergence_integral").get<double>(), d.at("converges").get<bool>() ? 1.0 : 0.0,
               d.at("fidelity").get<double>(), r.at("f_square").get<double>()});
    } else {
      csv.row({r.at("A").get<double>(), 0.0, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN,
               r.at("f_square").get<double>()});
    }
  }
  emit(f.common, m, csv.str());
}

// ---------------------------------------------------------------------------

struct FigureFlags {
  CommonFlags common;
  std::string preset;
  std::string amplitudes;
  double ratio = 0.0;
} figure_flags;

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> g;
  const int n = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) g.push_back(lo + i * step);
  return g;
}

void figure_rabi(const FigureFlags& f, Manifest& m, double ratio,
                 const std::vector<std::pair<int, int>>& orders) {
  const RabiDynamics rd = rabi_dynamics(ratio, orders);
  std::vector<std::string> header{"t", "oracle"};
  for (const auto& [hw, p] : rd.predictions) {
    header.push_back("rH" + std::to_string(hw.first) + "_rW" + std::to_string(hw.second));
  }
  Csv csv(header);
  for (std::size_t i = 0; i < rd.times.size(); ++i) {
    std::vector<double> v{rd.times[i], rd.oracle[i]};
    for (const auto& pr : rd.predictions) v.push_back(pr.second[i]);
    csv.row(v);
  }
  json t_pi = json::object();
  for (std::size_t i = 0; i < orders.size(); ++i) t_pi["rH" + std::to_string(orders[i].first)] = rd.t_pi[i];
  m.model_canonical = json{{"preset", f.preset}, {"omega01", 1.0}, {"omega_x", ratio}}.dump();
  m.truncation = {{"levels", 2}};
  m.annotations = {{"ratio", ratio}, {"omega_d", rd.omega_d}, {"t_op", rd.t_op}, {"oracle_peak", rd.oracle_peak},
                   {"t_pi", t_pi}};
  emit(f.common, m, csv.str());
}

void run_figure(const CLI::App* sub) {
  const FigureFlags& f = figure_flags;
  Manifest m = base_manifest(sub, "");
  m.command = sub->get_name() + " " + f.preset;
  auto amps = [&](std::vector<double> fallback) {
    return f.amplitudes.empty() ? fallback : parse_doubles(f.amplitudes);
  };

  if (f.preset == "fig4a" || f.preset == "fig4bc") {
    const bool a = f.preset == "fig4a";
    m.orders = {{"r_H", {3, 5, 7}}, {"r_W", a ? json{1} : json{1, 4}}};
    const std::vector<std::pair<int, int>> orders =
        a ? std::vector<std::pair<int, int>>{{3, 1}, {5, 1}, {7, 1}}
          : std::vector<std::pair<int, int>>{{3, 1}, {5, 1}, {7, 1}, {7, 4}};
    figure_rabi(f, m, f.ratio > 0.0 ? f.ratio : (a ? 0.05 : 0.25), orders);
    return;
  }

  if (f.preset == "fig5" || f.preset == "fig6") {
    const bool conv = f.preset == "fig5";
    FluxoniumOptions o;
    o.fidelities = !conv;
    o.threads = f.common.threads;
    const auto a = amps(conv ? grid(0.01, 0.10, 0.01) : grid(0.005, 0.05, 0.005));
    const auto pts = fluxonium_sweep(a, o);
    const FluxoniumCircuit circuit(o.spec);
    m.model_canonical = json{{"preset", f.preset}, {"ej", o.spec.ej_ghz}, {"el", o.spec.el_ghz},
                             {"ec", o.spec.ec_ghz}, {"basis_size", o.spec.basis_size},
                             {"level_cut", o.spec.level_cut}}.dump();
    m.truncation = {{"levels", o.spec.level_cut}, {"basis_size", o.spec.basis_size}};
    m.orders = {{"r_H", o.orders}, {"r_W", conv ? json(nullptr) : json(o.r_w)}};
    if (conv) {
      Csv csv({"A", "order", "eps_pred", "rabi_pred", "eps_num", "rabi_num", "flagged"});
      for (const auto& p : pts) {
        for (const auto& fo : p.orders) {
          csv.row({p.amplitude, static_cast<double>(fo.prediction.r_h), fo.prediction.epsilon, fo.prediction.rabi,
                   p.oracle.epsilon, p.oracle.rabi, p.oracle.flagged ? 1.0 : 0.0});
        }
      }
      emit(f.common, m, csv.str());
    } else {
      Csv csv({"A", "order", "F_square", "t_pi", "F_timed", "t_timed", "F_num", "t_op"});
      for (const auto& p : pts) {
        for (const auto& fo : p.orders) {
          csv.row({p.amplitude, static_cast<double>(fo.prediction.r_h), fo.f_square, fo.prediction.t_pi,
                   fo.f_timed, fo.t_timed, p.oracle.fidelity, p.oracle.t_op});
        }
      }
      emit(f.common, m, csv.str());
    }
    return;
  }

  if (f.preset == "fig7") {
    PulseSweepOptions o;
    o.threads = f.common.threads;
    const auto pts = pulse_sweep(amps(grid(0.005, 0.06, 0.005)), o);
    m.model_canonical = json{{"preset", f.preset}, {"ej", o.spec.ej_ghz}, {"el", o.spec.el_ghz},
                             {"ec", o.spec.ec_ghz}, {"sigma", o.sigma}, {"t0", o.t0},
                             {"scheme", to_string(o.scheme)}}.dump();
    m.truncation = {{"levels", o.spec.level_cut}, {"basis_size", o.spec.basis_size}};
    m.orders = {{"r_H", o.orders}, {"magnus", 2}};
    Csv csv({"A", "order", "solved", "omega_d", "duration", "infidelity_designed", "infidelity_square",
             "convergence_integral", "converges"});
    for (const auto& p : pts) {
      csv.row({p.amplitude, static_cast<double>(p.r_h), p.solved ? 1.0 : 0.0,
               p.solved ? p.design.omega_d : kNaN, p.solved ? p.design.duration : kNaN,
               p.solved ? 1.0 - p.f_designed : kNaN, 1.0 - p.f_square,
               p.solved ? p.design.magnus.convergence_integral : kNaN,
               p.solved ? (p.design.magnus.converges ? 1.0 : 0.0) : kNaN});
    }
    emit(f.common, m, csv.str());
    return;
  }

  if (f.preset == "fig9") {
    TransmonOptions o;
    o.threads = f.common.threads;
    const auto pts = transmon_sweep(amps({0.2, 0.5, 1.0, 1.5, 2.0}), o);
    m.model_canonical = json{{"preset", f.preset}, {"omega_q", o.spec.omega_q}, {"alpha", o.spec.alpha},
                             {"basis_size", o.spec.basis_size}, {"level_cut", o.spec.level_cut}}.dump();
    m.truncation = {{"levels", o.spec.level_cut}, {"basis_size", o.spec.basis_size}};
    m.orders = {{"r_H", o.r_h}};
    Csv csv({"A_GHz", "eps_dpt", "eps_rwa", "eps_num", "coupling_dpt", "coupling_rwa", "coupling_num", "F_num",
             "flagged"});
    for (const auto& p : pts) {
      csv.row({p.amplitude_ghz, p.eps_dpt, p.eps_rwa, p.eps_num, p.coupling_dpt, p.coupling_rwa, p.coupling_num,
               p.fidelity, p.flagged ? 1.0 : 0.0});
    }
    emit(f.common, m, csv.str());
    return;
  }
  throw ValidationError("unknown figure preset '" + f.preset + "'");
}

template <class F>
void add(CLI::App* sub, F run) {
  registry().push_back({sub, [sub, run] { run(sub); }});
}

}  // namespace

void register_commands(CLI::App& app) {
  {
    CLI::App* sub = app.add_subcommand("coeffs", "Exact multiplicity coefficients of H_eff or W");
    add_common(sub, coeffs_flags.common, false, "csv");
    sub->add_option("--kind", coeffs_flags.kind, "Table kind")->check(CLI::IsMember({"heff", "w"}));
    sub->add_option("--order", coeffs_flags.order, "Perturbation order")->check(CLI::Range(0, 12));
    add(sub, run_coeffs);
  }
  {
    CLI::App* sub = app.add_subcommand("heff", "Effective Hamiltonian on the degenerate set");
    add_common(sub, heff_flags, true, "json");
    add_orders(sub, heff_flags, 2, 1);
    add(sub, run_heff);
  }
  {
    CLI::App* sub = app.add_subcommand("processes", "Diagrams contributing to one H_eff element");
    add_common(sub, process_flags.common, true, "json");
    add_orders(sub, process_flags.common, 2, 1);
    sub->add_option("--from", process_flags.from, "Initial level k (default: first of D)");
    sub->add_option("--to", process_flags.to, "Final level l (default: last of D)");
    sub->add_option("--cap", process_flags.cap, "Maximal number of diagrams");
    add(sub, run_processes);
  }
  {
    CLI::App* sub = app.add_subcommand("resonance", "Drive frequency with zero effective detuning");
    add_common(sub, resonance_flags.common, true, "json");
    add_orders(sub, resonance_flags.common, 2, 1);
    sub->add_option("--target", resonance_flags.target, "Level brought into resonance with level 0");
    sub->add_option("--photons", resonance_flags.photons, "Photon number n_target")->check(CLI::Range(1, 1000));
    sub->add_option("--bracket", resonance_flags.bracket, "Search bracket lo,hi (file units)");
    add(sub, run_resonance);
  }
  for (auto* which : {&evolve_flags, &oracle_flags}) {
    const bool ev = which == &evolve_flags;
    CLI::App* sub = app.add_subcommand(ev ? "evolve" : "oracle",
                                       ev ? "Perturbative state evolution" : "Exact state evolution");
    add_common(sub, which->common, true, "csv");
    if (ev) {
      add_orders(sub, which->common, 2, 1);
      sub->add_option("--product", which->product, "W product")->check(CLI::IsMember({"truncated", "full"}));
    }
    sub->add_option("--t-end", which->t_end, "Final time")->required()->check(CLI::NonNegativeNumber);
    sub->add_option("--samples-per-period", which->samples_per_period, "Samples per drive period")
        ->check(CLI::Range(1, 100000));
    sub->add_option("--initial", which->initial, "Initial level")->check(CLI::NonNegativeNumber);
    if (ev) {
      add(sub, run_evolve);
    } else {
      add(sub, run_oracle);
    }
  }
  {
    CLI::App* sub = app.add_subcommand("sweep", "Predicted and exact resonance over drive amplitudes");
    add_common(sub, sweep_flags.common, true, "csv");
    add_orders(sub, sweep_flags.common, 3, 1);
    sub->add_option("--amplitudes", sweep_flags.amplitudes, "Comma-separated amplitudes (file units)")->required();
    sub->add_option("--target", sweep_flags.target, "Target level");
    sub->add_option("--photons", sweep_flags.photons, "Photon number n_target")->check(CLI::Range(1, 1000));
    add(sub, run_sweep);
  }
  {
    CLI::App* sub = app.add_subcommand("pulse", "Flat-top pulse design from the Magnus expansion");
    add_common(sub, pulse_flags.common, true, "json");
    sub->add_flag("--allow-near-resonance", pulse_flags.common.allow_near_resonance,
                  "Record near-resonant denominators instead of failing");
    sub->add_option("--amplitude", pulse_flags.amplitude, "Drive amplitude (file units)");
    sub->add_option("--amplitudes", pulse_flags.amplitudes, "Comma-separated amplitudes for a design sweep");
    sub->add_option("--sigma", pulse_flags.sigma, "Ramp width")->check(CLI::PositiveNumber);
    sub->add_option("--t0", pulse_flags.t0, "Ramp duration")->check(CLI::PositiveNumber);
    sub->add_option("--orders", pulse_flags.orders, "r_H,r_W,magnus");
    sub->add_option("--scheme", pulse_flags.scheme, "Ramp treatment")->check(CLI::IsMember({"toggling", "bch"}));
    sub->add_option("--target", pulse_flags.target, "Target level");
    sub->add_option("--photons", pulse_flags.photons, "Photon number n_target")->check(CLI::Range(1, 1000));
    sub->add_flag("--check-only", pulse_flags.check_only, "Report the convergence check instead of failing");
    add(sub, run_pulse);
  }
  {
    CLI::App* sub = app.add_subcommand("figure", "Data series of a figure preset");
    add_common(sub, figure_flags.common, false, "csv");
    sub->add_option("preset", figure_flags.preset, "Preset")
        ->required()
        ->check(CLI::IsMember({"fig4a", "fig4bc", "fig5", "fig6", "fig7", "fig9"}));
    sub->add_option("--amplitudes", figure_flags.amplitudes, "Override the amplitude grid");
    sub->add_option("--ratio", figure_flags.ratio, "Override Omega_x / w01 (fig4a, fig4bc)")
        ->check(CLI::PositiveNumber);
    add(sub, run_figure);
  }
  app.require_subcommand(1);
}

void run_selected(const CLI::App&) {
  for (const Command& c : registry()) {
    if (c.app->parsed()) {
      c.run();
      return;
    }
  }
  throw ValidationError("no subcommand given");
}

}  // namespace floquet::cli
