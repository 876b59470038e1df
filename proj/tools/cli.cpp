#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "varinv/field/action.hpp"
#include "varinv/field/maxwell.hpp"
#include "varinv/mech/mech.hpp"
#include "varinv/parse/problem.hpp"
#include "varinv/varcalc/varcalc.hpp"

namespace varinv::cli {

namespace {

using json = nlohmann::ordered_json;
using parse::Kind;
using parse::ProblemFile;
using parse::render_expr;

constexpr int kSchemaVersion = 1;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Single-line JSON with ", " and ": " separators, keys in insertion order.
std::string inline_json(const json& j) {
  if (j.is_object()) {
    std::string s = "{";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) s += ", ";
      first = false;
      s += json(it.key()).dump() + ": " + inline_json(it.value());
    }
    return s + "}";
  }
  if (j.is_array()) {
    std::string s = "[";
    for (std::size_t i = 0; i < j.size(); ++i) s += (i ? ", " : "") + inline_json(j[i]);
    return s + "]";
  }
  return j.dump();
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

json report(const std::string& command, json provenance) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["provenance"] = std::move(provenance);
  return j;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot read file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse::parse_problem(ss.str());
  } catch (const parse::ParseError& e) {
    throw InputError(path + ":" + e.what());
  }
}

void expect_kind(const ProblemFile& p, std::initializer_list<Kind> kinds, const std::string& path) {
  for (Kind k : kinds)
    if (p.kind == k) return;
  std::string names;
  for (Kind k : kinds) names += (names.empty() ? "" : " or ") + std::string(parse::kind_keyword(k));
  throw InputError(path + ": expected a " + names + " problem, found " +
                   std::string(parse::kind_keyword(p.kind)));
}

std::string index_letters(const jet::JetSpace& space, const jet::MultiIndex& J) {
  std::string s;
  for (int j : J.indices()) s += space.independents[j];
  return s;
}

std::vector<std::string> render_all(const std::vector<jet::Expr>& es) {
  std::vector<std::string> out;
  for (const auto& e : es) out.push_back(render_expr(e));
  return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? sep : "") + parts[i];
  return s;
}

// ---------------------------------------------------------------- symbolic

varcalc::SourceForm source_form_of(const ProblemFile& p) {
  if (p.kind == Kind::Lagrangian) return varcalc::euler_lagrange(varcalc::Lagrangian(p.body.at(0)));
  return varcalc::SourceForm::from(p.body);
}

int cmd_varcheck(const std::string& path, bool as_json, std::ostream& out) {
  const ProblemFile p = load_problem(path);
  expect_kind(p, {Kind::System, Kind::Lagrangian}, path);
  const auto hr = varcalc::helmholtz(source_form_of(p));
  const auto& space = *hr.space;
  if (as_json) {
    json entries = json::array();
    for (const auto* w : hr.witnesses()) {
      json e;
      e["sigma"] = space.dependents[w->sigma];
      e["mu"] = space.dependents[w->mu];
      e["index"] = index_letters(space, w->index);
      e["value"] = render_expr(w->value);
      entries.push_back(std::move(e));
    }
    json j;
    j["variational"] = hr.variational;
    j["nonzero_entries"] = std::move(entries);
    out << inline_json(j) << "\n";
    return kOk;
  }
  if (hr.variational) {
    out << "variational\n";
    return kOk;
  }
  std::vector<std::string> witnesses;
  for (const auto* w : hr.witnesses())
    witnesses.push_back("H[" + space.dependents[w->sigma] + "," + space.dependents[w->mu] + ",(" +
                        index_letters(space, w->index) + ")] = " + render_expr(w->value));
  out << "NOT variational; witness " << join(witnesses, "; witness ") << "\n";
  return kOk;
}

int cmd_el(const std::string& path, bool as_json, std::ostream& out) {
  const ProblemFile p = load_problem(path);
  expect_kind(p, {Kind::Lagrangian}, path);
  const auto E = varcalc::euler_lagrange(varcalc::Lagrangian(p.body.at(0)));
  const ProblemFile sys = parse::make_problem(Kind::System, p.name, E.space, E.components);
  if (as_json) {
    json j = report("el", json{{"file", path}});
    j["equations"] = render_all(E.components);
    j["problem"] = parse::render(sys);
    out << inline_json(j) << "\n";
    return kOk;
  }
  out << parse::render(sys);
  return kOk;
}

int cmd_tonti(const std::string& path, bool verify, bool as_json, std::ostream& out) {
  const ProblemFile p = load_problem(path);
  expect_kind(p, {Kind::System}, path);
  const auto E = varcalc::SourceForm::from(p.body);
  const auto L = varcalc::tonti_lagrangian(E);
  const ProblemFile lag = parse::make_problem(Kind::Lagrangian, p.name, L.space, {L.density});
  bool variational = false, round_trip = false;
  if (verify) {
    variational = varcalc::helmholtz(E).variational;
    const auto back = varcalc::euler_lagrange(L);
    round_trip = back.components.size() == E.components.size();
    for (std::size_t s = 0; round_trip && s < E.components.size(); ++s)
      round_trip = back.components[s] == E.components[s];
  }
  if (as_json) {
    json j = report("tonti", json{{"file", path}});
    j["lagrangian"] = render_expr(L.density);
    j["problem"] = parse::render(lag);
    if (verify) {
      j["variational"] = variational;
      j["round_trip"] = round_trip;
    }
    out << inline_json(j) << "\n";
    return kOk;
  }
  out << parse::render(lag);
  if (verify) {
    out << "# variational: " << (variational ? "yes" : "no") << "\n";
    out << "# round-trip: "
        << (round_trip ? "euler_lagrange reproduces the source form"
                       : "euler_lagrange differs from the source form")
        << "\n";
  }
  return kOk;
}

struct MechInputs {
  mech::SymVectorField field;
  mech::SymTwoForm omega;
};

MechInputs load_mech(const std::string& field_path, const std::string& form_path) {
  const ProblemFile f = load_problem(field_path);
  expect_kind(f, {Kind::MechField}, field_path);
  const ProblemFile w = load_problem(form_path);
  expect_kind(w, {Kind::MechForm}, form_path);
  if (f.space->dependents != w.space->dependents)
    throw InputError(form_path + ": coordinates differ from " + field_path);
  const auto chart = mech::make_chart(f.space->dependents);
  const int d = mech::dimension(chart);
  mech::SymTwoForm omega(chart);
  std::size_t slot = 0;
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) omega.set(j, k, w.body.at(slot++).in_space(chart));
  return {mech::SymVectorField::from(chart, f.body), std::move(omega)};
}

std::string two_form_text(const mech::SymTwoForm& w, const std::string& label) {
  const auto& names = w.chart()->dependents;
  std::vector<std::string> parts;
  for (int j = 0; j < w.dim(); ++j)
    for (int k = j + 1; k < w.dim(); ++k)
      if (!w.at(j, k).is_zero())
        parts.push_back(label + "[" + names[j] + "," + names[k] + "] = " + render_expr(w.at(j, k)));
  return join(parts, "; ");
}

json two_form_json(const mech::SymTwoForm& w) {
  const auto& names = w.chart()->dependents;
  json out = json::array();
  for (int j = 0; j < w.dim(); ++j)
    for (int k = j + 1; k < w.dim(); ++k)
      if (!w.at(j, k).is_zero())
        out.push_back(json{{"i", names[j]}, {"j", names[k]}, {"value", render_expr(w.at(j, k))}});
  return out;
}

int cmd_fode(const std::string& field_path, const std::string& form_path, std::uint64_t seed,
             bool as_json, std::ostream& out) {
  auto in = load_mech(field_path, form_path);
  const auto& names = in.omega.chart()->dependents;
  json prov{{"field", field_path}, {"form", form_path}, {"seed", seed}};
  try {
    const auto r = mech::fode_lagrangian(in.field, in.omega, seed);
    bool residual_zero = true;
    for (const auto& e : r.residual) residual_zero = residual_zero && e.is_zero();
    int nonzero_det = 0;
    for (const auto& s : r.determinant_samples) nonzero_det += s.determinant != 0;
    if (as_json) {
      json j = report("mech fode", prov);
      j["hypotheses_hold"] = true;
      json B;
      for (std::size_t k = 0; k < names.size(); ++k) B[names[k]] = render_expr(r.potential.coefficients[k]);
      j["potential"] = B;
      j["energy"] = render_expr(r.energy);
      j["lagrangian"] = render_expr(r.lagrangian);
      j["residual"] = render_all(r.residual);
      j["residual_zero"] = residual_zero;
      json dets = json::array();
      for (const auto& s : r.determinant_samples) {
        std::vector<std::string> pt;
        for (const auto& x : s.point) pt.push_back(x.get_str());
        dets.push_back(json{{"point", pt}, {"determinant", s.determinant.get_str()}});
      }
      j["determinant_samples"] = dets;
      out << inline_json(j) << "\n";
      return kOk;
    }
    std::vector<std::string> B;
    for (std::size_t k = 0; k < names.size(); ++k)
      B.push_back(names[k] + ": " + render_expr(r.potential.coefficients[k]));
    out << "hypotheses: omega closed, L_Gamma omega = 0\n";
    out << "B: " << join(B, "; ") << "\n";
    out << "E: " << render_expr(r.energy) << "\n";
    out << "L: " << render_expr(r.lagrangian) << "\n";
    out << "residual: " << join(render_all(r.residual), "; ") << "\n";
    out << "nondegenerate at " << nonzero_det << "/" << r.determinant_samples.size()
        << " sample points\n";
    return kOk;
  } catch (const mech::FodeHypothesisError& e) {
    if (as_json) {
      json j = report("mech fode", prov);
      j["hypotheses_hold"] = false;
      j["closed"] = e.closedness().closed;
      json res = json::array();
      for (const auto& t : e.closedness().residual)
        res.push_back(json{{"i", names[t.i]}, {"j", names[t.j]}, {"k", names[t.k]},
                           {"value", render_expr(t.value)}});
      j["closedness_residual"] = res;
      j["lie_derivative"] = two_form_json(e.lie());
      out << inline_json(j) << "\n";
      return kOk;
    }
    out << "hypotheses fail: " << e.what() << "\n";
    for (const auto& t : e.closedness().residual)
      out << "witness (d omega)[" << names[t.i] << "," << names[t.j] << "," << names[t.k]
          << "] = " << render_expr(t.value) << "\n";
    if (!e.lie().is_zero()) out << "witness " << two_form_text(e.lie(), "(L_Gamma omega)") << "\n";
    return kOk;
  }
}

int cmd_sode(const std::string& field_path, const std::string& form_path, bool as_json,
             std::ostream& out) {
  auto in = load_mech(field_path, form_path);
  if (mech::dimension(in.omega.chart()) % 2)
    throw InputError(form_path + ": a tangent chart needs an even number of coordinates");
  const auto r = mech::sode_check(in.field, in.omega);
  const auto& names = in.omega.chart()->dependents;
  const int d = static_cast<int>(names.size()) / 2;
  if (as_json) {
    json j = report("mech sode-check", json{{"field", field_path}, {"form", form_path}});
    j["second_order"] = r.second_order;
    std::vector<std::string> fails;
    for (int k : r.second_order_failures) fails.push_back(names[k]);
    j["second_order_failures"] = fails;
    j["lie_derivative"] = two_form_json(r.lie);
    json vert = json::array();
    for (const auto& v : r.vertical)
      vert.push_back(json{{"i", names[d + v.j]}, {"j", names[d + v.k]}, {"value", render_expr(v.value)}});
    j["vertical"] = vert;
    j["hypotheses_hold"] = r.hypotheses_hold;
    out << inline_json(j) << "\n";
    return kOk;
  }
  auto yes = [](bool b) { return b ? "yes" : "no"; };
  out << "second order: " << yes(r.second_order) << "\n";
  for (int k : r.second_order_failures)
    out << "witness: component along " << names[k] << " is not " << names[d + k] << "\n";
  out << "L_Gamma omega = 0: " << yes(r.lie.is_zero()) << "\n";
  if (!r.lie.is_zero()) out << "witness " << two_form_text(r.lie, "(L_Gamma omega)") << "\n";
  out << "vertical block zero: " << yes(r.vertical.empty()) << "\n";
  for (const auto& v : r.vertical)
    out << "witness omega[" << names[d + v.j] << "," << names[d + v.k] << "] = " << render_expr(v.value)
        << "\n";
  out << "hypotheses hold: " << yes(r.hypotheses_hold) << "\n";
  if (r.hypotheses_hold) out << "hypotheses verified; no Lagrangian construction is provided for this case\n";
  return kOk;
}

// ---------------------------------------------------------------- numeric

struct GridOptions {
  int n = 16;
  double dt = 0;  // 0 selects 0.1 dx
  double length = field::GridSpec::kTwoPi;

  field::GridSpec make() const {
    const double step = dt > 0 ? dt : 0.1 * length / n;
    return field::GridSpec::make(n, step, length);
  }
  json provenance(const field::GridSpec& g) const {
    return json{{"n", g.n}, {"length", g.length}, {"dt", g.dt}};
  }
};

field::Gauge parse_gauge(const std::string& spec, field::Spectral& sp) {
  if (spec == "zero") return field::Gauge::none(sp.grid());
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "random") {
    unsigned long long seed = 0;
    double cutoff = 0;
    char tail = 0;
    if (std::sscanf(rest.c_str(), "%llu,%lf%c", &seed, &cutoff, &tail) != 2)
      throw field::ConfigError("gauge random expects seed,cutoff: " + spec);
    return field::Gauge::random_smooth(sp, seed, cutoff);
  }
  if (kind == "file") {
    std::ifstream in(rest);
    if (!in) throw field::ConfigError("cannot read gauge file: " + rest);
    field::Lattice phi;
    for (double x; in >> x;) phi.push_back(x);
    if (!in.eof()) throw field::ConfigError("gauge file holds a non-numeric value: " + rest);
    if (phi.size() != sp.grid().points())
      throw field::ConfigError("gauge file must hold n^3 values: " + rest);
    return field::Gauge::from_lattice(std::move(phi), spec);
  }
  throw field::ConfigError("unknown gauge '" + spec + "' (zero, random:seed,cutoff, file:path)");
}

field::ExtendedState perturbation(const field::GridSpec& g, field::VecField a, field::VecField e,
                                  field::Lattice psi = {}, field::Lattice mu = {}) {
  auto s = field::ExtendedState::zeros(g);
  if (a.points()) s.A_tilde = std::move(a);
  if (e.points()) s.E = std::move(e);
  if (!psi.empty()) s.psi = std::move(psi);
  if (!mu.empty()) s.mu = std::move(mu);
  return s;
}

struct RunOptions {
  GridOptions grid;
  long steps = 100;
  long every = 10;
  std::string gauge = "zero";
  std::string init = "standing-wave:0,0,1,1";
  std::string out;
  std::string snapshot;
};

int cmd_sim_run(const RunOptions& o, bool as_json, std::ostream& out) {
  const auto g = o.grid.make();
  if (o.steps < 0 || o.every < 1) throw field::ConfigError("steps must be >= 0 and every >= 1");
  field::Integrator integ(g);
  auto& sp = integ.spectral();
  auto s = field::project_gauss(sp, field::initial_condition(o.init, sp));
  const auto gauge = parse_gauge(o.gauge, sp);
  const auto none = field::Gauge::none(g);
  const auto a = field::random_solenoidal(sp, 1, 2);
  auto d1 = perturbation(g, a, {}), d2 = perturbation(g, {}, a);
  const double p0 = field::symplectic_product(sp, d1, d2);

  std::ofstream csv;
  if (!o.out.empty()) {
    csv.open(o.out);
    if (!csv) throw field::ConfigError("cannot write " + o.out);
    csv << "step,time,energy,gauss_residual,sympl_drift\n";
  }
  const double h0 = field::energy(sp, s);
  double max_dev = 0, max_gauss = 0, max_drift = 0, h = h0;
  auto row = [&](long step) {
    h = field::energy(sp, s);
    const double gauss = field::gauss_residual(sp, s.E);
    const double drift = std::abs(field::symplectic_product(sp, d1, d2) - p0) / std::abs(p0);
    max_dev = std::max(max_dev, h0 != 0 ? std::abs(h - h0) / h0 : std::abs(h));
    max_gauss = std::max(max_gauss, gauss);
    max_drift = std::max(max_drift, drift);
    if (csv.is_open()) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%ld,%.10g,%.17g,%.6e,%.6e\n", step, step * g.dt, h, gauss, drift);
      csv << buf;
    }
  };
  row(0);
  for (long done = 0; done < o.steps;) {
    const long chunk = std::min(o.every, o.steps - done);
    integ.evolve(s, gauge, chunk);
    integ.evolve(d1, none, chunk);
    integ.evolve(d2, none, chunk);
    done += chunk;
    row(done);
  }
  if (!o.snapshot.empty()) field::write_snapshot(o.snapshot, g, s);

  if (as_json) {
    json prov = o.grid.provenance(g);
    prov["steps"] = o.steps;
    prov["every"] = o.every;
    prov["init"] = o.init;
    prov["gauge"] = gauge.provenance;
    json j = report("sim run", prov);
    j["energy_initial"] = h0;
    j["energy_final"] = h;
    j["max_relative_energy_deviation"] = max_dev;
    j["max_gauss_residual"] = max_gauss;
    j["max_sympl_drift"] = max_drift;
    if (!o.out.empty()) j["csv"] = o.out;
    if (!o.snapshot.empty()) j["snapshot"] = o.snapshot;
    out << inline_json(j) << "\n";
    return kOk;
  }
  out << "grid n=" << g.n << " dt=" << fixed(g.dt) << " steps=" << o.steps << " t=" << fixed(o.steps * g.dt)
      << "\n";
  out << "energy " << fixed(h0) << " -> " << fixed(h) << " (max relative deviation " << sci(max_dev)
      << ")\n";
  out << "max gauss residual " << sci(max_gauss) << "\n";
  out << "max symplectic drift " << sci(max_drift) << "\n";
  return kOk;
}

struct CompareOptions {
  GridOptions grid;
  long steps = 1000;
  std::string init = "random:1,3";
  std::string gauge_a = "zero";
  std::string gauge_b = "random:2,3";
};

int cmd_gauge_compare(const CompareOptions& o, bool as_json, std::ostream& out) {
  const auto g = o.grid.make();
  field::Integrator integ(g);
  auto& sp = integ.spectral();
  const auto s = field::project_gauss(sp, field::initial_condition(o.init, sp));
  const auto ga = parse_gauge(o.gauge_a, sp), gb = parse_gauge(o.gauge_b, sp);
  const auto r = field::gauge_compare(integ, s, ga, gb, o.steps);
  const double rel_div_free = r.A_difference > 0 ? r.A_difference_div_free / r.A_difference : 0.0;
  if (as_json) {
    json prov = o.grid.provenance(g);
    prov["steps"] = o.steps;
    prov["init"] = o.init;
    prov["gauge_a"] = ga.provenance;
    prov["gauge_b"] = gb.provenance;
    json j = report("sim gauge-compare", prov);
    j["field_scale"] = r.field_scale;
    j["max_E_difference"] = r.max_E_difference;
    j["max_B_difference"] = r.max_B_difference;
    j["A_difference"] = r.A_difference;
    j["A_difference_div_free"] = r.A_difference_div_free;
    out << inline_json(j) << "\n";
    return kOk;
  }
  out << "field scale " << sci(r.field_scale) << "\n";
  out << "max |E_a - E_b| " << sci(r.max_E_difference) << "\n";
  out << "max |curl A_a - curl A_b| " << sci(r.max_B_difference) << "\n";
  out << "|A_a - A_b| " << sci(r.A_difference) << ", divergence-free part " << sci(rel_div_free)
      << " relative\n";
  return kOk;
}

struct EmbedOptions {
  GridOptions grid{8};
  long pairs = 3;
  long steps = 1000;
  long check_every = 100;
  std::uint64_t seed = 1;
};

int cmd_embed_check(const EmbedOptions& o, bool as_json, std::ostream& out) {
  const auto g = o.grid.make();
  if (o.pairs < 1) throw field::ConfigError("--pairs must be at least 1");
  field::Integrator integ(g);
  auto& sp = integ.spectral();
  std::uint64_t next = o.seed * 1000;
  auto vec = [&] { return field::random_solenoidal(sp, next++, 2); };
  auto scal = [&] { return field::random_scalar(sp, next++, 2); };
  std::vector<field::SymplecticSample> pairs;
  for (long i = 0; i < o.pairs; ++i) {
    if (i == 0) {
      const auto a = vec();
      pairs.push_back({"canonical", perturbation(g, a, {}), perturbation(g, {}, a)});
    } else if (i == 1) {
      pairs.push_back({"gauge", perturbation(g, {}, {}, scal()), perturbation(g, {}, {}, {}, scal())});
    } else {
      auto d1 = perturbation(g, vec(), vec(), scal(), scal());
      auto d2 = perturbation(g, vec(), vec(), scal(), scal());
      pairs.push_back({"mixed-" + std::to_string(i - 1), std::move(d1), std::move(d2)});
    }
  }
  bool pullback_exact = true;
  for (const auto& p : pairs) {
    auto r1 = p.d1, r2 = p.d2;
    r1.psi.assign(g.points(), 0.0);
    r1.mu.assign(g.points(), 0.0);
    r2.psi.assign(g.points(), 0.0);
    r2.mu.assign(g.points(), 0.0);
    pullback_exact = pullback_exact &&
                     field::symplectic_product(sp, r1, r2) == field::omega_pairing(g, r1, r2);
  }
  auto base = field::extend(sp, field::random_state(sp, o.seed, 2), field::random_scalar(sp, next++, 2));
  const auto gauge = field::Gauge::random_smooth(sp, o.seed + 7, 2);
  const auto drift = field::flow_preserves_form(integ, base, gauge, pairs, o.steps, o.check_every);
  double worst = 0;
  for (const auto& d : drift) worst = std::max(worst, d.max_relative_drift);

  if (as_json) {
    json prov = o.grid.provenance(g);
    prov["pairs"] = o.pairs;
    prov["steps"] = o.steps;
    prov["seed"] = o.seed;
    json j = report("sim embed-check", prov);
    json arr = json::array();
    for (const auto& d : drift)
      arr.push_back(json{{"label", d.label}, {"initial", d.initial}, {"final", d.final},
                         {"max_relative_drift", d.max_relative_drift}});
    j["pairings"] = arr;
    j["max_relative_drift"] = worst;
    j["pullback_bit_exact"] = pullback_exact;
    out << inline_json(j) << "\n";
    return kOk;
  }
  for (const auto& d : drift)
    out << d.label << ": pairing " << sci(d.initial) << " -> " << sci(d.final) << ", max relative drift "
        << sci(d.max_relative_drift) << "\n";
  out << "pullback bit-exact: " << (pullback_exact ? "yes" : "no") << "\n";
  return kOk;
}

struct ActionOptions {
  GridOptions grid{16, 0.05};
  int halvings = 1;
  double t_end = 2.0;
  std::string init = "standing-wave:0,0,1,1";
  std::string gauge = "zero";
};

int cmd_action_check(const ActionOptions& o, bool as_json, std::ostream& out) {
  if (o.halvings < 1) throw field::ConfigError("--dt-halvings must be at least 1");
  if (!(o.t_end > 0)) throw field::ConfigError("--t-end must be positive");
  const auto g0 = o.grid.make();
  json levels = json::array();
  std::vector<std::string> lines;
  double prev = 0;
  for (int level = 0; level <= o.halvings; ++level) {
    const double dt = g0.dt / std::ldexp(1.0, level);
    const auto g = field::GridSpec::make(g0.n, dt, g0.length);
    field::Integrator integ(g);
    auto& sp = integ.spectral();
    const auto gauge = parse_gauge(o.gauge, sp);
    auto s = field::extend(sp, field::project_gauss(sp, field::initial_condition(o.init, sp)));
    std::vector<field::ExtendedState> traj = {s};
    const long steps = std::lround(o.t_end / dt);
    integ.evolve(s, gauge, steps, [&](long, const field::ExtendedState& x) { traj.push_back(x); });
    const auto r = field::action_stationarity(sp, traj, gauge);
    const auto action = field::discrete_action(sp, traj, gauge);
    const double res = r.field_residual();
    json lv{{"dt", dt},
            {"steps", steps},
            {"action", action.total},
            {"residual", res},
            {"psi_rate_residual", r.psi_rate_residual},
            {"mu_rate_residual", r.mu_rate_residual}};
    std::string line = "dt " + fixed(dt) + ": action " + fixed(action.total) + ", residual " + sci(res);
    if (level > 0) {
      lv["ratio"] = res > 0 ? prev / res : 0.0;
      line += ", ratio " + fixed(res > 0 ? prev / res : 0.0);
    }
    line += ", psi_dot - phi " + sci(r.psi_rate_residual) + ", mu_dot " + sci(r.mu_rate_residual);
    levels.push_back(lv);
    lines.push_back(line);
    prev = res;
  }
  if (as_json) {
    json prov = o.grid.provenance(g0);
    prov["dt_halvings"] = o.halvings;
    prov["t_end"] = o.t_end;
    prov["init"] = o.init;
    prov["gauge"] = o.gauge;
    json j = report("sim action-check", prov);
    j["levels"] = levels;
    out << inline_json(j) << "\n";
    return kOk;
  }
  for (const auto& l : lines) out << l << "\n";
  return kOk;
}

void add_grid_options(CLI::App* cmd, GridOptions& g) {
  cmd->add_option("--n", g.n, "points per axis (power of two, >= 8)")->capture_default_str();
  cmd->add_option("--dt", g.dt, "time step (default 0.1*dx)");
  cmd->add_option("--length", g.length, "box length")->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inverse-problem toolkit: variationality checks, Lagrangians, Maxwell grid runs",
               "varinv"};
  app.require_subcommand(1);
  bool as_json = false;
  std::string file, field_path, form_path;
  bool verify = false;
  std::uint64_t seed = 1;

  auto* varcheck = app.add_subcommand("varcheck", "Helmholtz variationality check");
  varcheck->add_option("file", file)->required();
  varcheck->add_flag("--json", as_json);

  auto* el = app.add_subcommand("el", "Euler-Lagrange equations of a Lagrangian");
  el->add_option("file", file)->required();
  el->add_flag("--json", as_json);

  auto* tonti = app.add_subcommand("tonti", "Tonti-Vainberg Lagrangian of a source form");
  tonti->add_option("file", file)->required();
  tonti->add_flag("--verify", verify);
  tonti->add_flag("--json", as_json);

  auto* mech_cmd = app.add_subcommand("mech", "finite-dimensional inverse problem");
  mech_cmd->require_subcommand(1);
  auto* fode = mech_cmd->add_subcommand("fode", "first-order Lagrangian from (Gamma, omega)");
  fode->add_option("--field", field_path)->required();
  fode->add_option("--form", form_path)->required();
  fode->add_option("--seed", seed, "seed for the nondegeneracy samples")->capture_default_str();
  fode->add_flag("--json", as_json);
  auto* sode = mech_cmd->add_subcommand("sode-check", "second-order hypotheses on a tangent chart");
  sode->add_option("--field", field_path)->required();
  sode->add_option("--form", form_path)->required();
  sode->add_flag("--json", as_json);

  auto* sim = app.add_subcommand("sim", "periodic Maxwell simulations");
  sim->require_subcommand(1);
  RunOptions run_o;
  auto* run = sim->add_subcommand("run", "evolve a state and write a CSV time series");
  add_grid_options(run, run_o.grid);
  run->add_option("--steps", run_o.steps)->capture_default_str();
  run->add_option("--every", run_o.every, "observer interval")->capture_default_str();
  run->add_option("--gauge", run_o.gauge, "zero | random:seed,cutoff | file:path")->capture_default_str();
  run->add_option("--init", run_o.init, "standing-wave:kx,ky,kz,amp | random:seed,cutoff | file:path")
      ->capture_default_str();
  run->add_option("--out", run_o.out, "CSV output path");
  run->add_option("--snapshot", run_o.snapshot, "final state snapshot path");
  run->add_flag("--json", as_json);

  CompareOptions cmp_o;
  auto* cmp = sim->add_subcommand("gauge-compare", "evolve one state under two gauges");
  add_grid_options(cmp, cmp_o.grid);
  cmp->add_option("--steps", cmp_o.steps)->capture_default_str();
  cmp->add_option("--init", cmp_o.init)->capture_default_str();
  cmp->add_option("--gauge-a", cmp_o.gauge_a)->capture_default_str();
  cmp->add_option("--gauge-b", cmp_o.gauge_b)->capture_default_str();
  cmp->add_flag("--json", as_json);

  EmbedOptions emb_o;
  auto* emb = sim->add_subcommand("embed-check", "conservation of the extended symplectic form");
  add_grid_options(emb, emb_o.grid);
  emb->add_option("--pairs", emb_o.pairs)->capture_default_str();
  emb->add_option("--steps", emb_o.steps)->capture_default_str();
  emb->add_option("--check-every", emb_o.check_every)->capture_default_str();
  emb->add_option("--seed", emb_o.seed)->capture_default_str();
  emb->add_flag("--json", as_json);

  ActionOptions act_o;
  auto* act = sim->add_subcommand("action-check", "discrete action stationarity under dt halving");
  add_grid_options(act, act_o.grid);
  act->add_option("--dt-halvings", act_o.halvings)->capture_default_str();
  act->add_option("--t-end", act_o.t_end)->capture_default_str();
  act->add_option("--init", act_o.init)->capture_default_str();
  act->add_option("--gauge", act_o.gauge)->capture_default_str();
  act->add_flag("--json", as_json);

  std::vector<std::string> owned = {"varinv"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : owned) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (varcheck->parsed()) return cmd_varcheck(file, as_json, out);
    if (el->parsed()) return cmd_el(file, as_json, out);
    if (tonti->parsed()) return cmd_tonti(file, verify, as_json, out);
    if (fode->parsed()) return cmd_fode(field_path, form_path, seed, as_json, out);
    if (sode->parsed()) return cmd_sode(field_path, form_path, as_json, out);
    if (run->parsed()) return cmd_sim_run(run_o, as_json, out);
    if (cmp->parsed()) return cmd_gauge_compare(cmp_o, as_json, out);
    if (emb->parsed()) return cmd_embed_check(emb_o, as_json, out);
    if (act->parsed()) return cmd_action_check(act_o, as_json, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInput;
  } catch (const field::ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kInput;
  } catch (const jet::DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kInput;
  } catch (const mech::ChartMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  err << "usage error: no command given\n";
  return kUsage;
}

}  // namespace varinv::cli
