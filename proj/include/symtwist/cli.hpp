#pragma once

// Command-line front end: configuration, curve registry, dispatch and CSV/JSON output.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "symtwist/charsum.hpp"
#include "symtwist/expsums.hpp"
#include "symtwist/padic_measure.hpp"

namespace symtwist {

inline constexpr const char* kVersion = "0.1.0";

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------- curve registry

struct RegisteredCurve {
  std::string name;
  std::array<i64, 5> a;
  std::string delta;  // decimal discriminant
  std::vector<std::pair<u64, ReductionKind>> bad;
};

inline const std::vector<RegisteredCurve>& curve_registry() {
  using K = ReductionKind;
  static const std::vector<RegisteredCurve> reg = {
      {"11a1", {0, -1, 1, -10, -20}, "-161051", {{11, K::SplitMultiplicative}}},
      {"14a1", {1, 0, 1, 4, -6}, "-21952", {{2, K::NonsplitMultiplicative}, {7, K::SplitMultiplicative}}},
      {"15a1", {1, 1, 1, -10, -10}, "50625", {{3, K::NonsplitMultiplicative}, {5, K::SplitMultiplicative}}},
      {"37b1", {0, 1, 1, -23, -50}, "50653", {{37, K::SplitMultiplicative}}},
  };
  return reg;
}

/// Names of registry entries whose discriminant or reduction types disagree with the
/// stored data (empty when all is well).
inline std::vector<std::string> verify_registry() {
  std::vector<std::string> bad;
  for (const auto& c : curve_registry()) {
    const EllipticCurve E(c.a);
    bool ok = to_string(E.discriminant()) == c.delta && E.bad_primes().size() == c.bad.size();
    for (const auto& [r, kind] : c.bad) ok = ok && reduction_type(E, r).kind == kind;
    if (!ok) bad.push_back(c.name);
  }
  return bad;
}

/// A registry name or a comma-separated coefficient list a1,a2,a3,a4,a6.
inline EllipticCurve parse_curve(const std::string& text) {
  for (const auto& c : curve_registry()) {
    if (c.name == text) return EllipticCurve(c.a);
  }
  std::array<i64, 5> a{};
  std::stringstream ss(text);
  std::string item;
  std::size_t k = 0;
  while (std::getline(ss, item, ',')) {
    if (k == 5) throw Error(Errc::InvalidInput, "curve needs exactly five coefficients");
    try {
      std::size_t used = 0;
      a[k] = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(Errc::InvalidInput, "cannot parse curve coefficient '" + item + "'");
    }
    ++k;
  }
  if (k != 5) throw Error(Errc::InvalidInput, "curve needs exactly five coefficients or a registry name");
  return EllipticCurve(a);
}

/// "3" or "2..5".
inline std::vector<unsigned> parse_a_range(const std::string& text) {
  auto to_u = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const long v = std::stol(s, &used);
      if (used != s.size() || v < 1 || v > 64) throw std::invalid_argument(s);
      return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      throw Error(Errc::InvalidInput, "a must be a positive integer or a range lo..hi, got '" + text + "'");
    }
  };
  const auto dots = text.find("..");
  std::vector<unsigned> out;
  if (dots == std::string::npos) {
    out.push_back(to_u(text));
    return out;
  }
  const unsigned lo = to_u(text.substr(0, dots)), hi = to_u(text.substr(dots + 2));
  if (lo > hi) throw Error(Errc::InvalidInput, "empty range of a");
  for (unsigned a = lo; a <= hi; ++a) out.push_back(a);
  return out;
}

// ---------------------------------------------------------------- reports

struct Report {
  std::vector<std::string> columns;
  std::vector<json> rows;  // objects keyed by column
  json meta = json::object();
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_cell(const json& v) {
  std::string s;
  if (v.is_null()) return "";
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_number_integer()) return std::to_string(v.get<i64>());
  if (v.is_number_unsigned()) return std::to_string(v.get<u64>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

inline std::string render_csv(const Report& rep) {
  std::string out;
  for (std::size_t i = 0; i < rep.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_cell(rep.columns[i]);
  }
  out += "\r\n";
  for (const auto& row : rep.rows) {
    for (std::size_t i = 0; i < rep.columns.size(); ++i) {
      if (i) out += ',';
      out += row.contains(rep.columns[i]) ? csv_cell(row[rep.columns[i]]) : "";
    }
    out += "\r\n";
  }
  return out;
}

inline std::string render_json(const Report& rep) {
  json doc = json::object();
  doc["meta"] = rep.meta;
  doc["rows"] = json::array();
  for (const auto& r : rep.rows) doc["rows"].push_back(r);
  return doc.dump(2) + "\n";
}

/// Writes the report to path, or to standard output when path is empty.
inline void emit_report(const Report& rep, const std::string& format, const std::string& path) {
  if (rep.rows.empty()) throw Error(Errc::InvalidInput, "nothing to report");
  std::string text;
  if (format == "csv") {
    text = render_csv(rep);
  } else if (format == "json") {
    text = render_json(rep);
  } else {
    throw Error(Errc::InvalidInput, "format must be csv or json");
  }
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::InvalidInput, "cannot open " + path + " for writing");
  f << text;
  if (!f) throw Error(Errc::InvalidInput, "write to " + path + " failed");
}

// ---------------------------------------------------------------- configuration

struct RunConfig {
  std::vector<std::string> command;  // e.g. {"charsum", "converge"}
  std::string curve = "11a1";
  std::string curve2;
  std::optional<i64> twist;
  u64 p = 3;
  std::string a = "2";
  i64 s = 1, r = 1;
  double beta = 1.0;
  int j = 2;
  unsigned n = 3;
  i64 z = 1;
  std::optional<u64> char_index;
  u64 l = 7;
  std::size_t max = 100;
  double s_re = 1.5, s_im = 0.0;
  bool check_l1 = false;
  bool tempered = false;
  std::string bump = "A";
  std::optional<double> t_max, h1, h2;
  std::string out;
  std::string format;
  unsigned threads = 1;

  std::string command_name() const {
    std::string s;
    for (const auto& c : command) s += (s.empty() ? "" : " ") + c;
    return s;
  }
};

inline json config_echo(const RunConfig& c) {
  json j = json::object();
  j["command"] = c.command_name();
  j["curve"] = c.curve;
  if (!c.curve2.empty()) j["curve2"] = c.curve2;
  if (c.twist) j["twist"] = *c.twist;
  j["p"] = c.p;
  j["a"] = c.a;
  j["s"] = c.s;
  j["r"] = c.r;
  j["s_re"] = c.s_re;
  j["s_im"] = c.s_im;
  j["beta"] = c.beta;
  j["j"] = c.j;
  j["n"] = c.n;
  j["z"] = c.z;
  j["l"] = c.l;
  j["max"] = c.max;
  if (c.char_index) j["char_index"] = *c.char_index;
  j["check_l1"] = c.check_l1;
  j["tempered"] = c.tempered;
  j["bump"] = c.bump;
  if (c.t_max) j["t_max"] = *c.t_max;
  if (c.h1) j["h1"] = *c.h1;
  if (c.h2) j["h2"] = *c.h2;
  j["threads"] = c.threads;
  return j;
}

inline BumpShape bump_shape(const std::string& id) {
  if (id == "A") return {1.0, 1.0};
  if (id == "B") return {1.25, 1.2};
  throw Error(Errc::InvalidInput, "bump must be A or B");
}

inline CutoffOptions cutoff_options(const RunConfig& c) {
  CutoffOptions o;
  if (c.t_max) o.t_max = *c.t_max;
  if (c.h1) o.h1 = *c.h1;
  if (c.h2) o.h2 = *c.h2;
  return o;
}

inline void require_odd_prime(u64 p) {
  if (p < 3 || !is_prime(p)) throw Error(Errc::InvalidInput, "p must be an odd prime");
}

/// Range checks shared by all commands.
inline void validate(const RunConfig& c) {
  const std::string cmd = c.command_name();
  const bool uses_p = cmd != "curve info" && cmd != "curve ap" && cmd != "symsq coeffs" && cmd != "symsq satake";
  if (uses_p) require_odd_prime(c.p);
  if (uses_p) {
    for (unsigned a : parse_a_range(c.a)) {
      if (a < 1) throw Error(Errc::InvalidInput, "a must be at least 1");
    }
  }
  const bool uses_beta = cmd == "lvalue" || cmd == "charsum converge" || cmd == "charsum nonvanish";
  if (uses_beta && !(c.beta >= 0.5 && c.beta <= 1.0)) {
    throw Error(Errc::InvalidInput, "beta must lie in [1/2, 1]");
  }
  if (cmd == "padic measure" || cmd == "padic ratio") {
    if (c.j != 1 && c.j != 2) throw Error(Errc::InvalidInput, "j must be 1 or 2");
  }
  if (c.threads == 0) throw Error(Errc::InvalidInput, "threads must be positive");
  (void)bump_shape(c.bump);
  if (!c.format.empty() && c.format != "csv" && c.format != "json") {
    throw Error(Errc::InvalidInput, "format must be csv or json");
  }
}

/// Parses argv into a config; returns nullopt and sets exit_code when parsing ends the run
/// (help requested, or an input error already reported on err).
inline std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, int& exit_code,
                                                   std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"Wild characters, Sym^2 L-values and p-adic interpolation data", "symtwist"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string a_text, p_text;
  auto common = [&](CLI::App* sc) {
    sc->add_option("--threads", cfg.threads, "worker threads");
    sc->add_option("--out", cfg.out, "output file (default: standard output)");
    sc->add_option("--format", cfg.format, "csv or json");
  };
  auto with_p = [&](CLI::App* sc) {
    sc->add_option("--p", cfg.p, "odd prime")->required();
    sc->add_option("--a", cfg.a, "exponent or range lo..hi");
  };
  auto with_curve = [&](CLI::App* sc) {
    sc->add_option("--curve", cfg.curve, "registry name or a1,a2,a3,a4,a6");
  };
  auto with_quad = [&](CLI::App* sc) {
    sc->add_option("--bump", cfg.bump, "test function shape A or B");
    sc->add_option("--t-max", cfg.t_max, "largest contour height");
    sc->add_option("--h1", cfg.h1, "step for the F1 contour");
    sc->add_option("--h2", cfg.h2, "step for the F2 contours");
  };

  auto* chars = app.add_subcommand("chars", "Dirichlet characters")->require_subcommand(1);
  auto* chars_list = chars->add_subcommand("list", "wild characters mod p^a with Gauss sums");
  with_p(chars_list);
  common(chars_list);

  auto* exps = app.add_subcommand("expsums", "exponential sums")->require_subcommand(1);
  auto* kl = exps->add_subcommand("kloosterman", "hyper-Kloosterman sum and its bound");
  kl->add_option("--n", cfg.n, "number of variables")->required();
  kl->add_option("--z", cfg.z, "parameter");
  with_p(kl);
  common(kl);
  auto* gp = exps->add_subcommand("gauss-power", "average of conj(chi(r)) tau(chi)^n");
  gp->add_option("--n", cfg.n, "power")->required();
  gp->add_option("--r", cfg.r, "unit r");
  gp->add_flag("--check-l1", cfg.check_l1, "also evaluate through Kloosterman sums");
  with_p(gp);
  common(gp);

  auto* curve = app.add_subcommand("curve", "elliptic curve data")->require_subcommand(1);
  auto* cinfo = curve->add_subcommand("info", "discriminant, conductor, reduction types");
  with_curve(cinfo);
  common(cinfo);
  auto* cap = curve->add_subcommand("ap", "traces of Frobenius");
  with_curve(cap);
  cap->add_option("--max", cfg.max, "largest prime");
  common(cap);

  auto* sym = app.add_subcommand("symsq", "symmetric square")->require_subcommand(1);
  auto* scoef = sym->add_subcommand("coeffs", "Dirichlet coefficients");
  with_curve(scoef);
  scoef->add_option("--max", cfg.max, "number of coefficients");
  common(scoef);
  auto* ssat = sym->add_subcommand("satake", "unitary Satake invariants at a good prime");
  with_curve(ssat);
  ssat->add_option("--l", cfg.l, "good prime")->required();
  common(ssat);

  auto* lv = app.add_subcommand("lvalue", "twisted Sym^2 L-value through the approximate functional equation");
  with_curve(lv);
  with_p(lv);
  lv->add_option("--char-index", cfg.char_index, "wild exponent u of the character");
  lv->add_option("--beta", cfg.beta, "unitary point in [1/2, 1]");
  with_quad(lv);
  common(lv);

  auto* fe = app.add_subcommand("fecheck", "functional equation residuals");
  with_curve(fe);
  with_p(fe);
  fe->add_option("--s", cfg.s_re, "real part of s");
  fe->add_option("--t", cfg.s_im, "imaginary part of s");
  fe->add_option("--char-index", cfg.char_index, "wild exponent u (default: all)");
  with_quad(fe);
  common(fe);

  auto* cs = app.add_subcommand("charsum", "character-sum averages")->require_subcommand(1);
  auto* conv = cs->add_subcommand("converge", "convergence table of the twisted average");
  with_curve(conv);
  with_p(conv);
  conv->add_option("--s", cfg.s, "numerator");
  conv->add_option("--r", cfg.r, "denominator");
  conv->add_option("--beta", cfg.beta, "unitary point in [1/2, 1]");
  with_quad(conv);
  common(conv);
  auto* nv = cs->add_subcommand("nonvanish", "nonvanishing scan");
  with_curve(nv);
  with_p(nv);
  nv->add_option("--beta", cfg.beta, "unitary point in [1/2, 1]");
  nv->add_flag("--tempered", cfg.tempered, "admit beta > 1/2");
  with_quad(nv);
  common(nv);

  auto* pa = app.add_subcommand("padic", "interpolation values of the adjoint measure")->require_subcommand(1);
  auto* pm = pa->add_subcommand("measure", "measure values with their normalization trail");
  with_curve(pm);
  with_p(pm);
  pm->add_option("--j", cfg.j, "critical point 1 or 2");
  pm->add_option("--char-index", cfg.char_index, "wild exponent u (default: all)");
  pm->add_option("--twist", cfg.twist, "use the quadratic twist by D");
  common(pm);
  auto* pr = pa->add_subcommand("ratio", "ratios of measure values between two curves");
  with_curve(pr);
  pr->add_option("--curve2", cfg.curve2, "second curve");
  pr->add_option("--twist", cfg.twist, "second curve is the twist of the first by D");
  with_p(pr);
  pr->add_option("--j", cfg.j, "critical point 1 or 2");
  common(pr);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    exit_code = app.exit(e, out, err);
    return std::nullopt;
  } catch (const CLI::CallForVersion& e) {
    exit_code = app.exit(e, out, err);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    exit_code = 1;
    return std::nullopt;
  }
  for (CLI::App* sc = &app; !sc->get_subcommands().empty();) {
    sc = sc->get_subcommands().front();
    cfg.command.push_back(sc->get_name());
  }
  return cfg;
}

// ---------------------------------------------------------------- commands

struct CommandResult {
  Report report;
  std::string default_format = "json";
  bool property_ok = true;
  std::string note;  // one-line summary for standard error
};

namespace detail {

inline json cjson(const cplx& z) { return json::array({z.real(), z.imag()}); }

inline json base_meta(const RunConfig& c) {
  json m = json::object();
  m["tool"] = "symtwist";
  m["version"] = kVersion;
  m["config"] = config_echo(c);
  return m;
}

inline unsigned single_a(const RunConfig& c) {
  const auto v = parse_a_range(c.a);
  if (v.size() != 1) throw Error(Errc::InvalidInput, "this command takes a single a");
  return v.front();
}

inline CommandResult run_chars_list(const RunConfig& c) {
  const PrimePower pp(c.p, single_a(c));
  const auto g = make_group(pp);
  CommandResult res;
  res.default_format = "csv";
  res.report.columns = {"u", "order", "conductor", "parity", "gauss_re", "gauss_im"};
  for (u64 u = 0; u < g->wild_order(); ++u) {
    const DirichletCharacter chi(g, u, 0);
    json row = {{"u", u}, {"order", chi.order()}, {"conductor", chi.conductor()}, {"parity", chi.parity()}};
    if (chi.is_primitive() || chi.is_trivial()) {
      const cplx t = chi.is_trivial() ? cplx{1.0, 0.0} : gauss_sum(chi);
      row["gauss_re"] = t.real();
      row["gauss_im"] = t.imag();
    }
    res.report.rows.push_back(row);
  }
  return res;
}

inline CommandResult run_kloosterman(const RunConfig& c) {
  const PrimePower pp(c.p, single_a(c));
  const auto k = hyper_kloosterman(c.n, c.z, pp);
  CommandResult res;
  res.report.columns = {"value_re", "value_im", "bound", "ratio", "case"};
  json row = {{"value_re", k.value.real()}, {"value_im", k.value.imag()}};
  row["bound"] = k.bound.applies ? json(k.bound.bound) : json(nullptr);
  row["ratio"] = k.bound.applies ? json(k.ratio()) : json(nullptr);
  row["case"] = k.bound.label;
  res.report.rows.push_back(row);
  res.property_ok = !k.bound.applies || k.ratio() <= 1.0 + 1e-12;
  return res;
}

inline CommandResult run_gauss_power(const RunConfig& c) {
  const PrimePower pp(c.p, single_a(c));
  const cplx A = gauss_power_sum(c.n, c.r, pp);
  const double bound = std::pow(static_cast<double>(pp.p), 0.5 + pp.a * (c.n + 1) / 2.0);
  CommandResult res;
  res.report.columns = {"value_re", "value_im", "bound", "ratio", "case"};
  json row = {{"value_re", A.real()}, {"value_im", A.imag()}, {"bound", bound},
              {"ratio", gauss_power_constant(A, c.n, pp)}, {"case", "direct"}};
  if (c.check_l1) {
    const cplx B = gauss_power_sum_via_l1(c.n, c.r, pp);
    const double rel = std::abs(A - B) / std::max(1.0, std::abs(A));
    row["l1_re"] = B.real();
    row["l1_im"] = B.imag();
    row["l1_rel_diff"] = rel;
    res.report.columns.insert(res.report.columns.end(), {"l1_re", "l1_im", "l1_rel_diff"});
    res.property_ok = rel < 1e-6;
  }
  res.report.rows.push_back(row);
  return res;
}

inline CommandResult run_curve_info(const RunConfig& c) {
  const auto E = parse_curve(c.curve);
  CommandResult res;
  res.report.columns = {"delta", "conductor", "reduction"};
  json red = json::array();
  for (u64 r : E.bad_primes()) {
    const auto info = reduction_info(E, r);
    red.push_back({{"r", r}, {"kind", reduction_name(info.kind)}, {"a_r", info.a_r}});
  }
  const auto rep = conductor_report(E);
  json row = {{"delta", to_string(E.discriminant())}};
  row["conductor"] = rep.additive_primes.empty() ? json(semistable_conductor(E)) : json(nullptr);
  row["reduction"] = red;
  res.report.rows.push_back(row);
  const auto bad = verify_registry();
  res.property_ok = bad.empty();
  if (!bad.empty()) res.note = "registry mismatch for " + bad.front();
  return res;
}

inline CommandResult run_curve_ap(const RunConfig& c) {
  const auto E = parse_curve(c.curve);
  CommandResult res;
  res.default_format = "csv";
  res.report.columns = {"r", "a_r", "kind"};
  for (u64 r = 2; r <= c.max; ++r) {
    if (!is_prime(r)) continue;
    const auto info = reduction_info(E, r);
    res.report.rows.push_back({{"r", r}, {"a_r", info.a_r}, {"kind", reduction_name(info.kind)}});
  }
  return res;
}

inline CommandResult run_symsq_coeffs(const RunConfig& c) {
  const auto E = parse_curve(c.curve);
  const auto b = symsq_coefficients(E, c.max);
  CommandResult res;
  res.default_format = "csv";
  res.report.columns = {"m", "b_m", "a_pi_m"};
  for (std::size_t m = 1; m <= c.max; ++m) {
    res.report.rows.push_back({{"m", m}, {"b_m", b[m]}, {"a_pi_m", static_cast<double>(b[m]) / static_cast<double>(m)}});
  }
  return res;
}

inline CommandResult run_symsq_satake(const RunConfig& c) {
  const auto E = parse_curve(c.curve);
  const auto t = satake_invariants(E, c.l);
  CommandResult res;
  res.report.columns = {"l", "e1_re", "e1_im", "e2_re", "e2_im", "e3_re", "e3_im"};
  res.report.rows.push_back({{"l", c.l}, {"e1_re", t.e1.real()}, {"e1_im", t.e1.imag()}, {"e2_re", t.e2.real()},
                             {"e2_im", t.e2.imag()}, {"e3_re", t.e3.real()}, {"e3_im", t.e3.imag()}});
  // e1 = e2 and |e3| = 1 for unitary parameters {a, 1, 1/a}.
  res.property_ok = std::abs(t.e1 - t.e2) < 1e-9 && std::abs(std::abs(t.e3) - 1.0) < 1e-9;
  return res;
}

inline std::shared_ptr<const TestFunction> test_function(const RunConfig& c) {
  return std::make_shared<const TestFunction>(bump_shape(c.bump));
}

inline std::vector<DirichletCharacter> selected_characters(const RunConfig& c, const std::shared_ptr<const CharacterGroup>& g) {
  auto all = enumerate_wild_primitive(g);
  if (all.empty()) throw Error(Errc::EmptyCharacterSet, "no primitive wild characters of this conductor");
  if (!c.char_index) return all;
  for (const auto& chi : all) {
    if (chi.wild_exponent() == *c.char_index) return {chi};
  }
  throw Error(Errc::InvalidInput, "char-index must be a wild exponent prime to p below p^(a-1)");
}

inline CommandResult run_lvalue(const RunConfig& c) {
  const auto E = parse_curve(c.curve);
  const unsigned a = single_a(c);
  const double spread = std::pow(static_cast<double>(c.p), 1.5);
  const auto st = prepare_symsq(E, c.p, a, c.beta, test_function(c), spread, cutoff_options(c));
  const auto g = make_group(PrimePower(c.p, a));
  CommandResult res;
  res.report.columns = {"u", "re", "im", "q", "terms_used", "y", "residual_checks"};
  for (const auto& chi : selected_characters(c, g)) {
    const auto r1 = l_value_afe(st.spec, *st.cut, &chi);
    const auto r2 = l_value_afe(st.spec, *st.cut, &chi, r1.y / spread);
    const double rel = std::abs(r1.value - r2.value) / std::abs(r1.value);
    json checks = {{"y_change_factor", spread}, {"y_change_rel_diff", rel}, {"root_number_re", r1.eta.real()},
                   {"root_number_im", r1.eta.imag()}};
    res.report.rows.push_back({{"u", chi.wild_exponent()}, {"re", r1.value.real()}, {"im", r1.value.imag()},
                               {"q", g->modulus().q}, {"terms_used", r1.terms_used}, {"y", r1.y},
                               {"residual_checks", checks}});
    res.property_ok = res.property_ok && rel < 1e-6;
  }
  return res;
}

inline CommandResult run_fecheck(const RunConfig& c) {
  const auto E = parse_curve(c.curve);
  const unsigned a = single_a(c);
  const auto tf = test_function(c);
  const auto opt = cutoff_options(c);
  const cplx s(c.s_re, c.s_im);
  // Enough coefficients for beta = s - 1 and 2 - s at the dual y used by the check.
  const SmoothedCutoffs c1(tf, {-1.0, -1.0, -2.0}, s - 1.0, opt);
  const SmoothedCutoffs c2(tf, {-1.0, -1.0, -2.0}, 2.0 - s, opt);
  const u64 C = symsq_conductor(E);
  const std::size_t M = std::max(coefficients_needed(C, 3, c1, c.p, a, 1.0), coefficients_needed(C, 3, c2, c.p, a, 1.37));
  const SmoothedCutoffs half(tf, {-1.0, -1.0, -2.0}, cplx(1.0, 0.0), opt);
  const std::size_t M0 = afe_terms_needed(half, static_cast<double>(C), 3.0 * balanced_y(half, C));
  LSpec spec = symsq_spec_for(E, std::max(M, M0), half);
  const auto g = make_group(PrimePower(c.p, a));
  CommandResult res;
  res.report.columns = {"u", "s_re", "s_im", "residual", "W_re", "W_im", "lambda_re", "lambda_im"};
  const auto chars = selected_characters(c, g);
  const auto checks = completed_lambda_and_fe(spec, tf, chars, s, opt);
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const auto& chi = chars[i];
    const auto& fe = checks[i];
    res.report.rows.push_back({{"u", chi.wild_exponent()}, {"s_re", s.real()}, {"s_im", s.imag()},
                               {"residual", fe.residual}, {"W_re", fe.W.real()}, {"W_im", fe.W.imag()},
                               {"lambda_re", fe.lambda_s.real()}, {"lambda_im", fe.lambda_s.imag()}});
    res.property_ok = res.property_ok && fe.residual < 1e-5;
  }
  return res;
}

inline CommandResult run_converge(const RunConfig& c) {
  const auto E = parse_curve(c.curve);
  const auto as = parse_a_range(c.a);
  const auto st = prepare_symsq(E, c.p, *std::max_element(as.begin(), as.end()), c.beta, test_function(c), 1.0,
                                cutoff_options(c));
  const auto t = convergence_table(st.spec, *st.cut, c.p, as, c.s, c.r);
  CommandResult res;
  res.default_format = "csv";
  res.report.columns = {"a", "num_chars", "S_re", "S_im", "limit_re", "abs_err", "seconds"};
  for (const auto& row : t.rows) {
    res.report.rows.push_back({{"a", row.a}, {"num_chars", row.num_chars}, {"S_re", row.value.real()},
                               {"S_im", row.value.imag()}, {"limit_re", row.limit.real()},
                               {"abs_err", row.abs_error}, {"seconds", row.seconds}});
  }
  res.property_ok = t.rows.size() < 2 || t.final_below_initial;
  res.note = std::string("error ") + (t.strictly_decreasing ? "strictly decreasing" : "not monotone");
  return res;
}

inline CommandResult run_nonvanish(const RunConfig& c) {
  const auto E = parse_curve(c.curve);
  const auto as = parse_a_range(c.a);
  const auto st = prepare_symsq(E, c.p, *std::max_element(as.begin(), as.end()), c.beta, test_function(c), 1.0,
                                cutoff_options(c));
  const auto rows = nonvanishing_scan(st.spec, *st.cut, c.p, as, c.tempered);
  CommandResult res;
  res.default_format = "csv";
  res.report.columns = {"a", "total", "nonvanishing", "vanishing", "min_abs"};
  for (const auto& r : rows) {
    res.report.rows.push_back({{"a", r.a}, {"total", r.total}, {"nonvanishing", r.nonvanishing},
                               {"vanishing", r.vanishing}, {"min_abs", r.min_abs}});
    res.property_ok = res.property_ok && r.vanishing == 0;
  }
  return res;
}

inline CommandResult run_measure(const RunConfig& c) {
  const auto E = parse_curve(c.curve);
  const unsigned a = single_a(c);
  MeasureContext ctx = c.twist ? MeasureContext::for_twist(E, *c.twist, c.p, a) : MeasureContext::for_curve(E, c.p, a);
  CommandResult res;
  res.report.columns = {"u", "m_chi", "j", "value_re", "value_im", "trail"};
  res.report.meta["curve"] = ctx.label();
  res.report.meta["reduction_at_p"] = reduction_name(ctx.kind());
  res.report.meta["alpha_choice"] = "(a_p + i sqrt(4p - a_p^2)) / 2, positive imaginary part";
  for (const auto& chi : selected_characters(c, ctx.group(a))) {
    const auto v = ctx.value(chi, c.j);
    const auto& t = v.trail;
    json trail = {{"alpha", cjson(t.alpha)},       {"alpha_factor", cjson(t.alpha_factor)},
                  {"tau_factor", cjson(t.tau_factor)}, {"p_power", t.p_power},
                  {"l_value", cjson(t.l_value)},   {"period", cjson(t.period)},
                  {"root_number", cjson(t.eta)},   {"forced_zero", v.forced_zero}};
    res.report.rows.push_back({{"u", v.u}, {"m_chi", v.m_chi}, {"j", v.j}, {"value_re", v.value.real()},
                               {"value_im", v.value.imag()}, {"trail", trail}});
    res.property_ok = res.property_ok && (v.forced_zero || recombine(t) == v.value);
  }
  return res;
}

inline CommandResult run_ratio(const RunConfig& c) {
  const auto E = parse_curve(c.curve);
  const auto as = parse_a_range(c.a);
  const unsigned a_max = *std::max_element(as.begin(), as.end());
  if (c.curve2.empty() == !c.twist) throw Error(Errc::InvalidInput, "give exactly one of --curve2 and --twist");
  MeasureContext A = MeasureContext::for_curve(E, c.p, a_max);
  MeasureContext B = c.twist ? MeasureContext::for_twist(E, *c.twist, c.p, a_max)
                             : MeasureContext::for_curve(parse_curve(c.curve2), c.p, a_max);
  const auto rep = interpolation_ratio_experiment(A, B, as, c.j);
  CommandResult res;
  res.default_format = "csv";
  res.report.columns = {"a", "u", "ratio_re", "ratio_im"};
  for (const auto& r : rep.rows) {
    json row = {{"a", r.a}, {"u", r.u}};
    if (!r.skipped) {
      row["ratio_re"] = r.ratio.real();
      row["ratio_im"] = r.ratio.imag();
    }
    res.report.rows.push_back(row);
  }
  std::ostringstream note;
  note << "B^m C fit " << (rep.fit_ok() ? "holds" : "fails") << " (chi spread ";
  double spread = 0.0;
  for (double s : rep.chi_spread) spread = std::max(spread, s);
  note << spread << ", B spread " << rep.b_spread << ")";
  res.note = note.str();
  return res;
}

}  // namespace detail

/// Runs a parsed config. Exit status: 0 success, 1 input error, 2 property violated.
inline int dispatch(const RunConfig& cfg, std::ostream& err = std::cerr) {
  try {
    validate(cfg);
    set_worker_threads(cfg.threads);
    const std::string cmd = cfg.command_name();
    CommandResult res;
    if (cmd == "chars list") res = detail::run_chars_list(cfg);
    else if (cmd == "expsums kloosterman") res = detail::run_kloosterman(cfg);
    else if (cmd == "expsums gauss-power") res = detail::run_gauss_power(cfg);
    else if (cmd == "curve info") res = detail::run_curve_info(cfg);
    else if (cmd == "curve ap") res = detail::run_curve_ap(cfg);
    else if (cmd == "symsq coeffs") res = detail::run_symsq_coeffs(cfg);
    else if (cmd == "symsq satake") res = detail::run_symsq_satake(cfg);
    else if (cmd == "lvalue") res = detail::run_lvalue(cfg);
    else if (cmd == "fecheck") res = detail::run_fecheck(cfg);
    else if (cmd == "charsum converge") res = detail::run_converge(cfg);
    else if (cmd == "charsum nonvanish") res = detail::run_nonvanish(cfg);
    else if (cmd == "padic measure") res = detail::run_measure(cfg);
    else if (cmd == "padic ratio") res = detail::run_ratio(cfg);
    else throw Error(Errc::InvalidInput, "unknown command '" + cmd + "'");

    json meta = detail::base_meta(cfg);
    for (auto it = res.report.meta.begin(); it != res.report.meta.end(); ++it) meta[it.key()] = it.value();
    meta["generated_at"] = static_cast<i64>(std::time(nullptr));
    res.report.meta = meta;
    emit_report(res.report, cfg.format.empty() ? res.default_format : cfg.format, cfg.out);
    if (!res.note.empty()) err << res.note << "\n";
    if (!res.property_ok) {
      err << "property check failed for " << cmd << "\n";
      return 2;
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  int code = 0;
  const auto cfg = parse_command_line(argc, argv, code, out, err);
  if (!cfg) return code;
  return dispatch(*cfg, err);
}

}  // namespace symtwist
