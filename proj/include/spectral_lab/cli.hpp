#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "spectral_lab/complex_experiments.hpp"
#include "spectral_lab/errors.hpp"
#include "spectral_lab/lp_operators.hpp"
#include "spectral_lab/majorization.hpp"
#include "spectral_lab/pencils.hpp"
#include "spectral_lab/polynomial.hpp"
#include "spectral_lab/roots.hpp"

namespace spectral_lab::cli {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kPencilCsvHeader = "# spectral_lab pencil-scan csv v1";

enum class Command { Roots, Compare, DsMatrix, PencilScan, OrbitCheck, LocalMin, UnitRootTwist, HyperbolicTwist, ConjectureScan };
enum class Format { Json, Csv };

inline const char* to_string(Command c) {
  switch (c) {
    case Command::Roots: return "roots";
    case Command::Compare: return "compare";
    case Command::DsMatrix: return "ds-matrix";
    case Command::PencilScan: return "pencil-scan";
    case Command::OrbitCheck: return "orbit-check";
    case Command::LocalMin: return "local-min";
    case Command::UnitRootTwist: return "prop41";
    case Command::HyperbolicTwist: return "prop42";
    case Command::ConjectureScan: return "conjecture-scan";
  }
  return "?";
}

/// Parsed command line. Polynomial and point inputs are sources: a file path,
/// "-" for stdin, or inline JSON.
struct RunConfig {
  Command command = Command::Roots;
  Format format = Format::Json;

  double tol = 1e-9;
  double conv_tol = 1e-7;
  std::uint64_t seed = 0;

  std::string poly;  // roots, orbit-check, pencil-scan / local-min (P)
  std::string q;     // pencil-scan / local-min (Q)
  std::string p2;    // pencil-scan / local-min: second endpoint instead of Q
  std::string x, y;  // compare, ds-matrix
  std::string op = "a=0;b=0;alphas=";

  std::size_t grid_points = 41;
  std::optional<double> lambda_max;
  double lambda0 = 0;
  std::optional<double> eps;
  std::size_t samples = 21;

  std::size_t n = 5;
  double lam_mod = 0.05;
  double lam_arg = std::numbers::pi / 7;
  double theta = std::numbers::pi / 3;
  double r = 0.02;
  std::size_t steps = 32;

  std::size_t trials = 10000;
  std::size_t deg_min = 2, deg_max = 8;
  std::string counterexample_out;
};

struct RunResult {
  int exit_code = 0;
  std::string output;
};

/// Input error tied to a JSON pointer into the offending document.
class InputError : public ArgumentError {
 public:
  InputError(const std::string& what, std::string pointer) : ArgumentError(what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

namespace detail {

inline std::string read_source(const std::string& src, std::istream& in, const std::string& flag) {
  if (src.empty()) throw InputError("missing input " + flag, "");
  if (src == "-") return std::string(std::istreambuf_iterator<char>(in), {});
  const auto first = src.find_first_not_of(" \t\n");
  if (first != std::string::npos && (src[first] == '{' || src[first] == '[')) return src;
  std::ifstream f(src);
  if (!f) throw InputError("cannot open " + flag + " file '" + src + "'", "");
  return std::string(std::istreambuf_iterator<char>(f), {});
}

inline json parse_json(const std::string& text, const std::string& flag) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(flag + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what(), "");
  }
}

inline double number_at(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw InputError("expected a number", ptr);
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError("expected a finite number", ptr);
  return v;
}

inline std::vector<double> number_array(const json& j, const std::string& ptr) {
  if (!j.is_array()) throw InputError("expected an array of numbers", ptr);
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number_at(j[i], ptr + "/" + std::to_string(i)));
  return v;
}

/// {"coeffs": [c0, c1, ...]} in ascending degree, or {"roots": [...]}. The
/// result is scaled to be monic.
inline MonicPoly parse_poly(const json& j) {
  if (!j.is_object()) throw InputError("polynomial must be an object with 'coeffs' or 'roots'", "");
  if (j.contains("coeffs")) {
    auto c = number_array(j["coeffs"], "/coeffs");
    RealPoly p(std::move(c));
    if (p.is_zero()) throw InputError("zero polynomial", "/coeffs");
    if (p.degree() == 0) throw InputError("polynomial must have positive degree", "/coeffs");
    return MonicPoly::normalized(p);
  }
  if (j.contains("roots")) {
    auto r = number_array(j["roots"], "/roots");
    if (r.empty()) throw InputError("need at least one root", "/roots");
    return from_roots(std::move(r)).poly();
  }
  throw InputError("polynomial needs 'coeffs' or 'roots'", "");
}

inline RealPoly parse_real_poly(const json& j) {
  if (!j.is_object() || !j.contains("coeffs")) throw InputError("polynomial needs 'coeffs'", "");
  RealPoly p(number_array(j["coeffs"], "/coeffs"));
  return p;
}

/// Array of reals (dimension 1) or array of equal-length coordinate arrays.
inline PointSet parse_points(const json& j) {
  if (!j.is_array() || j.empty()) throw InputError("expected a nonempty array of points", "");
  if (j[0].is_number()) return PointSet::from_reals(number_array(j, ""));
  std::size_t dim = 0;
  std::vector<double> coords;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string ptr = "/" + std::to_string(i);
    auto p = number_array(j[i], ptr);
    if (i == 0) dim = p.size();
    if (p.empty() || p.size() != dim) throw InputError("points must share a positive dimension", ptr);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return PointSet(dim, std::move(coords));
}

inline json poly_json(const Polynomial<double>& p) { return json{{"coeffs", p.coeffs()}}; }

inline json complex_list(const std::vector<std::complex<double>>& z) {
  json a = json::array();
  for (auto v : z) a.push_back({v.real(), v.imag()});
  return a;
}

inline json verdict_json(const MajorizationVerdict& v) {
  json j{{"relation", to_string(v.relation)}};
  json w = json::object();
  if (v.partial_sum_slack) w["partial_sum_slack"] = *v.partial_sum_slack;
  if (v.transport) {
    const auto& t = *v.transport;
    json rows = json::array();
    for (std::size_t i = 0; i < t.n(); ++i) {
      json row = json::array();
      for (std::size_t k = 0; k < t.n(); ++k) row.push_back(t(i, k));
      rows.push_back(row);
    }
    w["transport"] = rows;
  }
  auto vc = [](const ViolatedConstraint& c) {
    return json{{"kind", to_string(c.kind)}, {"index", c.index}, {"amount", c.amount}};
  };
  if (v.forward_violation) w["forward_violation"] = vc(*v.forward_violation);
  if (v.backward_violation) w["backward_violation"] = vc(*v.backward_violation);
  j["witness"] = w;
  return j;
}

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline PencilBasis basis_from(const RunConfig& cfg, std::istream& in) {
  const MonicPoly p = parse_poly(parse_json(read_source(cfg.poly, in, "--poly"), "--poly"));
  if (!cfg.q.empty()) {
    RealPoly q = parse_real_poly(parse_json(read_source(cfg.q, in, "--q"), "--q"));
    return PencilBasis(p, std::move(q));
  }
  if (!cfg.p2.empty()) return make_basis(p, parse_poly(parse_json(read_source(cfg.p2, in, "--p2"), "--p2")));
  return ld_basis(p);
}

inline json report_json(const HyperbolicityReport& r) {
  json j{{"cond_iii", r.cond_iii},
         {"cond_iv", r.cond_iv},
         {"cond_v", r.cond_v},
         {"half_plane_p_plus_i_r", to_string(r.half_plane_pr)},
         {"half_plane_p_plus_i_q", to_string(r.half_plane_pq)},
         {"sampled_i", r.sampled_i},
         {"samples", r.samples},
         {"conditions_agree", r.conditions_agree},
         {"consensus", r.consensus}};
  j["failing_lambda"] = r.failing_lambda ? json(*r.failing_lambda) : json(nullptr);
  return j;
}

inline RunResult cmd_roots(const RunConfig& cfg, std::istream& in, json& out) {
  const MonicPoly p = parse_poly(parse_json(read_source(cfg.poly, in, "--poly"), "--poly"));
  out["polynomial"] = poly_json(p.poly());
  const auto res = real_roots_certified(p);
  if (const auto* h = std::get_if<HyperbolicPoly>(&res)) {
    out["hyperbolic"] = true;
    out["certificate"] = to_string(h->certificate());
    out["roots"] = h->roots().values();
  } else {
    out["hyperbolic"] = false;
    out["real_root_count"] = std::get<NotHyperbolic>(res).real_root_count;
    out["complex_roots"] = complex_list(complex_roots(to_complex(p)).values());
  }
  return {0, {}};
}

inline RunResult cmd_compare(const RunConfig& cfg, std::istream& in, json& out) {
  const auto x = parse_points(parse_json(read_source(cfg.x, in, "--x"), "--x"));
  const auto y = parse_points(parse_json(read_source(cfg.y, in, "--y"), "--y"));
  if (x.size() != y.size() || x.dim() != y.dim()) throw InputError("--x and --y differ in size or dimension", "");
  if (x.dim() == 1) {
    out["verdict"] = verdict_json(hlp_compare(x.coords(), y.coords(), cfg.tol));
  } else {
    const bool fwd = ds_feasibility(x, y, cfg.tol).has_value();
    const bool bwd = ds_feasibility(y, x, cfg.tol).has_value();
    out["verdict"] = json{{"relation", to_string(spectral_lab::detail::relation_from(fwd, bwd))},
                          {"witness", json{{"forward_feasible", fwd}, {"backward_feasible", bwd}}}};
  }
  return {0, {}};
}

inline RunResult cmd_ds_matrix(const RunConfig& cfg, std::istream& in, json& out) {
  const auto x = parse_points(parse_json(read_source(cfg.x, in, "--x"), "--x"));
  const auto y = parse_points(parse_json(read_source(cfg.y, in, "--y"), "--y"));
  if (x.size() != y.size() || x.dim() != y.dim()) throw InputError("--x and --y differ in size or dimension", "");
  const auto a = ds_feasibility(x, y, cfg.tol);
  out["feasible"] = a.has_value();
  if (a) {
    json rows = json::array();
    for (std::size_t i = 0; i < a->n(); ++i) {
      json row = json::array();
      for (std::size_t k = 0; k < a->n(); ++k) row.push_back((*a)(i, k));
      rows.push_back(row);
    }
    out["matrix"] = rows;
    out["transport_residual"] = a->transport_residual(x, y);
  }
  return {0, {}};
}

inline RunResult cmd_pencil_scan(const RunConfig& cfg, std::istream& in, json& out) {
  const PencilBasis b = basis_from(cfg, in);
  PencilScanOptions popt;
  popt.grid_points = cfg.grid_points;
  popt.lambda_max = cfg.lambda_max;
  const auto hr = pencil_hyperbolicity(b, popt);
  out["basis"] = json{{"p", poly_json(b.p().poly())}, {"q", poly_json(b.q())},
                      {"param_scale", b.param_scale()}, {"note", b.note()}};
  out["hyperbolicity"] = report_json(hr);

  const double lmax = cfg.lambda_max ? *cfg.lambda_max : 1 + span(require_hyperbolic(b.p()));
  const auto grid = spectral_lab::detail::uniform_grid(-lmax, lmax, cfg.grid_points);
  std::vector<double> lambdas;
  std::vector<std::vector<double>> roots;
  for (double lam : grid) {
    auto rr = real_roots_certified(b.member(lam));
    if (auto* h = std::get_if<HyperbolicPoly>(&rr)) {
      lambdas.push_back(lam);
      roots.push_back(h->roots().values());
    } else if (b.q_normalized()) {
      throw NotHyperbolicError("pencil member not hyperbolic", lam);
    }
  }
  std::vector<std::optional<double>> d2(lambdas.size());
  for (std::size_t i = 1; i + 1 < lambdas.size(); ++i)
    d2[i] = spectral_lab::detail::second_difference(lambdas[i - 1], roots[i - 1].back(), lambdas[i],
                                                    roots[i].back(), lambdas[i + 1], roots[i + 1].back());
  const auto conv = garding_scan(b, lambdas, cfg.conv_tol);
  out["garding"] = json{{"min_second_difference", conv.min_second_difference}, {"is_convex", conv.is_convex},
                        {"excluded_lambdas", conv.excluded_lambdas}};
  int code = hr.consensus && !conv.is_convex ? 2 : 0;

  if (cfg.format == Format::Csv) {
    std::ostringstream os;
    os << kPencilCsvHeader << "\n";
    os << "lambda";
    for (std::size_t i = 1; i <= b.degree(); ++i) os << ",root_" << i;
    os << ",max_root,span,second_diff_max_root\n";
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      os << fmt17(lambdas[k]);
      for (double v : roots[k]) os << "," << fmt17(v);
      os << "," << fmt17(roots[k].back()) << "," << fmt17(roots[k].back() - roots[k].front()) << ",";
      if (d2[k]) os << fmt17(*d2[k]);
      os << "\n";
    }
    return {code, os.str()};
  }
  json rows = json::array();
  for (std::size_t k = 0; k < lambdas.size(); ++k)
    rows.push_back(json{{"lambda", lambdas[k]},
                        {"roots", roots[k]},
                        {"max_root", roots[k].back()},
                        {"span", roots[k].back() - roots[k].front()},
                        {"second_diff_max_root", d2[k] ? json(*d2[k]) : json(nullptr)}});
  out["rows"] = rows;
  return {code, {}};
}

inline RunResult cmd_orbit_check(const RunConfig& cfg, std::istream& in, json& out) {
  const MonicPoly p = parse_poly(parse_json(read_source(cfg.poly, in, "--poly"), "--poly"));
  const LPOperator t = LPOperator::parse(cfg.op);
  if (!is_in_A_prime(t)) throw InputError("orbit-check needs b = 0", "");
  const auto h = require_hyperbolic(p);
  const auto v = verify_orbit(h, t, cfg.tol);
  const auto g = geometry_checks(h, t, 32, cfg.seed, cfg.tol);
  const MonicPoly tp = apply(t, p);
  out["operator"] = t.to_string();
  out["input"] = poly_json(p.poly());
  out["image"] = poly_json(tp.poly());
  out["image_roots"] = require_hyperbolic(tp).roots().values();
  out["verdict"] = verdict_json(v);
  out["geometry"] = json{{"min_drop", g.min_drop},
                         {"max_rise", g.max_rise},
                         {"span_growth", g.span_growth},
                         {"schur_violations", g.schur_violations},
                         {"probes", g.probes}};
  const double t0 = cfg.tol * (1 + span(h));
  const bool ok = less_or_equal(v.relation) && g.min_drop >= -t0 && g.max_rise >= -t0 && g.span_growth >= -t0 &&
                  g.schur_violations == 0;
  out["contract_holds"] = ok;
  return {ok ? 0 : 2, {}};
}

inline RunResult cmd_local_min(const RunConfig& cfg, std::istream& in, json& out) {
  const PencilBasis b = basis_from(cfg, in);
  const bool ld = ld_detect(b);
  const auto rep = local_min_scan(b, cfg.lambda0, cfg.eps, cfg.samples, cfg.tol);
  out["ld_pencil"] = ld;
  out["verdict"] = rep.local_min ? "LocalMin" : "NotLocalMin";
  out["epsilon"] = rep.epsilon;
  out["samples_per_side"] = rep.samples_per_side;
  out["witness_lambda"] = rep.witness_lambda ? json(*rep.witness_lambda) : json(nullptr);
  if (rep.witness_lambda) out["witness_relation"] = to_string(rep.witness_relation);
  out["note"] = "NotLocalMin is evidence at this epsilon only";
  return {ld && !rep.local_min ? 2 : 0, {}};
}

inline RunResult cmd_unit_root_twist(const RunConfig& cfg, std::istream&, json& out) {
  const auto lam = std::polar(cfg.lam_mod, cfg.lam_arg);
  const auto rep = reproduce_prop_counter1(cfg.n, lam, cfg.steps, cfg.tol);
  const auto fit = counter1_exponent_fit(cfg.n, cfg.lam_arg, {0.04, 0.02, 0.01}, cfg.steps);
  out["n"] = rep.n;
  out["lambda"] = {lam.real(), lam.imag()};
  out["twisted_roots"] = complex_list(rep.twisted);
  out["moduli"] = rep.moduli;
  out["predicted_moduli"] = rep.predicted_moduli;
  out["k1"] = rep.k1;
  out["k2"] = rep.k2;
  out["forward_feasible"] = rep.forward_feasible;
  out["backward_feasible"] = rep.backward_feasible;
  out["relation"] = to_string(rep.relation);
  out["root_expansion_residual"] = rep.root_expansion_residual;
  out["modulus_expansion_residual"] = rep.modulus_expansion_residual;
  out["exponent_fit"] = json{{"moduli", fit.moduli},
                             {"root_residuals", fit.root_residuals},
                             {"modulus_residuals", fit.modulus_residuals},
                             {"root_exponent", fit.root_exponent},
                             {"modulus_exponent", fit.modulus_exponent}};
  return {rep.relation == Relation::Incomparable ? 0 : 2, {}};
}

inline RunResult cmd_hyperbolic_twist(const RunConfig& cfg, std::istream&, json& out) {
  const auto rep = reproduce_prop_counter2(cfg.n, cfg.theta, cfg.r, cfg.seed, std::nullopt, cfg.tol);
  out["n"] = rep.n;
  out["theta"] = rep.theta;
  out["r"] = rep.r;
  out["lambda"] = {rep.lambda.real(), rep.lambda.imag()};
  out["axis_case"] = rep.axis_case;
  out["base_roots"] = rep.base_roots;
  out["twisted_roots"] = complex_list(rep.twisted);
  if (rep.axis_case) {
    out["top_real_part"] = rep.top_real_part;
    out["predicted_deviation"] = rep.predicted_deviation;
    out["deviation_relative_error"] = rep.deviation_relative_error;
    out["residual_at_minus_lambda"] = rep.residual_at_minus_lambda;
  } else {
    out["a"] = rep.a;
    out["f_plus"] = rep.f_plus;
    out["f_minus"] = rep.f_minus;
    out["predicted_plus"] = rep.predicted_plus;
    out["predicted_minus"] = rep.predicted_minus;
    out["sign_product_negative"] = rep.sign_product_negative;
    out["probe_refutes_forward"] = rep.probe_refutes_forward;
    out["probe_refutes_backward"] = rep.probe_refutes_backward;
  }
  out["forward_feasible"] = rep.forward_feasible;
  out["backward_feasible"] = rep.backward_feasible;
  out["relation"] = to_string(rep.relation);
  return {0, {}};
}

inline json counterexample_json(const CounterexampleRecord& c) {
  return json{{"trial", c.trial},
              {"seed", c.seed},
              {"roots", complex_list(c.roots)},
              {"coeff_bits", c.coeff_bits},
              {"operator", c.op},
              {"re_relation", to_string(c.re_relation)},
              {"im_relation", to_string(c.im_relation)}};
}

inline RunResult cmd_conjecture_scan(const RunConfig& cfg, std::istream&, json& out) {
  ConjectureOptions opt;
  opt.trials = cfg.trials;
  opt.deg_min = cfg.deg_min;
  opt.deg_max = cfg.deg_max;
  opt.seed = cfg.seed;
  opt.tol = cfg.tol;
  const auto rep = conjecture_scan(opt);
  out["trials"] = rep.trials;
  out["checked"] = rep.checked;
  out["skipped"] = rep.skipped;
  out["equal_re"] = rep.equal_re;
  out["equal_im"] = rep.equal_im;
  json ce = json::array();
  for (const auto& c : rep.counterexamples) ce.push_back(counterexample_json(c));
  out["counterexample_count"] = rep.counterexamples.size();
  out["counterexamples"] = ce;
  out["skip_log"] = rep.skip_log;
  if (!cfg.counterexample_out.empty()) {
    std::ofstream f(cfg.counterexample_out);
    if (!f) throw InputError("cannot write counterexample file '" + cfg.counterexample_out + "'", "");
    f << json{{"schema_version", kSchemaVersion}, {"counterexamples", ce}}.dump(2) << "\n";
  }
  return {0, {}};
}

inline void validate(const RunConfig& cfg) {
  if (!(cfg.tol > 0) || !(cfg.conv_tol > 0)) throw InputError("tolerances must be positive", "");
  if (cfg.grid_points < 3) throw InputError("grid needs at least 3 points", "");
  if (cfg.samples == 0 || cfg.steps == 0) throw InputError("sample and step counts must be positive", "");
  if (cfg.lambda_max && !(*cfg.lambda_max > 0)) throw InputError("lambda-max must be positive", "");
  if (cfg.eps && !(*cfg.eps > 0)) throw InputError("eps must be positive", "");
  if (cfg.format == Format::Csv && cfg.command != Command::PencilScan)
    throw InputError("csv output is only available for pencil-scan", "");
}

}  // namespace detail

/// Runs one command. Exit codes: 0 verdict consistent with the theory, 1 input
/// error, 2 contract violation or numerical alarm. The report is produced in
/// every case.
inline RunResult run(const RunConfig& cfg, std::istream& in = std::cin) {
  json out{{"schema_version", kSchemaVersion}, {"command", to_string(cfg.command)}};
  RunResult res;
  try {
    detail::validate(cfg);
    switch (cfg.command) {
      case Command::Roots: res = detail::cmd_roots(cfg, in, out); break;
      case Command::Compare: res = detail::cmd_compare(cfg, in, out); break;
      case Command::DsMatrix: res = detail::cmd_ds_matrix(cfg, in, out); break;
      case Command::PencilScan: res = detail::cmd_pencil_scan(cfg, in, out); break;
      case Command::OrbitCheck: res = detail::cmd_orbit_check(cfg, in, out); break;
      case Command::LocalMin: res = detail::cmd_local_min(cfg, in, out); break;
      case Command::UnitRootTwist: res = detail::cmd_unit_root_twist(cfg, in, out); break;
      case Command::HyperbolicTwist: res = detail::cmd_hyperbolic_twist(cfg, in, out); break;
      case Command::ConjectureScan: res = detail::cmd_conjecture_scan(cfg, in, out); break;
    }
  } catch (const InputError& e) {
    out["error"] = json{{"kind", "input"}, {"type", "InputError"}, {"message", e.what()}, {"pointer", e.pointer()}};
    res = {1, {}};
  } catch (const NotHyperbolicError& e) {
    out["error"] = json{{"kind", "input"}, {"type", "NotHyperbolicError"}, {"message", e.what()}};
    if (e.lambda()) out["error"]["lambda"] = *e.lambda();
    res = {1, {}};
  } catch (const CertificationAmbiguous& e) {
    out["error"] = json{{"kind", "numerical"}, {"type", "CertificationAmbiguous"}, {"message", e.what()}};
    res = {2, {}};
  } catch (const RootFindingFailed& e) {
    out["error"] = json{{"kind", "numerical"}, {"type", "RootFindingFailed"}, {"message", e.what()}};
    res = {2, {}};
  } catch (const SolverError& e) {
    out["error"] = json{{"kind", "numerical"}, {"type", "SolverError"}, {"message", e.what()}};
    res = {2, {}};
  } catch (const LabelingAmbiguous& e) {
    out["error"] = json{{"kind", "numerical"}, {"type", "LabelingAmbiguous"}, {"message", e.what()}};
    res = {2, {}};
  } catch (const InconclusiveAtScale& e) {
    out["error"] = json{{"kind", "numerical"}, {"type", "InconclusiveAtScale"}, {"message", e.what()}};
    res = {2, {}};
  } catch (const Error& e) {
    out["error"] = json{{"kind", "input"}, {"type", "Error"}, {"message", e.what()}};
    res = {1, {}};
  }
  if (res.output.empty()) res.output = out.dump(2) + "\n";
  return res;
}

}  // namespace spectral_lab::cli
