#include "qfikit/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <thread>

#include "qfikit/errors.hpp"
#include "qfikit/expstate.hpp"
#include "qfikit/fockspace.hpp"
#include "qfikit/gaussian.hpp"
#include "qfikit/symplectic.hpp"

namespace qfikit::scenario {

namespace {

using families::Family;
using families::GaussianEstimate;
using families::Kind;
using families::Representation;
using gaussian::RealMatrix;
using gaussian::RealVector;
using nlohmann::json;
using numkit::Complex;
using numkit::Matrix;

[[noreturn]] void fail(const std::string& msg) { throw ArgumentError(msg); }

const json& require_field(const json& obj, const char* key, const std::string& ctx) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    fail(ctx + ": missing required field '" + key + "'");
  }
  return *it;
}

double as_number(const json& v, const std::string& ctx) {
  if (!v.is_number()) {
    fail(ctx + ": expected a number");
  }
  return v.get<double>();
}

double number_field(const json& obj, const char* key, const std::string& ctx) {
  return as_number(require_field(obj, key, ctx), ctx + "." + key);
}

double number_or(const json& obj, const char* key, double dflt, const std::string& ctx) {
  const auto it = obj.find(key);
  return it == obj.end() ? dflt : as_number(*it, ctx + "." + key);
}

long integer_or(const json& obj, const char* key, long dflt, const std::string& ctx) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    return dflt;
  }
  if (!it->is_number_integer()) {
    fail(ctx + "." + key + ": expected an integer");
  }
  return it->get<long>();
}

Complex parse_complex(const json& v, const std::string& ctx) {
  if (v.is_number()) {
    return Complex(v.get<double>(), 0.0);
  }
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return Complex(v[0].get<double>(), v[1].get<double>());
  }
  fail(ctx + ": expected a number or an [re, im] pair");
}

template <typename Mat, typename EntryParser>
Mat parse_matrix(const json& v, const std::string& ctx, EntryParser parse_entry) {
  if (!v.is_array() || v.empty()) {
    fail(ctx + ": expected a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(v.size());
  if (!v[0].is_array() || v[0].empty()) {
    fail(ctx + ": rows must be non-empty arrays");
  }
  const auto cols = static_cast<Eigen::Index>(v[0].size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = v[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      fail(ctx + ": row " + std::to_string(r) + " has inconsistent length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = parse_entry(row[static_cast<std::size_t>(c)],
                            ctx + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

Matrix parse_complex_matrix(const json& v, const std::string& ctx) {
  return parse_matrix<Matrix>(v, ctx, parse_complex);
}

RealMatrix parse_real_matrix(const json& v, const std::string& ctx) {
  return parse_matrix<RealMatrix>(v, ctx, as_number);
}

RealVector parse_real_vector(const json& v, const std::string& ctx) {
  if (!v.is_array()) {
    fail(ctx + ": expected an array of numbers");
  }
  RealVector out(static_cast<Eigen::Index>(v.size()));
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    out[k] = as_number(v[static_cast<std::size_t>(k)], ctx + "[" + std::to_string(k) + "]");
  }
  return out;
}

GaussianEstimate parse_estimate(const json& fam) {
  const json& e = require_field(fam, "estimate", "family");
  if (!e.is_string()) {
    fail("family.estimate: expected a string");
  }
  const std::string s = e.get<std::string>();
  if (s == "nbar") return GaussianEstimate::Nbar;
  if (s == "epsilon") return GaussianEstimate::Epsilon;
  if (s == "squeeze") return GaussianEstimate::Squeeze;
  if (s == "phase") return GaussianEstimate::Phase;
  if (s == "displacement") return GaussianEstimate::Displacement;
  fail("family.estimate: unknown estimate '" + s + "'");
}

Family parse_family(const json& doc) {
  const json& fam = require_field(doc, "family", "scenario");
  if (!fam.is_object()) {
    fail("family: expected an object");
  }
  const json& kindj = require_field(fam, "kind", "family");
  if (!kindj.is_string()) {
    fail("family.kind: expected a string");
  }
  const std::string kind = kindj.get<std::string>();
  const json params = fam.value("parameters", json::object());
  if (!params.is_object()) {
    fail("family.parameters: expected an object");
  }
  const std::string ctx = "family.parameters";

  if (kind == "qubit_exponential") {
    return Family::qubit_exponential(
        number_field(params, "gamma0", ctx), number_or(params, "gamma_dot", 0.0, ctx),
        number_or(params, "tau1", 0.0, ctx), number_or(params, "tau2", 0.0, ctx));
  }
  if (kind == "explicit_exponential") {
    return Family::explicit_exponential(
        parse_complex_matrix(require_field(params, "g0", ctx), ctx + ".g0"),
        parse_complex_matrix(require_field(params, "g1", ctx), ctx + ".g1"));
  }
  if (kind == "unitary_rotation") {
    return Family::unitary_rotation(
        parse_complex_matrix(require_field(params, "g0", ctx), ctx + ".g0"),
        parse_complex_matrix(require_field(params, "h", ctx), ctx + ".h"));
  }
  if (kind == "thermal_beta") {
    return Family::thermal_beta(parse_complex_matrix(require_field(params, "h", ctx), ctx + ".h"));
  }
  if (kind == "single_mode_gaussian") {
    const Complex alpha = params.contains("alpha")
                              ? parse_complex(params["alpha"], ctx + ".alpha")
                              : Complex(0.0, 0.0);
    return Family::single_mode_gaussian(
        number_or(params, "nbar", 0.0, ctx), number_or(params, "r", 0.0, ctx),
        number_or(params, "phi", 0.0, ctx), alpha, parse_estimate(fam));
  }
  if (kind == "two_mode_squeezed") {
    return Family::two_mode_squeezed(number_or(params, "nbar", 0.0, ctx));
  }
  if (kind == "explicit_moments") {
    RealMatrix g0 = parse_real_matrix(require_field(params, "gamma0", ctx), ctx + ".gamma0");
    RealMatrix g1 = parse_real_matrix(require_field(params, "gamma1", ctx), ctx + ".gamma1");
    RealVector d0 = params.contains("delta0")
                        ? parse_real_vector(params["delta0"], ctx + ".delta0")
                        : RealVector::Zero(g0.rows());
    RealVector d1 = params.contains("delta1")
                        ? parse_real_vector(params["delta1"], ctx + ".delta1")
                        : RealVector::Zero(g0.rows());
    return Family::explicit_moments(std::move(g0), std::move(d0), std::move(g1),
                                    std::move(d1));
  }
  fail("family.kind: unknown family kind '" + kind + "'");
}

void validate_method(const std::string& m, const Family& f) {
  static const std::vector<std::string> known{"moments",     "generator", "eigenbasis",
                                              "series",      "fock_oracle", "auto",
                                              "crosscheck"};
  if (std::find(known.begin(), known.end(), m) == known.end()) {
    fail("scenario.method: unknown method '" + m + "'");
  }
  const bool finite = f.representation() == Representation::Exponential;
  if ((m == "eigenbasis" || m == "series") && !finite) {
    fail("scenario.method: '" + m + "' requires a finite-dimensional family");
  }
  if ((m == "moments" || m == "generator") && finite) {
    fail("scenario.method: '" + m + "' requires a Gaussian family");
  }
  if (m == "fock_oracle" && !finite && f.kind() != Kind::SingleModeGaussian) {
    fail("scenario.method: 'fock_oracle' requires a single-mode or finite-dimensional "
         "family");
  }
}

// ---- result serialization ----

json complex_matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json real_matrix_json(const RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(m(r, c));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json real_vector_json(const RealVector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    out.push_back(v[k]);
  }
  return out;
}

struct RouteOutput {
  double qfi = 0.0;
  json sld;        // null unless requested
  json residuals;  // null unless requested
};

double residual_max_of(const json& residuals) {
  double worst = 0.0;
  for (const auto& item : residuals.items()) {
    worst = std::max(worst, std::abs(item.value().get<double>()));
  }
  return worst;
}

RouteOutput run_route(const Scenario& s, const std::string& method, double theta,
                      bool want_sld, bool want_residuals) {
  RouteOutput out;
  if (method == "eigenbasis" || method == "series") {
    const auto fe = s.family.eval_exponential(theta);
    const expstate::SLDResult r =
        method == "eigenbasis" ? expstate::sld_eigenbasis(fe.state, fe.gdot)
                               : expstate::sld_series(fe.state, fe.gdot, s.series_order);
    out.qfi = r.qfi;
    if (want_sld) {
      out.sld = complex_matrix_json(r.sld.matrix());
    }
    if (want_residuals) {
      const Matrix rho = fe.state.density();
      const Matrix rhodot = expstate::rhodot_eigen(fe.state, fe.gdot);
      const Matrix half_anti = 0.5 * (r.sld.matrix() * rho + rho * r.sld.matrix());
      out.residuals = json{
          {"defining_eq", (rhodot - half_anti).norm() / std::max(1.0, rhodot.norm())},
          {"mean_zero", std::abs((rho * r.sld.matrix()).trace())}};
    }
  } else if (method == "moments" || method == "generator") {
    const auto me = s.family.eval_moments(theta);
    gaussian::QuadraticSLD sld;
    if (method == "moments") {
      sld = gaussian::sld_from_moments(me.moments, me.deriv);
      out.qfi = gaussian::qfi_from_moments(me.moments, me.deriv);
    } else {
      const auto ge = s.family.eval_generator(theta);
      sld = gaussian::sld_from_generator(ge.generator, ge.deriv);
      out.qfi = gaussian::qfi_from_generator(ge.generator, ge.deriv);
    }
    if (want_sld) {
      out.sld = json{{"phi", real_matrix_json(sld.phi)},
                     {"zeta", real_vector_json(sld.zeta)},
                     {"nu", sld.nu}};
    }
    if (want_residuals) {
      const gaussian::GaussianResiduals res =
          gaussian::sld_residuals(me.moments, me.deriv, sld);
      out.residuals = json{{"gamma_eq", res.gamma_eq},
                           {"delta_eq", res.delta_eq},
                           {"mean_eq", res.mean_eq}};
    }
  } else {  // fock_oracle
    const auto render = s.family.fock_renderer(s.fock_dim);
    const fock::OracleResult oracle = fock::oracle_qfi(render, theta, s.fd_step);
    out.qfi = oracle.qfi;
    if (want_sld) {
      out.sld = complex_matrix_json(oracle.sld);
    }
    if (want_residuals) {
      const Matrix rho = render(theta);
      const Matrix rhodot =
          ((render(theta + s.fd_step) - render(theta - s.fd_step)) / (2.0 * s.fd_step))
              .eval();
      const Matrix half_anti = 0.5 * (oracle.sld * rho + rho * oracle.sld);
      out.residuals = json{
          {"defining_eq", (rhodot - half_anti).norm() / std::max(1.0, rhodot.norm())},
          {"mean_zero", std::abs((rho * oracle.sld).trace())}};
    }
  }
  if (out.qfi < -1e-12) {
    throw DomainError("computed QFI is negative: " + std::to_string(out.qfi));
  }
  return out;
}

std::string resolved_method(const Scenario& s) {
  if (s.method != "auto") {
    return s.method;
  }
  return s.family.representation() == Representation::Exponential ? "eigenbasis"
                                                                  : "moments";
}

// Routes a crosscheck compares at this theta. The series route joins only
// well inside its convergence disc; the generator route only when every
// mode is clearly mixed; the Fock route when the family is renderable at a
// tractable dimension.
std::vector<std::string> crosscheck_set(const Scenario& s, double theta) {
  std::vector<std::string> set;
  if (s.family.representation() == Representation::Exponential) {
    set.push_back("eigenbasis");
    if (s.family.evaluate_exponential(theta).spectral_spread() <= 1.8) {
      set.push_back("series");
    }
    set.push_back("fock_oracle");
  } else {
    set.push_back("moments");
    const auto m = s.family.evaluate_moments(theta);
    const auto wd = symplectic::williamson(m.gamma);
    if (wd.spectrum.minCoeff() >= 1.0 + 1e-6) {
      set.push_back("generator");
    }
    if (s.family.kind() == Kind::SingleModeGaussian) {
      set.push_back("fock_oracle");
    }
  }
  return set;
}

bool has_output(const Scenario& s, const char* name) {
  return std::find(s.outputs.begin(), s.outputs.end(), name) != s.outputs.end();
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) {
    fail("scenario: expected a JSON object");
  }
  if (const auto it = doc.find("schema_version"); it != doc.end()) {
    if (!it->is_string() || it->get<std::string>() != "1") {
      fail("scenario.schema_version: expected \"1\"");
    }
  }
  Scenario s(parse_family(doc));
  s.theta = number_or(doc, "theta", 0.0, "scenario");
  if (const auto it = doc.find("method"); it != doc.end()) {
    if (!it->is_string()) {
      fail("scenario.method: expected a string");
    }
    s.method = it->get<std::string>();
  }
  validate_method(s.method, s.family);

  s.fd_step = number_or(doc, "fd_step", 1e-5, "scenario");
  if (!(s.fd_step > 0.0)) {
    fail("scenario.fd_step: must be positive");
  }
  s.fock_dim = static_cast<int>(integer_or(doc, "fock_dim", 80, "scenario"));
  if (s.fock_dim < 2) {
    fail("scenario.fock_dim: must be at least 2");
  }
  s.series_order = static_cast<int>(integer_or(doc, "series_order", 40, "scenario"));
  if (s.series_order < 0 || s.series_order > 60) {
    fail("scenario.series_order: must lie in [0, 60]");
  }
  s.trials = integer_or(doc, "trials", 1, "scenario");
  if (s.trials < 1) {
    fail("scenario.trials: must be at least 1");
  }
  if (const auto it = doc.find("outputs"); it != doc.end()) {
    if (!it->is_array()) {
      fail("scenario.outputs: expected an array of strings");
    }
    s.outputs.clear();
    for (const auto& o : *it) {
      if (!o.is_string()) {
        fail("scenario.outputs: expected an array of strings");
      }
      const std::string name = o.get<std::string>();
      if (name != "qfi" && name != "sld" && name != "residuals" && name != "crb") {
        fail("scenario.outputs: unknown output '" + name + "'");
      }
      s.outputs.push_back(name);
    }
  }
  if (const auto it = doc.find("sweep"); it != doc.end()) {
    if (!it->is_object()) {
      fail("scenario.sweep: expected an object");
    }
    if (const auto p = it->find("param"); p != it->end()) {
      if (!p->is_string() || p->get<std::string>() != "theta") {
        fail("scenario.sweep.param: only \"theta\" is supported");
      }
    }
    SweepSpec sw;
    sw.from = number_field(*it, "from", "scenario.sweep");
    sw.to = number_field(*it, "to", "scenario.sweep");
    sw.steps = static_cast<int>(integer_or(*it, "steps", 0, "scenario.sweep"));
    if (sw.steps < 2) {
      fail("scenario.sweep.steps: must be at least 2");
    }
    if (s.method == "crosscheck") {
      fail("scenario.sweep: sweeps run a single route; use compute for crosschecks");
    }
    s.sweep = sw;
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail("cannot open scenario file '" + path + "'");
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail("scenario parse error in '" + path + "': " + e.what());
  }
  return parse_scenario(doc);
}

ComputeOutcome run_compute(const Scenario& s) {
  const auto t0 = std::chrono::steady_clock::now();
  const bool want_sld = has_output(s, "sld");
  const bool want_res = want_sld || has_output(s, "residuals");

  ComputeOutcome out;
  json record{{"schema_version", "1"}, {"theta", s.theta}};
  const std::string method = resolved_method(s);
  double qfi = 0.0;

  if (method == "crosscheck") {
    const std::string primary =
        s.family.representation() == Representation::Exponential ? "eigenbasis"
                                                                 : "moments";
    const RouteOutput r = run_route(s, primary, s.theta, want_sld, want_res);
    qfi = r.qfi;
    record["method"] = "crosscheck";
    record["qfi"] = r.qfi;
    if (!r.sld.is_null()) record["sld"] = r.sld;
    if (!r.residuals.is_null()) record["residuals"] = r.residuals;

    const std::vector<std::string> set = crosscheck_set(s, s.theta);
    json methods = json::object();
    double qmin = r.qfi;
    double qmax = r.qfi;
    for (const std::string& m : set) {
      const double q =
          m == primary ? r.qfi : run_route(s, m, s.theta, false, false).qfi;
      methods[m] = q;
      qmin = std::min(qmin, q);
      qmax = std::max(qmax, q);
    }
    const bool with_fock =
        std::find(set.begin(), set.end(), "fock_oracle") != set.end();
    const double tolerance = with_fock ? 1e-5 : 1e-8;
    const double spread =
        (qmax - qmin) / std::max(1.0, std::max(std::abs(qmax), std::abs(qmin)));
    const bool pass = spread <= tolerance;
    record["crosscheck"] = json{{"methods", methods},
                                {"max_rel_spread", spread},
                                {"tolerance", tolerance},
                                {"pass", pass}};
    out.crosscheck_pass = pass;
  } else {
    const RouteOutput r = run_route(s, method, s.theta, want_sld, want_res);
    qfi = r.qfi;
    record["method"] = method;
    record["qfi"] = r.qfi;
    if (!r.sld.is_null()) record["sld"] = r.sld;
    if (!r.residuals.is_null()) record["residuals"] = r.residuals;
  }

  if (has_output(s, "crb")) {
    record["crb"] = expstate::crb(qfi, s.trials);
  }
  const auto t1 = std::chrono::steady_clock::now();
  record["timing_ms"] = std::chrono::duration<double, std::milli>(t1 - t0).count();
  out.record = std::move(record);
  return out;
}

std::string run_sweep_csv(const Scenario& s) {
  if (!s.sweep) {
    fail("scenario has no sweep block");
  }
  const SweepSpec sw = *s.sweep;
  const int n = sw.steps;
  std::vector<double> thetas(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    thetas[static_cast<std::size_t>(k)] = sw.from + (sw.to - sw.from) * k / (n - 1);
  }
  const std::string method = resolved_method(s);

  struct Row {
    double qfi = 0.0;
    double residual_max = 0.0;
    std::exception_ptr error;
  };
  std::vector<Row> rows(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= n) {
        return;
      }
      auto& row = rows[static_cast<std::size_t>(k)];
      try {
        const RouteOutput r =
            run_route(s, method, thetas[static_cast<std::size_t>(k)], false, true);
        row.qfi = r.qfi;
        row.residual_max = residual_max_of(r.residuals);
      } catch (...) {
        row.error = std::current_exception();
      }
    }
  };
  const unsigned hc = std::thread::hardware_concurrency();
  const unsigned workers =
      std::min<unsigned>(hc == 0 ? 2 : hc, static_cast<unsigned>(n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back(worker);
  }
  for (auto& t : pool) {
    t.join();
  }

  for (int k = 0; k < n; ++k) {
    const auto& row = rows[static_cast<std::size_t>(k)];
    if (!row.error) {
      continue;
    }
    const std::string at =
        "sweep point theta=" + format_double(thetas[static_cast<std::size_t>(k)]) + ": ";
    try {
      std::rethrow_exception(row.error);
    } catch (const ArgumentError& e) {
      throw ArgumentError(at + e.what());
    } catch (const DomainError& e) {
      throw DomainError(at + e.what());
    } catch (const std::exception& e) {
      throw DomainError(at + e.what());
    }
  }

  std::string csv = "theta,qfi,residual_max,method\n";
  for (int k = 0; k < n; ++k) {
    const auto& row = rows[static_cast<std::size_t>(k)];
    csv += format_double(thetas[static_cast<std::size_t>(k)]);
    csv += ',';
    csv += format_double(row.qfi);
    csv += ',';
    csv += format_double(row.residual_max);
    csv += ',';
    csv += method;
    csv += '\n';
  }
  return csv;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace qfikit::scenario
