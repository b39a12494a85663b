#include "convolab/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "convolab/common.hpp"
#include "convolab/quadrature.hpp"

namespace convolab {

namespace {

std::string num(double x) { return csv_num(x); }

ordered_json cplx_to_json(cplx z) {
  return ordered_json{{"re", z.real()}, {"im", z.imag()}};
}

double require_number(const ordered_json& j, const char* what) {
  if (!j.is_number())
    throw config_error(std::string(what) + ": expected a number");
  return j.get<double>();
}

cplx cplx_from_json(const ordered_json& j, const char* what) {
  if (j.is_number()) return cplx{j.get<double>(), 0.0};
  if (j.is_object() && j.contains("re"))
    return cplx{require_number(j.at("re"), what),
                j.contains("im") ? require_number(j.at("im"), what) : 0.0};
  if (j.is_array() && j.size() == 2)
    return cplx{require_number(j.at(0), what), require_number(j.at(1), what)};
  throw config_error(std::string(what) +
                     ": expected {re, im}, [re, im], or a real number");
}

std::vector<double> doubles_from_json(const ordered_json& j, const char* what) {
  if (!j.is_array())
    throw config_error(std::string(what) + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(require_number(e, what));
  return out;
}

std::vector<cplx> cplxs_from_json(const ordered_json& j, const char* what) {
  if (!j.is_array())
    throw config_error(std::string(what) + ": expected an array of points");
  std::vector<cplx> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(cplx_from_json(e, what));
  return out;
}

ordered_json cplxs_to_json(const std::vector<cplx>& zs) {
  ordered_json arr = ordered_json::array();
  for (cplx z : zs) arr.push_back(cplx_to_json(z));
  return arr;
}

std::string require_string(const ordered_json& j, const char* what) {
  if (!j.is_string())
    throw config_error(std::string(what) + ": expected a string");
  return j.get<std::string>();
}

const char* verdict_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::Pass:
      return "pass";
    case VerdictKind::Fail:
      return "fail";
    default:
      return "inconclusive";
  }
}

// Strict double parser for CSV cells (locale-independent).
double parse_double(const std::string& cell, std::size_t line_no) {
  std::size_t a = cell.find_first_not_of(" \t\r");
  std::size_t b = cell.find_last_not_of(" \t\r");
  if (a == std::string::npos)
    throw config_error("tabulated_from_csv: empty cell on line " +
                       std::to_string(line_no));
  double value = 0.0;
  const char* first = cell.data() + a;
  const char* last = cell.data() + b + 1;
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last)
    throw config_error("tabulated_from_csv: malformed number '" +
                       cell.substr(a, b - a + 1) + "' on line " +
                       std::to_string(line_no));
  return value;
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

std::string csv_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

ordered_json kernel_spec_to_json(const KernelSpec& s) {
  ordered_json j;
  j["kind"] = s.kind;
  if (s.kind == "riesz") {
    j["alpha"] = s.alpha;
  } else if (s.kind == "gevrey") {
    j["delta"] = s.delta;
  } else if (s.kind == "rational-spectrum-zero") {
    j["zeros"] = cplxs_to_json(s.zeros);
    j["extra_pole_order"] = s.extra_pole_order;
  } else if (s.kind == "tabulated") {
    j["grid"] = s.grid;
    j["values"] = s.values;
  } else if (s.kind == "convolution" || s.kind == "antiderivative" ||
             s.kind == "weierstrass") {
    ordered_json parts = ordered_json::array();
    for (const KernelSpec& p : s.parts) parts.push_back(kernel_spec_to_json(p));
    j["parts"] = std::move(parts);
  }
  return j;
}

KernelSpec kernel_spec_from_json(const ordered_json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw config_error("kernel spec: expected an object with a 'kind' field");
  KernelSpec s;
  s.kind = require_string(j.at("kind"), "kernel spec kind");
  if (j.contains("alpha")) s.alpha = require_number(j.at("alpha"), "kernel alpha");
  if (j.contains("delta")) s.delta = require_number(j.at("delta"), "kernel delta");
  if (j.contains("zeros")) s.zeros = cplxs_from_json(j.at("zeros"), "kernel zeros");
  if (j.contains("extra_pole_order")) {
    if (!j.at("extra_pole_order").is_number_integer())
      throw config_error("kernel extra_pole_order: expected an integer");
    s.extra_pole_order = j.at("extra_pole_order").get<int>();
  }
  if (j.contains("grid")) s.grid = doubles_from_json(j.at("grid"), "kernel grid");
  if (j.contains("values"))
    s.values = doubles_from_json(j.at("values"), "kernel values");
  if (j.contains("parts")) {
    if (!j.at("parts").is_array())
      throw config_error("kernel parts: expected an array of kernel specs");
    for (const auto& p : j.at("parts")) s.parts.push_back(kernel_spec_from_json(p));
  }
  return s;
}

ordered_json region_spec_to_json(const RegionSpec& s) {
  ordered_json j;
  j["kind"] = s.kind;
  j["squared"] = s.squared;
  if (s.kind == "half-plane") {
    j["sigma"] = s.sigma;
  } else if (s.kind == "parabola") {
    j["omega"] = s.omega;
  } else if (s.kind == "ouchi") {
    j["eps"] = s.eps;
    j["C"] = s.C;
  } else if (s.kind == "log-region") {
    j["k"] = s.k;
    j["C"] = s.C;
  } else if (s.kind == "ultralog") {
    j["alpha"] = s.alpha;
    j["beta"] = s.beta;
    j["gamma"] = s.gamma;
  } else if (s.kind == "exponential") {
    j["alpha"] = s.alpha;
    j["beta"] = s.beta;
  } else if (s.kind == "sector") {
    j["vertex"] = s.vertex;
    j["angle"] = s.angle;
  }
  if (!s.seq.empty()) {
    j["seq"] = s.seq;
    if (s.seq == "gevrey-factorial" || s.seq == "gevrey-power" ||
        s.seq == "gevrey-gamma")
      j["seq_s"] = s.seq_s;
    if (s.seq_log_power != 1) j["seq_log_power"] = s.seq_log_power;
    if (s.seq == "table") j["seq_table"] = s.seq_table;
  }
  return j;
}

RegionSpec region_spec_from_json(const ordered_json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw config_error("region spec: expected an object with a 'kind' field");
  RegionSpec s;
  s.kind = require_string(j.at("kind"), "region spec kind");
  if (j.contains("squared")) {
    if (!j.at("squared").is_boolean())
      throw config_error("region squared: expected a boolean");
    s.squared = j.at("squared").get<bool>();
  }
  if (j.contains("sigma")) s.sigma = require_number(j.at("sigma"), "region sigma");
  if (j.contains("omega")) s.omega = require_number(j.at("omega"), "region omega");
  if (j.contains("eps")) s.eps = require_number(j.at("eps"), "region eps");
  if (j.contains("C")) s.C = require_number(j.at("C"), "region C");
  if (j.contains("k")) s.k = require_number(j.at("k"), "region k");
  if (j.contains("alpha")) s.alpha = require_number(j.at("alpha"), "region alpha");
  if (j.contains("beta")) s.beta = require_number(j.at("beta"), "region beta");
  if (j.contains("gamma")) s.gamma = require_number(j.at("gamma"), "region gamma");
  if (j.contains("angle")) s.angle = require_number(j.at("angle"), "region angle");
  if (j.contains("vertex"))
    s.vertex = require_number(j.at("vertex"), "region vertex");
  if (j.contains("seq")) s.seq = require_string(j.at("seq"), "region seq");
  if (j.contains("seq_s")) s.seq_s = require_number(j.at("seq_s"), "region seq_s");
  if (j.contains("seq_log_power")) {
    if (!j.at("seq_log_power").is_number_integer())
      throw config_error("region seq_log_power: expected an integer");
    s.seq_log_power = j.at("seq_log_power").get<int>();
  }
  if (j.contains("seq_table"))
    s.seq_table = doubles_from_json(j.at("seq_table"), "region seq_table");
  return s;
}

ordered_json operator_spec_to_json(const OperatorSpec& s) {
  ordered_json j;
  if (!s.eigenvalues.empty()) {
    j["eigenvalues"] = cplxs_to_json(s.eigenvalues);
  } else {
    j["symbol"] = s.symbol;
    if (s.X > 0.0) j["X"] = s.X;
    if (s.n > 0) j["n"] = s.n;
  }
  if (!s.c_weights.empty()) j["c_weights"] = s.c_weights;
  return j;
}

OperatorSpec operator_spec_from_json(const ordered_json& j) {
  if (!j.is_object())
    throw config_error("operator spec: expected an object");
  OperatorSpec s;
  if (j.contains("eigenvalues"))
    s.eigenvalues = cplxs_from_json(j.at("eigenvalues"), "operator eigenvalues");
  if (j.contains("symbol"))
    s.symbol = require_string(j.at("symbol"), "operator symbol");
  if (s.eigenvalues.empty() && s.symbol.empty())
    throw config_error(
        "operator spec: need either 'eigenvalues' or a 'symbol' name");
  if (j.contains("X")) s.X = require_number(j.at("X"), "operator X");
  if (j.contains("n")) {
    if (!j.at("n").is_number_integer() || j.at("n").get<long long>() < 0)
      throw config_error("operator n: expected a nonnegative integer");
    s.n = j.at("n").get<std::size_t>();
  }
  if (j.contains("c_weights"))
    s.c_weights = doubles_from_json(j.at("c_weights"), "operator c_weights");
  return s;
}

ordered_json classification_to_json(const ClassificationReport& rep) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["operator_id"] = rep.operator_id;
  ordered_json verdicts = ordered_json::array();
  for (const auto& [name, v] : rep.verdicts) {
    ordered_json e;
    e["class"] = name;
    e["verdict"] = verdict_name(v.kind);
    e["detail"] = v.detail;
    e["constant"] = v.constant;
    e["grid"] = v.grid;
    if (v.kind == VerdictKind::Fail) {
      e["witness"] = cplx_to_json(v.witness);
      e["witness_distance"] = v.witness_distance;
    }
    verdicts.push_back(std::move(e));
  }
  j["verdicts"] = std::move(verdicts);
  ordered_json grids = ordered_json::object();
  for (const auto& [name, g] : rep.grids_used) grids[name] = g;
  j["grids_used"] = std::move(grids);
  return j;
}

std::string trajectory_csv(const Trajectory& traj, const SpectralOperator& op,
                           const Kernel& k) {
  const std::vector<cplx>& mus = op.points();
  const std::vector<double>& w = op.c_weights();
  if (traj.points() != mus.size())
    throw config_error(
        "trajectory_csv: trajectory width does not match the spectrum");
  if (traj.time_grid.size() < 2)
    throw config_error("trajectory_csv: trajectory needs at least two nodes");
  std::vector<cplx> datum = traj.datum;
  if (datum.empty()) datum.assign(mus.size(), cplx{1.0, 0.0});
  if (datum.size() != mus.size())
    throw config_error(
        "trajectory_csv: input vector length does not match the spectrum");

  const double h = traj.time_grid[1] - traj.time_grid[0];
  const std::size_t n = traj.time_grid.size();
  std::vector<cplx> theta(n);
  for (std::size_t i = 0; i < n; ++i) theta[i] = k.theta(traj.time_grid[i]);

  // Per-node defining-identity defect, one column of the family at a time.
  std::vector<std::vector<double>> defect(mus.size(),
                                          std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < mus.size(); ++j) {
    std::vector<cplx> c(n), sc(n);
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = traj.values[i][j];
      sc[i] = traj.time_grid[i] * c[i];
    }
    const std::vector<cplx> U = cumulative_integral(c, h);
    const std::vector<cplx> V = cumulative_integral(sc, h);
    const cplx scale = w[j] * datum[j];
    for (std::size_t i = 0; i < n; ++i) {
      const cplx integral = traj.kind == FamilyKind::Cosine
                                ? traj.time_grid[i] * U[i] - V[i]
                                : U[i];
      defect[j][i] = std::abs(mus[j] * integral - (c[i] - theta[i] * scale));
    }
  }

  std::ostringstream out;
  out << "# schema_version: " << kSchemaVersion << "\n";
  out << "# kernel: " << traj.kernel_id << "\n";
  out << "# operator: " << traj.operator_id << "\n";
  out << "# family: "
      << (traj.kind == FamilyKind::Cosine ? "cosine" : "semigroup") << "\n";
  out << "# quadrature: method=" << traj.quadrature.method
      << " step=" << num(traj.quadrature.step)
      << " tolerance=" << num(traj.quadrature.tolerance) << "\n";
  out << "# saturated: " << (traj.saturated ? 1 : 0) << "\n";
  out << "t,point_index,re,im,residual\n";
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < mus.size(); ++j)
      out << num(traj.time_grid[i]) << "," << j << ","
          << num(traj.values[i][j].real()) << ","
          << num(traj.values[i][j].imag()) << "," << num(defect[j][i]) << "\n";
  return out.str();
}

std::string kernel_table_csv(const std::vector<double>& t,
                             const std::vector<double>& values,
                             const std::vector<double>& est_error) {
  if (t.size() != values.size())
    throw config_error("kernel_table_csv: grid and value lengths differ");
  if (!est_error.empty() && est_error.size() != t.size())
    throw config_error("kernel_table_csv: est_error length differs from grid");
  std::ostringstream out;
  out << "# schema_version: " << kSchemaVersion << "\n";
  out << "t,value,est_error\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    out << num(t[i]) << "," << num(values[i]) << ","
        << num(est_error.empty() ? 0.0 : est_error[i]) << "\n";
  return out.str();
}

Kernel tabulated_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<double> t, v;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t a = line.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    if (line[a] == '#') continue;
    if (!header_seen) {
      std::string header = line.substr(a);
      while (!header.empty() &&
             (header.back() == ' ' || header.back() == '\t'))
        header.pop_back();
      if (header != "t,value,est_error")
        throw config_error(
            "tabulated_from_csv: expected header 't,value,est_error' on line " +
            std::to_string(line_no));
      header_seen = true;
      continue;
    }
    const std::vector<std::string> cells = split_cells(line);
    if (cells.size() != 2 && cells.size() != 3)
      throw config_error("tabulated_from_csv: expected 2 or 3 cells on line " +
                         std::to_string(line_no));
    t.push_back(parse_double(cells[0], line_no));
    v.push_back(parse_double(cells[1], line_no));
    if (cells.size() == 3) parse_double(cells[2], line_no);  // validated only
  }
  if (!header_seen)
    throw config_error("tabulated_from_csv: missing 't,value,est_error' header");
  return Kernel::tabulated(std::move(t), std::move(v));
}

std::string boundary_csv(const BoundarySample& b) {
  std::ostringstream out;
  out << "# schema_version: " << kSchemaVersion << "\n";
  out << "# radius: " << num(b.radius) << "\n";
  out << "# clamped: " << (b.clamped ? 1 : 0) << "\n";
  out << "re,im\n";
  for (cplx z : b.points) out << num(z.real()) << "," << num(z.imag()) << "\n";
  return out.str();
}

}  // namespace convolab
