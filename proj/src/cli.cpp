#include "convolab/cli.hpp"

#include <clocale>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "convolab/classify.hpp"
#include "convolab/common.hpp"
#include "convolab/evolution.hpp"
#include "convolab/kernels.hpp"
#include "convolab/operators.hpp"
#include "convolab/regions.hpp"
#include "convolab/report.hpp"
#include "convolab/weights.hpp"

namespace convolab {

namespace {

namespace fs = std::filesystem;

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Config-file access (strictly typed; every mismatch is a config_error).
// ---------------------------------------------------------------------------

ordered_json load_config(const std::string& path) {
  if (path.empty()) return ordered_json::object();
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return ordered_json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config file " + path + ": " + e.what());
  }
}

double jnum(const ordered_json& j, const char* key, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number())
    throw config_error(std::string("config '") + key + "': expected a number");
  return j.at(key).get<double>();
}

std::size_t juint(const ordered_json& j, const char* key, std::size_t dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number_integer() || j.at(key).get<long long>() < 0)
    throw config_error(std::string("config '") + key +
                       "': expected a nonnegative integer");
  return j.at(key).get<std::size_t>();
}

std::string jstr(const ordered_json& j, const char* key,
                 const std::string& dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_string())
    throw config_error(std::string("config '") + key + "': expected a string");
  return j.at(key).get<std::string>();
}

bool jbool(const ordered_json& j, const char* key, bool dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_boolean())
    throw config_error(std::string("config '") + key + "': expected a boolean");
  return j.at(key).get<bool>();
}

void validate_settings(const RunSettings& st) {
  if (st.steps < 16) throw config_error("grid steps must be at least 16");
  if (!(st.tolerance >= 1e-12 && st.tolerance <= 1e-3))
    throw config_error("tolerance must lie in [1e-12, 1e-3]");
  if (!(st.t_max > 0.0)) throw config_error("t_max must be positive");
}

void write_file(const fs::path& dir, const std::string& name,
                const std::string& text) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write output file: " + path.string());
  out << text;
  out.close();
  if (!out) throw config_error("failed while writing: " + path.string());
  std::printf("wrote %s\n", path.string().c_str());
}

// ---------------------------------------------------------------------------
// Config building blocks.
// ---------------------------------------------------------------------------

Kernel kernel_from_config(const ordered_json& cfg, const char* key = "kernel") {
  if (!cfg.contains(key))
    throw config_error(std::string("config needs a '") + key + "' kernel spec");
  return Kernel::from_spec(kernel_spec_from_json(cfg.at(key)));
}

SpectralOperator operator_from_config(const ordered_json& cfg) {
  if (!cfg.contains("operator"))
    throw config_error("config needs an 'operator' spec");
  SpectralOperator op =
      SpectralOperator::from_spec(operator_spec_from_json(cfg.at("operator")));
  if (cfg.contains("operator_maps")) {
    const ordered_json& maps = cfg.at("operator_maps");
    if (!maps.is_array())
      throw config_error("config 'operator_maps': expected an array of names");
    for (const auto& m : maps) {
      if (!m.is_string())
        throw config_error("config 'operator_maps': entries must be strings");
      const std::string name = m.get<std::string>();
      if (name == "square")
        op = spectrum_image(op, SpectrumMap::Square);
      else if (name == "negate-square")
        op = spectrum_image(op, SpectrumMap::NegateSquare);
      else
        throw config_error("unknown operator map: " + name);
    }
  }
  return op;
}

WeightSequence sequence_from_config(const ordered_json& cfg) {
  if (!cfg.contains("sequence"))
    return WeightSequence::gevrey_factorial(1.5);
  const ordered_json& j = cfg.at("sequence");
  if (!j.is_object())
    throw config_error("config 'sequence': expected an object");
  const std::string kind = jstr(j, "kind", "gevrey-factorial");
  const double s = jnum(j, "s", 1.5);
  const std::size_t P = juint(j, "P", 256);
  if (kind == "gevrey-factorial") return WeightSequence::gevrey_factorial(s, P);
  if (kind == "gevrey-power") return WeightSequence::gevrey_power(s, P);
  if (kind == "gevrey-gamma") return WeightSequence::gevrey_gamma(s, P);
  if (kind == "table") {
    if (!j.contains("table") || !j.at("table").is_array())
      throw config_error("config 'sequence': table kind needs a 'table' array");
    std::vector<double> vals;
    for (const auto& v : j.at("table")) {
      if (!v.is_number())
        throw config_error("config 'sequence' table: expected numbers");
      vals.push_back(v.get<double>());
    }
    return WeightSequence::table(std::move(vals));
  }
  throw config_error("unknown sequence kind: " + kind);
}

std::vector<cplx> datum_from_config(const ordered_json& cfg) {
  std::vector<cplx> datum;
  if (!cfg.contains("datum")) return datum;
  const ordered_json& j = cfg.at("datum");
  if (!j.is_array())
    throw config_error("config 'datum': expected an array of points");
  for (const auto& e : j) {
    if (e.is_number()) {
      datum.push_back(cplx{e.get<double>(), 0.0});
    } else if (e.is_object() && e.contains("re")) {
      const double re = jnum(e, "re", 0.0);
      const double im = jnum(e, "im", 0.0);
      datum.push_back(cplx{re, im});
    } else {
      throw config_error("config 'datum': entries must be numbers or {re, im}");
    }
  }
  return datum;
}

ordered_json quadrature_json(const QuadratureMeta& q) {
  ordered_json j;
  j["method"] = q.method;
  j["step"] = q.step;
  j["tolerance"] = q.tolerance;
  return j;
}

const char* verdict_str(VerdictKind k) {
  switch (k) {
    case VerdictKind::Pass:
      return "pass";
    case VerdictKind::Fail:
      return "fail";
    default:
      return "inconclusive";
  }
}

// ---------------------------------------------------------------------------
// kernel: tabulate K, Theta, and the transform.
// ---------------------------------------------------------------------------

int cmd_kernel(const RunSettings& st, const ordered_json& cfg) {
  const Kernel k = kernel_from_config(cfg);
  std::optional<Kernel> ref;
  if (cfg.contains("reference_kernel"))
    ref = kernel_from_config(cfg, "reference_kernel");
  const QuadSpec q{};

  std::ostringstream values;
  values << "# schema_version: " << kSchemaVersion << "\n";
  values << "# kernel: " << k.id() << "\n";
  if (ref) values << "# reference: " << ref->id() << "\n";
  values << "# abscissa: " << csv_num(k.laplace_abscissa()) << "\n";
  values << "# quadrature: abs_tol=" << csv_num(q.abs_tol)
         << " rel_tol=" << csv_num(q.rel_tol) << "\n";
  values << (ref ? "t,K,Theta,K_ref,diff\n" : "t,K,Theta\n");
  for (std::size_t i = 1; i <= st.steps; ++i) {
    const double t =
        st.t_max * static_cast<double>(i) / static_cast<double>(st.steps);
    const double kv = k.evaluate(t, q).real();
    const double th = k.theta(t, q).real();
    values << csv_num(t) << "," << csv_num(kv) << "," << csv_num(th);
    if (ref) {
      const double rv = ref->evaluate(t, q).real();
      values << "," << csv_num(rv) << "," << csv_num(std::abs(kv - rv));
    }
    values << "\n";
  }
  write_file(st.out_dir, "kernel_values.csv", values.str());

  const double a = std::max(0.0, k.laplace_abscissa());
  std::ostringstream tfm;
  tfm << "# schema_version: " << kSchemaVersion << "\n";
  tfm << "# kernel: " << k.id() << "\n";
  tfm << "# abscissa: " << csv_num(k.laplace_abscissa()) << "\n";
  tfm << "# quadrature: abs_tol=" << csv_num(q.abs_tol)
      << " rel_tol=" << csv_num(q.rel_tol) << "\n";
  tfm << "lambda,re,im\n";
  const std::size_t n_tfm = 25;
  for (std::size_t i = 0; i < n_tfm; ++i) {
    const double lam =
        a + 1.0 + 99.0 * static_cast<double>(i) / static_cast<double>(n_tfm - 1);
    const cplx v = k.laplace(cplx{lam, 0.0}, q);
    tfm << csv_num(lam) << "," << csv_num(v.real()) << "," << csv_num(v.imag())
        << "\n";
  }
  write_file(st.out_dir, "kernel_transform.csv", tfm.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// classify: run the generation-class checks and write the report.
// ---------------------------------------------------------------------------

Verdict run_selected_class(const std::string& token, const SpectralOperator& op,
                           const WeightSequence& seq) {
  if (token == "integrated-cosine")
    return integrated_cosine_check(op, default_alpha_grid(), default_beta_grid(),
                                   4);
  if (token == "ultradistribution-sine-beurling")
    return ultradistribution_sine_check(op, seq, GrowthMode::Beurling,
                                        default_k_grid());
  if (token == "ultradistribution-sine-roumieu")
    return ultradistribution_sine_check(op, seq, GrowthMode::Roumieu,
                                        default_k_grid());
  if (token == "hyperfunction-sine")
    return hyperfunction_sine_check(op, default_eps_grid());
  if (token == "fourier-hyperfunction-sine")
    return fourier_hyperfunction_sine_check(op, default_sigma_grid(),
                                            default_eps_grid());
  if (token == "local-convoluted-cosine")
    return local_convoluted_cosine_regions(Kernel::riesz(1.0), 1.0, 0.3, op)
        .conclusion;
  if (token == "analytic-k-semigroup")
    return analytic_semigroup_witness(op, Kernel::k_half(), 0.25 * kPi, 1.0, 16)
        .verdict;
  throw config_error("unknown classification class: " + token);
}

int cmd_classify(const RunSettings& st, const ordered_json& cfg) {
  const SpectralOperator op = operator_from_config(cfg);
  const WeightSequence seq = sequence_from_config(cfg);

  ClassificationReport rep;
  rep.operator_id = op.id();
  if (!cfg.contains("classes")) {
    rep = classify(op, seq);
  } else {
    const ordered_json& classes = cfg.at("classes");
    if (!classes.is_array())
      throw config_error("config 'classes': expected an array of class names");
    for (const auto& c : classes) {
      if (!c.is_string())
        throw config_error("config 'classes': entries must be strings");
      const std::string token = c.get<std::string>();
      // Unknown names are config errors; numeric trouble inside a check is
      // captured as an inconclusive verdict so the other classes still run.
      if (token != "integrated-cosine" &&
          token != "ultradistribution-sine-beurling" &&
          token != "ultradistribution-sine-roumieu" &&
          token != "hyperfunction-sine" &&
          token != "fourier-hyperfunction-sine" &&
          token != "local-convoluted-cosine" && token != "analytic-k-semigroup")
        throw config_error("unknown classification class: " + token);
      Verdict v;
      try {
        v = run_selected_class(token, op, seq);
      } catch (const std::exception& e) {
        v.klass = token;
        v.kind = VerdictKind::Inconclusive;
        v.detail = e.what();
      }
      if (v.klass.empty()) v.klass = token;
      rep.grids_used[v.klass] = v.grid;
      rep.verdicts[v.klass] = std::move(v);
    }
  }

  for (const auto& [name, v] : rep.verdicts)
    std::printf("%s: %s\n", name.c_str(), verdict_str(v.kind));
  write_file(st.out_dir, "classification.json",
             classification_to_json(rep).dump(2) + "\n");
  return kExitOk;  // verdicts are data, not process failures
}

// ---------------------------------------------------------------------------
// simulate: run one family and dump the trajectory.
// ---------------------------------------------------------------------------

int cmd_simulate(const RunSettings& st, const ordered_json& cfg) {
  const Kernel k = kernel_from_config(cfg);
  const SpectralOperator op = operator_from_config(cfg);
  const std::string family = jstr(cfg, "family", "cosine");
  FamilyKind kind;
  if (family == "cosine")
    kind = FamilyKind::Cosine;
  else if (family == "semigroup")
    kind = FamilyKind::Semigroup;
  else
    throw config_error("config 'family' must be 'cosine' or 'semigroup'");
  const std::vector<cplx> datum = datum_from_config(cfg);

  const GridSpec grid{st.t_max, st.steps};
  const Trajectory traj = apply_family(op, k, kind, grid, datum);
  const double resid = identity_residual(traj, op, k);

  write_file(st.out_dir, "trajectory.csv", trajectory_csv(traj, op, k));
  ordered_json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["kernel"] = k.id();
  summary["operator"] = op.id();
  summary["family"] = family;
  summary["t_max"] = grid.t_max;
  summary["steps"] = grid.steps;
  summary["identity_residual"] = resid;
  summary["saturated"] = traj.saturated;
  summary["quadrature"] = quadrature_json(traj.quadrature);
  write_file(st.out_dir, "simulate_summary.json", summary.dump(2) + "\n");
  std::printf("identity residual: %s\n", csv_num(resid).c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify: residual suite over a kernel matrix.
// ---------------------------------------------------------------------------

struct CheckRow {
  std::string check;
  std::string kernel;
  std::string detail;
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
  QuadratureMeta quadrature;
};

const std::vector<std::string> kAllChecks = {
    "identity",        "composition",    "semigroup-average",
    "laplace-criterion", "block-semigroup", "weierstrass"};

int cmd_verify(const RunSettings& st, const ordered_json& cfg) {
  std::vector<Kernel> kernels;
  if (cfg.contains("kernel"))
    kernels.push_back(kernel_from_config(cfg));
  else {
    kernels.push_back(Kernel::riesz(1.0));
    kernels.push_back(Kernel::k_half());
  }
  const SpectralOperator op =
      cfg.contains("operator")
          ? operator_from_config(cfg)
          : SpectralOperator::from_eigenvalues(
                {cplx{-1.0, 0.0}, cplx{-4.0, 0.0}, cplx{-9.0, 0.0}});

  std::vector<std::string> checks;
  if (cfg.contains("checks")) {
    const ordered_json& arr = cfg.at("checks");
    if (!arr.is_array())
      throw config_error("config 'checks': expected an array of names");
    for (const auto& c : arr) {
      if (!c.is_string())
        throw config_error("config 'checks': entries must be strings");
      const std::string name = c.get<std::string>();
      bool known = false;
      for (const auto& k : kAllChecks) known = known || k == name;
      if (!known) throw config_error("unknown verification check: " + name);
      checks.push_back(name);
    }
  } else {
    checks = kAllChecks;
  }
  const bool inject = jbool(cfg, "inject_corruption", false);

  const GridSpec grid{st.t_max, st.steps};
  const double tol = st.tolerance;
  // The Weierstrass comparison is approximation-limited (trajectory
  // interpolation feeds the Gaussian average), so its threshold never drops
  // below 1e-5; every exact identity is held to the configured tolerance.
  const double weier_threshold = std::max(tol, 1e-5);
  std::vector<CheckRow> rows;
  bool corrupted_once = false;

  const auto push = [&rows](std::string check, const Kernel& k,
                            std::string detail, double resid, double thr,
                            QuadratureMeta quad) {
    CheckRow r;
    r.check = std::move(check);
    r.kernel = k.id();
    r.detail = std::move(detail);
    r.residual = resid;
    r.threshold = thr;
    r.pass = resid <= thr;
    r.quadrature = std::move(quad);
    rows.push_back(std::move(r));
  };

  for (const Kernel& k : kernels) {
    for (const std::string& check : checks) {
      if (check == "identity") {
        for (FamilyKind kind : {FamilyKind::Cosine, FamilyKind::Semigroup}) {
          const char* fam = kind == FamilyKind::Cosine ? "cosine" : "semigroup";
          Trajectory traj = apply_family(op, k, kind, grid, {});
          push("identity", k, fam, identity_residual(traj, op, k), tol,
               traj.quadrature);
          if (inject && !corrupted_once) {
            corrupted_once = true;
            for (auto& row : traj.values)
              for (auto& v : row) v *= 1.01;
            push("identity", k, std::string(fam) + " corrupted(x1.01)",
                 identity_residual(traj, op, k), tol, traj.quadrature);
          }
        }
      } else if (check == "composition") {
        const std::size_t it = std::max<std::size_t>(1, grid.steps / 4);
        const std::size_t is = std::max<std::size_t>(2, grid.steps / 2);
        const double t = grid.t_max * static_cast<double>(it) /
                         static_cast<double>(grid.steps);
        const double s = grid.t_max * static_cast<double>(is) /
                         static_cast<double>(grid.steps);
        const double r = composition_residual(op, k, grid, t, s);
        push("composition", k, "t=" + csv_num(t) + " s=" + csv_num(s), r, tol,
             {grid.step(), 0.0, "product-integration"});
      } else if (check == "semigroup-average") {
        for (cplx mu : {cplx{1.0, 0.0}, cplx{0.0, 2.0}}) {
          const double r = semigroup_average_residual(k, mu, grid);
          push("semigroup-average", k,
               "mu=" + csv_num(mu.real()) + "+" + csv_num(mu.imag()) + "i", r,
               tol, {grid.step(), 0.0, "product-integration"});
        }
      } else if (check == "laplace-criterion") {
        const GridSpec lgrid{12.0, 3072};
        const Trajectory traj = apply_family(op, k, FamilyKind::Cosine, lgrid, {});
        const double r = laplace_criterion_residual(op, k, traj, cplx{2.0, 0.0});
        push("laplace-criterion", k, "lambda=2", r, tol, traj.quadrature);
      } else if (check == "block-semigroup") {
        const BlockSemigroup bs = block_semigroup(op, k, grid);
        push("block-semigroup", k, "four-block identity", bs.max_residual, tol,
             bs.s1.quadrature);
      } else if (check == "weierstrass") {
        if (!k.exp_bound()) {
          push("weierstrass", k, "skipped: kernel carries no exponential bound",
               0.0, weier_threshold, {0.0, 0.0, "none"});
          continue;
        }
        const GridSpec cos_grid{14.0, 9600};
        const Trajectory cos_traj =
            apply_family(op, k, FamilyKind::Cosine, cos_grid, {});
        const WeierstrassResult wr =
            weierstrass_semigroup(cos_traj, op, k, GridSpec{2.0, 32});
        push("weierstrass", k, "gaussian average vs direct semigroup",
             wr.residual, weier_threshold, wr.semigroup.quadrature);
      }
    }
  }

  bool all_pass = true;
  for (const CheckRow& r : rows) all_pass = all_pass && r.pass;

  ordered_json rep;
  rep["schema_version"] = kSchemaVersion;
  rep["tolerance"] = tol;
  rep["grid"] = ordered_json{{"t_max", grid.t_max}, {"steps", grid.steps}};
  rep["operator"] = op.id();
  rep["corruption_injected"] = inject;
  ordered_json arr = ordered_json::array();
  for (const CheckRow& r : rows) {
    ordered_json e;
    e["check"] = r.check;
    e["kernel"] = r.kernel;
    e["detail"] = r.detail;
    e["residual"] = r.residual;
    e["threshold"] = r.threshold;
    e["pass"] = r.pass;
    e["quadrature"] = quadrature_json(r.quadrature);
    arr.push_back(std::move(e));
  }
  rep["checks"] = std::move(arr);
  rep["all_pass"] = all_pass;
  write_file(st.out_dir, "verify_report.json", rep.dump(2) + "\n");

  for (const CheckRow& r : rows)
    std::printf("%s %s [%s] %s residual=%s threshold=%s\n",
                r.pass ? "PASS" : "FAIL", r.check.c_str(), r.kernel.c_str(),
                r.detail.c_str(), csv_num(r.residual).c_str(),
                csv_num(r.threshold).c_str());
  std::printf(all_pass ? "verify: all checks passed\n"
                       : "verify: residual failure\n");
  return all_pass ? kExitOk : kExitVerify;
}

// ---------------------------------------------------------------------------
// reproduce: canned report bundles.
// ---------------------------------------------------------------------------

// Inverse transform of the scalar cosine for a rational-transform kernel by
// a circular contour enclosing every pole (all poles sit in [-64.5, -0.5]
// for the zero set {m^2 : m <= 8}); the integrand decays like lambda^{-2},
// and periodic trapezoid on the circle converges geometrically. Stable for
// every mode, unlike time stepping, which excites the e^{n^2 t} solution of
// the homogeneous equation through roundoff once n^2 is large.
double rational_cosine_value(const Kernel& k, double t, double mu) {
  const std::size_t M = 2048;
  const cplx center{-33.0, 0.0};
  const double R = 34.0;
  cplx acc{0.0, 0.0};
  for (std::size_t j = 0; j < M; ++j) {
    const double phi =
        2.0 * kPi * (static_cast<double>(j) + 0.5) / static_cast<double>(M);
    const cplx e{std::cos(phi), std::sin(phi)};
    const cplx lam = center + R * e;
    const cplx g = k.laplace_continued(lam) * lam / (lam * lam - mu);
    acc += std::exp(lam * t) * g * e;
  }
  return (acc.real() * R) / static_cast<double>(M);
}

// Least-squares slope of -log|Ktilde| against log lambda on [lo, hi].
double transform_decay_exponent(const Kernel& k, double lo, double hi,
                                std::size_t n = 16, const QuadSpec& q = {}) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lam =
        lo * std::pow(hi / lo,
                      static_cast<double>(i) / static_cast<double>(n - 1));
    const double x = std::log(lam);
    const double y = -std::log(std::abs(k.laplace(cplx{lam, 0.0}, q)));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double nn = static_cast<double>(n);
  return (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
}

std::pair<ordered_json, bool> polyharmonic_bundle() {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["example"] = "polyharmonic";
  bool all_ok = true;

  const int N = 8;
  std::vector<cplx> zeros;
  for (int m = 1; m <= N; ++m)
    zeros.push_back(cplx{static_cast<double>(m) * m, 0.0});
  const Kernel k = Kernel::rational_spectrum_zero(zeros, 1);
  const Kernel zero_free = Kernel::riesz(1.0);

  // Bounded modes: the transform zero at m^2 cancels the growing branch of
  // the mode mu = m^4, so every trajectory is a sum of decaying terms.
  ordered_json modes = ordered_json::array();
  double sup_all = 0.0;
  for (int n = 1; n <= N; ++n) {
    const double mu = std::pow(static_cast<double>(n), 4.0);
    double sup_mode = 0.0;
    for (int i = 0; i <= 128; ++i) {
      const double t = static_cast<double>(i) / 128.0;
      sup_mode = std::max(sup_mode, std::abs(rational_cosine_value(k, t, mu)));
    }
    sup_all = std::max(sup_all, sup_mode);
    modes.push_back(ordered_json{{"n", n}, {"mu", mu}, {"sup", sup_mode}});
  }
  const bool bounded_ok = sup_all <= 1e3;
  all_ok = all_ok && bounded_ok;
  j["bounded_run"] = ordered_json{{"kernel", k.id()},
                                  {"t_max", 1.0},
                                  {"modes", modes},
                                  {"sup", sup_all},
                                  {"bound", 1e3},
                                  {"within_bound", bounded_ok}};

  // Cross-check the contour route against the trajectory engine on the
  // modes where time stepping is still stable.
  double cross_diff = 0.0;
  for (int n = 1; n <= 3; ++n) {
    const double mu = std::pow(static_cast<double>(n), 4.0);
    const Trajectory tr = scalar_cosine(k, cplx{mu, 0.0}, GridSpec{1.0, 1024});
    for (std::size_t i = 0; i < tr.time_grid.size(); i += 64) {
      const double ref = rational_cosine_value(k, tr.time_grid[i], mu);
      cross_diff = std::max(cross_diff, std::abs(tr.values[i][0].real() - ref));
    }
  }
  const bool cross_ok = cross_diff <= 1e-3;
  all_ok = all_ok && cross_ok;
  j["contour_vs_trajectory"] =
      ordered_json{{"modes_checked", 3}, {"max_diff", cross_diff},
                   {"threshold", 1e-3}, {"ok", cross_ok}};

  // Zero-free comparison: without the transform zeros the n = 8 mode grows
  // past e^{n^2/2}/2 already at t = 1.
  const double mu8 = 4096.0;
  const Trajectory free_tr =
      scalar_cosine(zero_free, cplx{mu8, 0.0}, GridSpec{1.0, 2048});
  const double free_val = std::abs(free_tr.values.back()[0].real());
  const double lower = 0.5 * std::exp(32.0);
  const bool free_ok = free_val >= lower;
  all_ok = all_ok && free_ok;
  j["zero_free_run"] = ordered_json{{"kernel", zero_free.id()},
                                    {"n", 8},
                                    {"value_at_1", free_val},
                                    {"lower_bound", lower},
                                    {"exceeds_bound", free_ok}};

  // Root-summability of the spectrum: square roots n^2 of the n^4
  // eigenvalues are summable in the Blaschke sense; roots n are not.
  const SummabilityReport sq = blaschke_summability(
      [](double p) { return p * p; }, 200000);
  const SummabilityReport lin =
      blaschke_summability([](double p) { return p; }, 200000);
  const double limit_target = kPi * (std::cosh(kPi) / std::sinh(kPi)) - 1.0;
  const bool blaschke_ok = sq.verdict == "convergent" &&
                           lin.verdict == "divergent" &&
                           std::abs(sq.limit_estimate - limit_target) <= 1e-6;
  all_ok = all_ok && blaschke_ok;
  const auto summ_json = [](const SummabilityReport& r) {
    return ordered_json{{"verdict", r.verdict},
                        {"partial_sum", r.partial_sum},
                        {"tail_estimate", r.tail_estimate},
                        {"limit_estimate", r.limit_estimate},
                        {"terms", r.terms}};
  };
  j["blaschke"] = ordered_json{{"square_roots", summ_json(sq)},
                               {"linear_roots", summ_json(lin)},
                               {"limit_target", limit_target},
                               {"ok", blaschke_ok}};

  // Gaussian-smoothing cascade: apply the Weierstrass transform twice.
  // The first stage's output has an integrable singularity at 0, so no
  // M e^{beta t} bound exists for it; the chain continues through a dense
  // tabulation, whose recorded sup is exactly the carried exponential-bound
  // fit. Each stage halves the transform decay exponent — the kernels
  // coarsen from bounded through increasingly singular.
  const Kernel k0 = Kernel::riesz(1.0);
  const Kernel k1 = weierstrass_kernel(k0);
  double stage1_diff = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double t = 0.01 * std::pow(400.0, i / 19.0);
    const double closed = 1.0 / std::sqrt(kPi * t);
    stage1_diff =
        std::max(stage1_diff, std::abs(k1.evaluate(t).real() - closed));
  }
  std::vector<double> tab_t, tab_v;
  const double t_lo = 1e-8, t_hi = 20.0;
  const std::size_t tab_n = 800;
  for (std::size_t i = 0; i < tab_n; ++i) {
    const double t =
        t_lo * std::pow(t_hi / t_lo,
                        static_cast<double>(i) / static_cast<double>(tab_n - 1));
    tab_t.push_back(t);
    tab_v.push_back(k1.evaluate(t).real());
  }
  const Kernel t1 = Kernel::tabulated(tab_t, tab_v);
  const Kernel k2 = weierstrass_kernel(t1);

  // The double-smoothed transform needs nested quadrature; 1e-5 keeps it
  // well under the 1e-4 identity gate at a fraction of the cost.
  const QuadSpec deep_q{1e-5, 1e-5};
  const double p0 = transform_decay_exponent(k0, 10.0, 1e3);
  const double p1 = transform_decay_exponent(k1, 10.0, 1e3);
  const double p2 = transform_decay_exponent(k2, 10.0, 1e3, 10, deep_q);
  double stage2_identity = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double lam = 1.0 + 99.0 * i / 5.0;
    stage2_identity = std::max(
        stage2_identity,
        std::abs(k2.laplace(cplx{lam, 0.0}, deep_q) -
                 t1.laplace(cplx{std::sqrt(lam), 0.0})));
  }
  const auto bound_json = [](const Kernel& kk) -> ordered_json {
    if (const auto eb = kk.exp_bound())
      return ordered_json{{"M", eb->M}, {"beta", eb->beta}};
    return nullptr;
  };
  ordered_json stages = ordered_json::array();
  stages.push_back(ordered_json{{"kernel", k0.id()},
                                {"exp_bound", bound_json(k0)},
                                {"transform_decay_exponent", p0}});
  stages.push_back(ordered_json{{"kernel", k1.id()},
                                {"closed_form_max_diff", stage1_diff},
                                {"refit", t1.id()},
                                {"refit_exp_bound", bound_json(t1)},
                                {"transform_decay_exponent", p1}});
  stages.push_back(ordered_json{{"kernel", k2.id()},
                                {"identity_vs_previous_stage", stage2_identity},
                                {"transform_decay_exponent", p2}});
  const bool cascade_ok = stage1_diff <= 1e-6 && std::abs(p0 - 1.0) <= 0.05 &&
                          std::abs(p1 - 0.5) <= 0.05 &&
                          std::abs(p2 - 0.25) <= 0.05 &&
                          stage2_identity <= 1e-4;
  all_ok = all_ok && cascade_ok;
  j["weierstrass_cascade"] = ordered_json{
      {"stages", stages},
      {"note",
       "each smoothing stage halves the transform decay exponent; the "
       "kernels coarsen from bounded toward stronger origin singularities, "
       "so every further stage needs a fresh exponential-bound fit"},
      {"ok", cascade_ok}};

  j["all_ok"] = all_ok;
  return {j, all_ok};
}

std::pair<ordered_json, bool> beals_bundle() {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["example"] = "beals";
  bool all_ok = true;

  const SpectralOperator op = SpectralOperator::named("beals-squared");
  const WeightSequence s15 = WeightSequence::gevrey_factorial(1.5);
  const WeightSequence s20 = WeightSequence::gevrey_factorial(2.0);

  const double delta = 2.0 / 3.0;
  const double alpha = 0.05, beta = 20.0, t = 0.1;
  const ContourResult cr = contour_cosine(op, delta, s15, alpha, beta, t, {});
  const bool time_ok = t <= cr.time_bound;
  const bool contour_ok = cr.residual <= 1e-4 && time_ok;
  all_ok = all_ok && contour_ok;

  // Independent cross-check of one spectrum sample against the oracle.
  const std::size_t probe = 2730;
  const cplx mu = op.points()[probe];
  const Trajectory oracle = volterra_oracle(Kernel::gevrey(delta), mu,
                                            FamilyKind::Cosine,
                                            GridSpec{t, 512});
  const double oracle_diff =
      std::abs(cr.values[probe] -
               op.c_weights()[probe] * oracle.values.back()[0]);
  const bool oracle_ok = oracle_diff <= 1e-4;
  all_ok = all_ok && oracle_ok;
  j["contour"] = ordered_json{{"delta", delta},
                              {"alpha", alpha},
                              {"beta", beta},
                              {"t", t},
                              {"time_bound", cr.time_bound},
                              {"within_time_bound", time_ok},
                              {"contour_nodes", cr.contour_nodes},
                              {"residual_vs_direct", cr.residual},
                              {"probe_index", probe},
                              {"residual_vs_oracle", oracle_diff},
                              {"ok", contour_ok && oracle_ok}};

  // Classification triple.
  const Verdict u15b = ultradistribution_sine_check(op, s15, GrowthMode::Beurling,
                                                    default_k_grid());
  const Verdict u15r = ultradistribution_sine_check(op, s15, GrowthMode::Roumieu,
                                                    default_k_grid());
  const Verdict u20b = ultradistribution_sine_check(op, s20, GrowthMode::Beurling,
                                                    default_k_grid());
  const Verdict u20r = ultradistribution_sine_check(op, s20, GrowthMode::Roumieu,
                                                    default_k_grid());
  const Verdict integ = integrated_cosine_check(op, default_alpha_grid(),
                                                default_beta_grid(), 4);
  const auto entry = [](const Verdict& v, VerdictKind expected) {
    return ordered_json{{"class", v.klass},
                        {"verdict", verdict_str(v.kind)},
                        {"expected", verdict_str(expected)},
                        {"matches", v.kind == expected},
                        {"detail", v.detail}};
  };
  const bool triple_ok =
      u15b.kind == VerdictKind::Pass && u15r.kind == VerdictKind::Pass &&
      u20b.kind == VerdictKind::Pass && u20r.kind == VerdictKind::Fail &&
      integ.kind == VerdictKind::Fail;
  all_ok = all_ok && triple_ok;
  j["classification"] =
      ordered_json{{"s15_beurling", entry(u15b, VerdictKind::Pass)},
                   {"s15_roumieu", entry(u15r, VerdictKind::Pass)},
                   {"s20_beurling", entry(u20b, VerdictKind::Pass)},
                   {"s20_roumieu", entry(u20r, VerdictKind::Fail)},
                   {"integrated", entry(integ, VerdictKind::Fail)},
                   {"ok", triple_ok}};

  j["all_ok"] = all_ok;
  return {j, all_ok};
}

int cmd_reproduce(const RunSettings& st, const ordered_json& cfg) {
  const std::string example = jstr(cfg, "example", "");
  if (example.empty())
    throw config_error(
        "config needs 'example': one of 'polyharmonic', 'beals'");
  std::pair<ordered_json, bool> bundle;
  std::string file;
  if (example == "polyharmonic") {
    bundle = polyharmonic_bundle();
    file = "reproduce_polyharmonic.json";
  } else if (example == "beals") {
    bundle = beals_bundle();
    file = "reproduce_beals.json";
  } else {
    throw config_error("unknown reproduce example: " + example);
  }
  write_file(st.out_dir, file, bundle.first.dump(2) + "\n");
  std::printf("reproduce %s: %s\n", example.c_str(),
              bundle.second ? "all checks passed" : "CHECK FAILURE");
  return bundle.second ? kExitOk : kExitVerify;
}

}  // namespace

int run_cli(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");  // deterministic number formatting

  CLI::App app{"numerical laboratory for convoluted evolution families"};
  app.require_subcommand(1);

  std::string config_path, out_flag;
  double tol_flag = 1e-6;
  std::size_t steps_flag = 256;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out_flag, "output directory");
    sub->add_option("--tolerance", tol_flag, "residual/quadrature tolerance");
    sub->add_option("--steps", steps_flag, "time-grid steps (>= 16)");
  };
  CLI::App* sub_kernel =
      app.add_subcommand("kernel", "tabulate a kernel, Theta, and transform");
  CLI::App* sub_classify =
      app.add_subcommand("classify", "generation-class report for an operator");
  CLI::App* sub_simulate =
      app.add_subcommand("simulate", "run one convoluted family");
  CLI::App* sub_verify =
      app.add_subcommand("verify", "residual suite over the kernel matrix");
  CLI::App* sub_reproduce =
      app.add_subcommand("reproduce", "canned example report bundles");
  for (CLI::App* sub :
       {sub_kernel, sub_classify, sub_simulate, sub_verify, sub_reproduce})
    add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    const CLI::App* active = app.get_subcommands().front();
    const ordered_json cfg = load_config(config_path);
    if (!cfg.is_object())
      throw config_error("config file must hold a JSON object");

    RunSettings st;
    st.command = active->get_name();
    st.config_path = config_path;
    // Precedence: defaults, then the config file, then explicit flags.
    st.out_dir = jstr(cfg, "out", st.out_dir);
    if (cfg.contains("grid")) {
      const ordered_json& g = cfg.at("grid");
      if (!g.is_object())
        throw config_error("config 'grid': expected an object");
      st.t_max = jnum(g, "t_max", st.t_max);
      st.steps = juint(g, "steps", st.steps);
      st.tolerance = jnum(g, "tolerance", st.tolerance);
    }
    if (active->count("--out") > 0) st.out_dir = out_flag;
    if (active->count("--steps") > 0) st.steps = steps_flag;
    if (active->count("--tolerance") > 0) st.tolerance = tol_flag;
    validate_settings(st);

    if (st.command == "kernel") return cmd_kernel(st, cfg);
    if (st.command == "classify") return cmd_classify(st, cfg);
    if (st.command == "simulate") return cmd_simulate(st, cfg);
    if (st.command == "verify") return cmd_verify(st, cfg);
    if (st.command == "reproduce") return cmd_reproduce(st, cfg);
    throw config_error("unknown command: " + st.command);
  } catch (const config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const numeric_error& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
}

}  // namespace convolab
