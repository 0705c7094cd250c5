#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "oqs/collective.hpp"
#include "oqs/lindblad.hpp"
#include "oqs/meanfield.hpp"
#include "oqs/opspec.hpp"
#include "oqs/response.hpp"
#include "oqs/symmetry.hpp"

namespace oqs::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;
constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitInput = 2;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct Options {
  std::string model_path;
  bool gamma_set = false;
  bool attraction_set = false;
  bool mu_set = false;
  double total_time = 10.0;
  double dt = 1e-2;
  double gamma = -1.0;  // negative: command-specific default
  double attraction = -1.0;
  double mu = 1.0;
  int grid_size = 512;
  double cutoff = -1.0;  // default 3 k_F
  double qmin = -1.0, qmax = -1.0;
  int qsteps = 8;
  int samples = 1000;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string format = "csv";
  std::string initial = "blockdiag";
};

// Parses and validates the model file; CLI flags take precedence over the
// file's [hamiltonian] parameters and dissipator rates.
opspec::ModelSpec load_model(const std::string& path, const Options& opt) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  opspec::ModelSpec spec = opspec::parse_model(ss.str());
  if (opt.attraction_set) spec.interaction = opt.attraction;
  if (opt.mu_set) spec.chemical_potential = opt.mu;
  if (opt.gamma_set)
    for (auto& d : spec.dissipators) d.rate = opt.gamma;
  auto issues = opspec::validate(spec);
  if (!issues.empty()) {
    std::string msg = "invalid model:";
    for (const auto& s : issues) msg += "\n  " + s;
    throw std::runtime_error(msg);
  }
  return spec;
}

fock::Matrix initial_state(const std::string& kind,
                           const fock::SiteOps& ops, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  if (kind == "blockdiag") return fock::random_block_diagonal_density(ops, rng);
  if (kind == "random") return fock::random_density_matrix(ops.dim(), rng);
  if (kind == "coherent") {
    // equal mixture of a number-block-diagonal state and a pure
    // superposition of vacuum with the fully occupied state
    fock::Matrix bd = fock::random_block_diagonal_density(ops, rng);
    fock::Vector psi = fock::Vector::Zero(ops.dim());
    psi(0) = 1.0 / std::sqrt(2.0);
    psi(ops.dim() - 1) = 1.0 / std::sqrt(2.0);
    fock::Matrix coh = psi * psi.adjoint();
    return 0.5 * bd + 0.5 * coh;
  }
  throw std::runtime_error("unknown initial state kind: " + kind);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

// CSV goes to --out (or stdout with --format csv); the JSON summary goes to
// stdout unless it is the selected stdout payload.
void emit(const Options& opt, const std::string& csv, const json& summary) {
  if (!opt.out_path.empty()) {
    write_text(opt.out_path, csv);
    std::cout << summary.dump(2) << "\n";
  } else if (opt.format == "csv") {
    std::cout << csv;
  } else {
    std::cout << summary.dump(2) << "\n";
  }
}

json config_echo(const Options& opt) {
  json c;
  if (!opt.model_path.empty()) c["model"] = opt.model_path;
  c["T"] = opt.total_time;
  c["dt"] = opt.dt;
  if (opt.gamma >= 0.0) c["gamma"] = opt.gamma;
  if (opt.attraction >= 0.0) c["U"] = opt.attraction;
  c["mu"] = opt.mu;
  c["grid"] = opt.grid_size;
  if (opt.cutoff > 0.0) c["cutoff"] = opt.cutoff;
  c["seed"] = opt.seed;
  c["format"] = opt.format;
  return c;
}

int cmd_simulate(const Options& opt) {
  opspec::ModelSpec spec = load_model(opt.model_path, opt);
  lindblad::Liouvillian liou = lindblad::build_liouvillian(spec);
  fock::Matrix rho0 = initial_state(opt.initial, liou.ops, opt.seed);

  lindblad::EvolveOptions eopts;
  eopts.total_time = opt.total_time;
  eopts.dt0 = opt.dt;
  lindblad::Trajectory traj = lindblad::evolve(liou, rho0, eopts);
  std::vector<double> residual =
      liou.all_dissipators_on_site
          ? lindblad::continuity_residual_series(traj, liou)
          : std::vector<double>(traj.records.size(),
                                std::numeric_limits<double>::quiet_NaN());

  std::string csv = "t,N,ON_direct,ON_vec,ON_swap,trace,residual_max\n";
  for (std::size_t i = 0; i < traj.records.size(); ++i) {
    const auto& r = traj.records[i];
    csv += fmt(r.t) + "," + fmt(r.n_total) + "," + fmt(r.on_direct) + "," +
           fmt(r.on_vectorized) + "," + fmt(r.on_swap) + "," + fmt(r.trace) +
           "," + fmt(residual[i]) + "\n";
  }

  const auto& first = traj.records.front();
  double n_drift = 0.0, on_drift = 0.0;
  for (const auto& r : traj.records) {
    n_drift = std::max(n_drift, std::abs(r.n_total - first.n_total));
    on_drift = std::max(on_drift, std::abs(r.on_direct - first.on_direct));
  }
  double res_max = 0.0;
  for (double x : residual)
    if (std::isfinite(x)) res_max = std::max(res_max, x);

  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["command"] = "simulate";
  summary["config"] = config_echo(opt);
  summary["config"]["initial"] = opt.initial;
  summary["rows"] = traj.records.size();
  summary["dt_accepted"] = traj.dt;
  summary["halvings"] = traj.halvings_used;
  summary["N_drift"] = n_drift;
  summary["ON_drift"] = on_drift;
  summary["trace_drift_rate"] = traj.max_trace_drift_rate;
  summary["residual_max"] = res_max;
  emit(opt, csv, summary);
  return traj.max_trace_drift_rate < 1e-10 ? kExitOk : kExitAssertion;
}

int cmd_classify(const Options& opt) {
  opspec::ModelSpec spec = load_model(opt.model_path, opt);
  lindblad::Liouvillian liou = lindblad::build_liouvillian(spec);
  fock::Matrix rho0 = initial_state(opt.initial, liou.ops, opt.seed);

  lindblad::EvolveOptions eopts;
  eopts.dt0 = opt.dt;
  symmetry::SimulationReport rep =
      symmetry::verify_by_simulation(spec, rho0, opt.total_time, &eopts);

  json out;
  out["schema_version"] = kSchemaVersion;
  out["command"] = "classify";
  out["config"] = config_echo(opt);
  out["config"]["initial"] = opt.initial;
  out["class"] = symmetry::to_string(rep.classification.cls);
  out["commutator_norms"] = {
      {"hamiltonian", rep.classification.diagnostics.hamiltonian_commutator},
      {"max_jump", rep.classification.diagnostics.max_jump_commutator},
      {"superoperator", rep.classification.diagnostics.superop_commutator}};
  out["prediction"] = {{"N_conserved", rep.prediction.n_conserved},
                       {"ON_conserved", rep.prediction.on_conserved},
                       {"gauge_invariant", rep.prediction.gauge_invariant}};
  out["simulation"] = {{"N_drift", rep.n_drift},
                       {"ON_drift", rep.on_drift},
                       {"verdict", symmetry::to_string(rep.overall)}};
  if (!opt.out_path.empty())
    write_text(opt.out_path, out.dump(2) + "\n");
  else
    std::cout << out.dump(2) << "\n";
  return rep.overall == symmetry::Verdict::mismatch ? kExitAssertion
                                                    : kExitOk;
}

int cmd_bcs(const Options& opt) {
  MomentumGrid grid = MomentumGrid::make_uniform(
      opt.grid_size, opt.mu,
      opt.cutoff > 0.0 ? opt.cutoff : 3.0 * std::sqrt(opt.mu));
  const double attraction =
      opt.attraction > 0.0
          ? opt.attraction
          : meanfield::attraction_for_gap(0.1 * opt.mu, grid);
  const double gamma = opt.gamma >= 0.0 ? opt.gamma : 0.0;
  const double delta0 = meanfield::solve_gap(attraction, grid);
  meanfield::BcsState state = meanfield::init_bcs(delta0, grid);

  meanfield::BcsRunOptions ropts;
  ropts.total_time = opt.total_time;
  ropts.dt0 = opt.dt;
  auto rows = meanfield::evolve_bcs(state, attraction, gamma, grid, ropts);

  std::string csv = "t,Re(Delta),Im(Delta),absDelta,N,ON_mf\n";
  for (const auto& r : rows)
    csv += fmt(r.t) + "," + fmt(r.delta.real()) + "," + fmt(r.delta.imag()) +
           "," + fmt(std::abs(r.delta)) + "," + fmt(r.n) + "," + fmt(r.on) +
           "\n";

  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["command"] = "bcs";
  summary["config"] = config_echo(opt);
  summary["config"]["U"] = attraction;
  summary["config"]["gamma"] = gamma;
  summary["delta0"] = delta0;
  summary["N_initial"] = rows.front().n;
  summary["N_final"] = rows.back().n;
  summary["ON_initial"] = rows.front().on;
  summary["ON_final"] = rows.back().on;
  summary["absDelta_final"] = std::abs(rows.back().delta);
  emit(opt, csv, summary);
  return kExitOk;
}

int cmd_ngmode(const Options& opt) {
  const double kf = std::sqrt(opt.mu);
  MomentumGrid grid = MomentumGrid::make_uniform(
      opt.grid_size, opt.mu, opt.cutoff > 0.0 ? opt.cutoff : 3.0 * kf);
  const double attraction =
      opt.attraction > 0.0
          ? opt.attraction
          : meanfield::attraction_for_gap(0.1 * opt.mu, grid);
  const double delta = meanfield::solve_gap(attraction, grid);
  const double density = response::density_from_greens(delta, grid);
  const double gamma =
      opt.gamma >= 0.0 ? opt.gamma : 0.01 * delta / density;

  const double qmin = opt.qmin > 0.0 ? opt.qmin : 0.001 * kf;
  const double qmax = opt.qmax > 0.0 ? opt.qmax : 0.05 * kf;
  std::vector<double> qs(opt.qsteps);
  for (int i = 0; i < opt.qsteps; ++i)
    qs[i] = opt.qsteps == 1
                ? qmin
                : qmin + (qmax - qmin) * i / (opt.qsteps - 1.0);

  collective::SoundVelocityFit vfit =
      collective::solve_sound_velocity(qs, delta, grid);
  collective::DiffusionFit dfit =
      collective::diffusion_numeric(qs, gamma, density, delta, grid);

  std::string csv = "q,q0_root,f_q,D_est,D_analytic\n";
  for (std::size_t i = 0; i < dfit.points.size(); ++i) {
    const auto& p = dfit.points[i];
    csv += fmt(p.q) + "," + fmt(p.q0_root) + "," + fmt(p.f) + "," +
           fmt(gamma * density * p.f_over_q2) + "," + fmt(dfit.d_analytic) +
           "\n";
  }

  const double rel_err =
      std::abs(vfit.v_s - vfit.v_s_analytic) / vfit.v_s_analytic;
  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["command"] = "ngmode";
  summary["config"] = config_echo(opt);
  summary["config"]["U"] = attraction;
  summary["config"]["gamma"] = gamma;
  summary["config"]["qmin"] = qmin;
  summary["config"]["qmax"] = qmax;
  summary["config"]["qsteps"] = opt.qsteps;
  summary["delta"] = delta;
  summary["density"] = density;
  summary["v_s_fit"] = vfit.v_s;
  summary["v_s_analytic"] = vfit.v_s_analytic;
  summary["D_fit"] = dfit.d_estimate;
  summary["D_analytic"] = dfit.d_analytic;
  summary["rel_err"] = rel_err;
  summary["D_rel_err"] =
      std::abs(dfit.d_estimate - dfit.d_analytic) / dfit.d_analytic;
  emit(opt, csv, summary);
  return rel_err < 0.01 ? kExitOk : kExitAssertion;
}

int cmd_wtcheck(const Options& opt) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  double max_residual = 0.0;
  for (int s = 0; s < opt.samples; ++s) {
    response::NambuGreens g;
    g.mu = opt.mu;
    g.delta = 0.05 + 0.95 * uni(rng);
    g.gamma_n = 10.0 * g.delta * uni(rng);
    const double k = 0.05 + 2.5 * uni(rng);
    const double q = -0.5 + 1.0 * uni(rng);
    const double omega = -3.0 + 6.0 * uni(rng);
    const double q0 = -1.0 + 2.0 * uni(rng);
    try {
      max_residual = std::max(
          max_residual, response::wt_vertex_check(g, k, q, omega, omega + q0));
    } catch (const response::SingularPoint&) {
      --s;  // resample pole hits
    }
  }

  double gauge_delta = 0.0, transversality = 0.0;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int s = 0; s < opt.samples; ++s) {
    Eigen::Vector3d q(gauss(rng), gauss(rng), gauss(rng));
    if (q.norm() < 1e-3) {
      --s;
      continue;
    }
    Eigen::Vector3cd a;
    for (int i = 0; i < 3; ++i)
      a(i) = std::complex<double>(gauss(rng), gauss(rng));
    const std::complex<double> phi(gauss(rng), gauss(rng));
    const double density = 0.1 + uni(rng);
    auto j1 = response::response_current(q, a, density, 0.5);
    Eigen::Vector3cd shifted =
        a + std::complex<double>(0.0, 1.0) * phi * q.cast<std::complex<double>>();
    auto j2 = response::response_current(q, shifted, density, 0.5);
    gauge_delta =
        std::max(gauge_delta, (j1.spatial - j2.spatial).cwiseAbs().maxCoeff());
    transversality = std::max(
        transversality, std::abs(q.cast<std::complex<double>>().dot(j1.spatial)));
  }

  json out;
  out["schema_version"] = kSchemaVersion;
  out["command"] = "wtcheck";
  out["config"] = config_echo(opt);
  out["config"]["samples"] = opt.samples;
  out["samples"] = opt.samples;
  out["max_residual"] = max_residual;
  out["gauge_shift_max_delta"] = gauge_delta;
  out["transversality_max"] = transversality;
  if (!opt.out_path.empty())
    write_text(opt.out_path, out.dump(2) + "\n");
  else
    std::cout << out.dump(2) << "\n";
  return (max_residual < 1e-12 && gauge_delta < 1e-14 &&
          transversality < 1e-14)
             ? kExitOk
             : kExitAssertion;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Lindblad workbench: exact small-lattice open-system dynamics "
               "and the dissipative-BCS response tier"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--T", opt.total_time, "total evolution time");
    sub->add_option("--dt", opt.dt, "initial integrator step");
    sub->add_option("--gamma", opt.gamma, "dissipation rate");
    sub->add_option("--U", opt.attraction, "attractive interaction strength");
    sub->add_option("--mu", opt.mu, "chemical potential");
    sub->add_option("--grid", opt.grid_size, "momentum grid size");
    sub->add_option("--cutoff", opt.cutoff, "momentum cutoff (default 3 k_F)");
    sub->add_option("--qmin", opt.qmin, "smallest probe wavenumber");
    sub->add_option("--qmax", opt.qmax, "largest probe wavenumber");
    sub->add_option("--qsteps", opt.qsteps, "number of probe wavenumbers");
    sub->add_option("--out", opt.out_path, "output file path");
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--format", opt.format, "stdout payload: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--samples", opt.samples, "number of randomized samples");
    sub->add_option("--initial", opt.initial,
                    "initial state: blockdiag, random, coherent")
        ->check(CLI::IsMember({"blockdiag", "random", "coherent"}));
  };

  CLI::App* simulate = app.add_subcommand(
      "simulate", "evolve a lattice model and export the trajectory");
  simulate->add_option("--model", opt.model_path, "model file (*.lgm)")
      ->required();
  add_common(simulate);

  CLI::App* classify = app.add_subcommand(
      "classify", "classify the model symmetry and verify by simulation");
  classify->add_option("--model", opt.model_path, "model file (*.lgm)")
      ->required();
  add_common(classify);

  CLI::App* bcs =
      app.add_subcommand("bcs", "dissipative mean-field BCS dynamics");
  add_common(bcs);

  CLI::App* ngmode = app.add_subcommand(
      "ngmode", "collective-mode dispersion: sound velocity and diffusion");
  add_common(ngmode);

  CLI::App* wtcheck = app.add_subcommand(
      "wtcheck", "randomized vertex-identity and gauge-invariance sweeps");
  add_common(wtcheck);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  for (CLI::App* sub : {simulate, classify, bcs, ngmode, wtcheck})
    if (sub->parsed()) {
      opt.gamma_set = sub->count("--gamma") > 0;
      opt.attraction_set = sub->count("--U") > 0;
      opt.mu_set = sub->count("--mu") > 0;
    }

  try {
    if (simulate->parsed()) return cmd_simulate(opt);
    if (classify->parsed()) return cmd_classify(opt);
    if (bcs->parsed()) return cmd_bcs(opt);
    if (ngmode->parsed()) return cmd_ngmode(opt);
    if (wtcheck->parsed()) return cmd_wtcheck(opt);
  } catch (const opspec::ParseError& e) {
    std::cerr << (opt.model_path.empty() ? "" : opt.model_path + ":")
              << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    const std::string what = e.what();
    if (what.find("cannot open") != std::string::npos ||
        what.find("invalid model") != std::string::npos)
      return kExitInput;
    return kExitAssertion;
  }
  return kExitInput;
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> storage = args;
  storage.insert(storage.begin(), "oqs");
  std::vector<char*> argv;
  argv.reserve(storage.size());
  for (auto& s : storage) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace oqs::cli
