#include "oqs/lindblad.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>

namespace oqs::lindblad {

using fock::Complex;
using fock::Matrix;
using fock::SparseOp;
using fock::Vector;
using opspec::Spin;

namespace {

constexpr Eigen::Index kMaxSuperDim = 4096;

SparseOp sparse_identity(Eigen::Index dim) {
  SparseOp id(dim, dim);
  id.setIdentity();
  return id;
}

// Tr[A rho] from the vectorized state, vec[i*dim+j] = rho_ij.
Complex trace_with(const SparseOp& a, const Vector& vec, Eigen::Index dim) {
  Complex out(0.0, 0.0);
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseOp::InnerIterator it(a, k); it; ++it)
      out += it.value() * vec(it.col() * dim + it.row());
  return out;
}

// Tr[M (rho (x) rho)] for a sparse doubled-space M.
Complex doubled_trace(const SparseOp& m, const Matrix& rho) {
  const Eigen::Index d = rho.rows();
  Complex out(0.0, 0.0);
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseOp::InnerIterator it(m, k); it; ++it) {
      const Eigen::Index i1 = it.row() / d, i2 = it.row() % d;
      const Eigen::Index j1 = it.col() / d, j2 = it.col() % d;
      out += it.value() * rho(j1, i1) * rho(j2, i2);
    }
  return out;
}

std::optional<int> single_site_support(const opspec::Expr& e) {
  std::set<int> sites;
  std::function<void(const opspec::Expr&)> walk = [&](const opspec::Expr& x) {
    if (x.kind() == opspec::Expr::Kind::atom)
      sites.insert(x.op_atom().site);
    else if (x.kind() == opspec::Expr::Kind::sum ||
             x.kind() == opspec::Expr::Kind::product)
      for (const auto& c : x.children()) walk(c);
  };
  walk(e);
  if (sites.size() == 1) return *sites.begin();
  return std::nullopt;
}

}  // namespace

SparseOp build_hamiltonian(const opspec::ModelSpec& spec,
                           const fock::SiteOps& ops) {
  const Eigen::Index dim = ops.dim();
  SparseOp h(dim, dim);
  const int L = spec.num_sites;
  // hopping bonds; a 2-site periodic ring is treated as a single bond
  std::vector<std::pair<int, int>> bonds;
  for (int r = 0; r + 1 < L; ++r) bonds.push_back({r, r + 1});
  if (spec.boundary == opspec::Boundary::periodic && L > 2)
    bonds.push_back({L - 1, 0});
  for (auto [r, rp] : bonds)
    for (Spin s : {Spin::up, Spin::dn}) {
      SparseOp hop(ops.create(rp, s) * ops.annihilate(r, s));
      h -= spec.hopping * SparseOp(hop + SparseOp(hop.adjoint()));
    }
  for (int r = 0; r < L; ++r)
    h -= spec.interaction *
         SparseOp(ops.number(r, Spin::up) * ops.number(r, Spin::dn));
  h -= spec.chemical_potential * ops.total_number();
  return h;
}

Liouvillian build_liouvillian(const opspec::ModelSpec& spec) {
  auto issues = opspec::validate(spec);
  if (!issues.empty())
    throw std::invalid_argument("build_liouvillian: invalid spec: " +
                                issues.front());
  fock::SiteOps ops(spec.num_sites);
  const Eigen::Index dim = ops.dim();
  if (dim * dim > kMaxSuperDim)
    throw std::invalid_argument(
        "build_liouvillian: capacity exceeded, superoperator dim " +
        std::to_string(dim * dim) + " > " + std::to_string(kMaxSuperDim));

  Liouvillian out{spec, std::move(ops), dim, {}, {}, {}, {}, {},
                  {}, {}, {}, {}, {}, {}, {}, {}, true};
  const auto& so = out.ops;
  out.hamiltonian = build_hamiltonian(spec, so);

  const SparseOp id = sparse_identity(dim);
  SparseOp lmat =
      SparseOp(Complex(0.0, -1.0) *
               (fock::kronecker(out.hamiltonian, id) -
                fock::kronecker(id, SparseOp(out.hamiltonian.transpose()))));
  for (const auto& d : spec.dissipators) {
    SparseOp l = fock::compile(d.op, so);
    SparseOp ldl(SparseOp(l.adjoint()) * l);
    lmat += d.rate * SparseOp(fock::kronecker(l, SparseOp(l.conjugate())) -
                              0.5 * (fock::kronecker(ldl, id) +
                                     fock::kronecker(
                                         id, SparseOp(ldl.transpose()))));
    out.jump_ops.push_back(std::move(l));
    out.rates.push_back(d.rate);
    auto site = single_site_support(d.op);
    out.jump_site.push_back(site);
    if (!site) out.all_dissipators_on_site = false;
  }
  out.matrix = std::move(lmat);

  const SparseOp& n_tot = so.total_number();
  out.number_superop =
      SparseOp(fock::kronecker(n_tot, id) -
               fock::kronecker(id, SparseOp(n_tot.transpose())));
  SparseOp swap = fock::swap_operator(dim);
  out.swap_nn = SparseOp(fock::kronecker(n_tot, n_tot) * swap);
  out.swap_n2 = SparseOp(fock::kronecker(SparseOp(n_tot * n_tot), id) * swap);

  const int L = spec.num_sites;
  for (int r = 0; r < L; ++r) {
    out.site_density.push_back(so.site_density(r));
    out.double_occupancy.push_back(
        SparseOp(so.number(r, Spin::up) * so.number(r, Spin::dn)));
  }
  std::vector<std::pair<int, int>> bonds;
  for (int r = 0; r + 1 < L; ++r) bonds.push_back({r, r + 1});
  if (spec.boundary == opspec::Boundary::periodic && L > 2)
    bonds.push_back({L - 1, 0});
  for (auto [r, rp] : bonds) {
    SparseOp j(dim, dim);
    for (Spin s : {Spin::up, Spin::dn}) {
      SparseOp hop(so.create(rp, s) * so.annihilate(r, s));
      j += SparseOp(Complex(0.0, 1.0) * spec.hopping *
                    SparseOp(hop - SparseOp(hop.adjoint())));
    }
    out.bond_current.push_back(std::move(j));
    out.bonds.push_back({r, rp});
  }
  // div j_d at site r: -(gamma/2) (L^dag [n_r, L] - [n_r, L^dag] L)
  for (int r = 0; r < L; ++r) {
    SparseOp acc(dim, dim);
    for (std::size_t k = 0; k < out.jump_ops.size(); ++k) {
      if (!out.jump_site[k] || *out.jump_site[k] != r) continue;
      const SparseOp& l = out.jump_ops[k];
      SparseOp ldag(l.adjoint());
      SparseOp nr = so.site_density(r);
      SparseOp comm(nr * l - l * nr);
      SparseOp commd(nr * ldag - ldag * nr);
      acc += SparseOp(-0.5 * out.rates[k] *
                      SparseOp(SparseOp(ldag * comm) - SparseOp(commd * l)));
    }
    out.jd_divergence.push_back(std::move(acc));
  }
  return out;
}

double observable_number(const Matrix& rho, const fock::SiteOps& ops) {
  return (Matrix(ops.total_number()) * rho).trace().real();
}

double observable_on_direct(const Matrix& rho, const fock::SiteOps& ops) {
  Matrix n = Matrix(ops.total_number());
  Matrix nr = n * rho;
  return (nr * nr).trace().real() - (n * nr * rho).trace().real();
}

double observable_on_vectorized(const Matrix& rho, const fock::SiteOps& ops) {
  const Eigen::Index dim = ops.dim();
  SparseOp id = sparse_identity(dim);
  const SparseOp& n = ops.total_number();
  SparseOp nsup(fock::kronecker(n, id) -
                fock::kronecker(id, SparseOp(n.transpose())));
  Vector v = fock::vectorize(rho);
  Vector w = nsup * v;
  return -0.5 * (v.adjoint() * (nsup * w))(0).real();
}

double observable_on_swap(const Matrix& rho, const fock::SiteOps& ops) {
  const Eigen::Index dim = ops.dim();
  if (dim * dim > kMaxSuperDim)
    throw std::invalid_argument(
        "observable_on_swap: capacity exceeded for doubled space");
  SparseOp id = sparse_identity(dim);
  const SparseOp& n = ops.total_number();
  SparseOp swap = fock::swap_operator(dim);
  SparseOp nn(fock::kronecker(n, n) * swap);
  SparseOp n2(fock::kronecker(SparseOp(n * n), id) * swap);
  return doubled_trace(nn, rho).real() - doubled_trace(n2, rho).real();
}

namespace {

ObservableRecord make_record(const Liouvillian& liou, double t,
                             const Vector& vec) {
  const Eigen::Index dim = liou.dim;
  ObservableRecord rec;
  rec.t = t;
  Complex tr(0.0, 0.0);
  for (Eigen::Index i = 0; i < dim; ++i) tr += vec(i * dim + i);
  rec.trace = tr.real();
  rec.n_total = trace_with(liou.ops.total_number(), vec, dim).real();

  Matrix rho = fock::devectorize(vec, dim);
  Matrix n = Matrix(liou.ops.total_number());
  Matrix nr = n * rho;
  rec.on_direct =
      (nr * nr).trace().real() - (n * nr * rho).trace().real();
  Vector w = liou.number_superop * vec;
  rec.on_vectorized =
      -0.5 * (vec.adjoint() * (liou.number_superop * w))(0).real();
  rec.on_swap = doubled_trace(liou.swap_nn, rho).real() -
                doubled_trace(liou.swap_n2, rho).real();

  for (const auto& op : liou.site_density)
    rec.site_density.push_back(trace_with(op, vec, dim).real());
  for (const auto& op : liou.double_occupancy)
    rec.double_occupancy.push_back(trace_with(op, vec, dim).real());
  for (const auto& op : liou.bond_current)
    rec.bond_current.push_back(trace_with(op, vec, dim).real());
  for (const auto& op : liou.jd_divergence)
    rec.jd_divergence.push_back(trace_with(op, vec, dim).real());
  return rec;
}

struct RunResult {
  std::vector<ObservableRecord> records;
  std::vector<double> snapshot_times;
  std::vector<Matrix> snapshots;
  double max_trace_drift_rate;
};

RunResult run_fixed_step(const Liouvillian& liou, const Vector& v0, double T,
                         long steps, int max_snapshots) {
  const double dt = steps > 0 ? T / static_cast<double>(steps) : 0.0;
  const Eigen::Index dim = liou.dim;
  RunResult out;
  out.max_trace_drift_rate = 0.0;
  Vector v = v0;
  out.records.push_back(make_record(liou, 0.0, v));
  long stride = std::max<long>(1, steps / std::max(1, max_snapshots - 1));
  out.snapshot_times.push_back(0.0);
  out.snapshots.push_back(fock::devectorize(v, dim));
  Vector k1(v.size()), k2(v.size()), k3(v.size()), k4(v.size());
  const double trace0 = out.records.front().trace;
  for (long s = 1; s <= steps; ++s) {
    k1 = liou.matrix * v;
    k2 = liou.matrix * Vector(v + (0.5 * dt) * k1);
    k3 = liou.matrix * Vector(v + (0.5 * dt) * k2);
    k4 = liou.matrix * Vector(v + dt * k3);
    v += (dt / 6.0) * Vector(k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t = static_cast<double>(s) * dt;
    out.records.push_back(make_record(liou, t, v));
    if (s % stride == 0 || s == steps) {
      out.snapshot_times.push_back(t);
      out.snapshots.push_back(fock::devectorize(v, dim));
    }
    if (t > 0.0)
      out.max_trace_drift_rate =
          std::max(out.max_trace_drift_rate,
                   std::abs(out.records.back().trace - trace0) / t);
  }
  return out;
}

double refinement_drift(const std::vector<ObservableRecord>& coarse,
                        const std::vector<ObservableRecord>& fine) {
  double drift = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const auto& a = coarse[i];
    const auto& b = fine[2 * i];
    drift = std::max(drift, std::abs(a.n_total - b.n_total));
    drift = std::max(drift, std::abs(a.on_direct - b.on_direct));
    drift = std::max(drift, std::abs(a.trace - b.trace));
  }
  return drift;
}

}  // namespace

Trajectory evolve(const Liouvillian& liou, const Matrix& rho0,
                  const EvolveOptions& opts) {
  if (opts.dt0 <= 0.0) throw std::invalid_argument("evolve: dt0 must be > 0");
  if (opts.total_time < 0.0)
    throw std::invalid_argument("evolve: total_time must be >= 0");
  if (rho0.rows() != liou.dim || rho0.cols() != liou.dim)
    throw std::invalid_argument("evolve: state dimension mismatch");

  Vector v0 = fock::vectorize(rho0);
  Trajectory traj;
  if (opts.total_time == 0.0) {
    auto res = run_fixed_step(liou, v0, 0.0, 0, opts.max_snapshots);
    traj.records = std::move(res.records);
    traj.snapshot_times = std::move(res.snapshot_times);
    traj.snapshots = std::move(res.snapshots);
    return traj;
  }

  long steps = std::max<long>(1, std::lround(opts.total_time / opts.dt0));
  RunResult coarse =
      run_fixed_step(liou, v0, opts.total_time, steps, opts.max_snapshots);
  for (int halving = 0;; ++halving) {
    if (halving >= opts.max_halvings)
      throw std::runtime_error(
          "evolve: step halving failed to meet drift tolerance after " +
          std::to_string(opts.max_halvings) + " halvings");
    steps *= 2;
    RunResult fine =
        run_fixed_step(liou, v0, opts.total_time, steps, opts.max_snapshots);
    double drift = refinement_drift(coarse.records, fine.records);
    if (drift < opts.drift_tolerance) {
      traj.dt = opts.total_time / static_cast<double>(steps);
      traj.records = std::move(fine.records);
      traj.snapshot_times = std::move(fine.snapshot_times);
      traj.snapshots = std::move(fine.snapshots);
      traj.halvings_used = halving + 1;
      traj.observable_drift = drift;
      traj.max_trace_drift_rate = fine.max_trace_drift_rate;
      return traj;
    }
    coarse = std::move(fine);
  }
}

namespace {

double site_residual(const std::vector<ObservableRecord>& recs, std::size_t i,
                     int r, double dt, const std::vector<int>& bond_out,
                     const std::vector<int>& bond_in) {
  const double dndt =
      (recs[i + 1].site_density[r] - recs[i - 1].site_density[r]) /
      (2.0 * dt);
  double div_j = 0.0;
  if (bond_out[r] >= 0) div_j += recs[i].bond_current[bond_out[r]];
  if (bond_in[r] >= 0) div_j -= recs[i].bond_current[bond_in[r]];
  return dndt + div_j + recs[i].jd_divergence[r];
}

void site_bond_maps(const Liouvillian& liou, std::vector<int>& bond_out,
                    std::vector<int>& bond_in) {
  const int L = liou.spec.num_sites;
  bond_out.assign(L, -1);
  bond_in.assign(L, -1);
  for (std::size_t b = 0; b < liou.bonds.size(); ++b) {
    bond_out[liou.bonds[b].first] = static_cast<int>(b);
    bond_in[liou.bonds[b].second] = static_cast<int>(b);
  }
}

}  // namespace

std::vector<double> continuity_residual_series(const Trajectory& traj,
                                               const Liouvillian& liou) {
  if (!liou.all_dissipators_on_site)
    throw std::runtime_error(
        "continuity_residual: multi-site dissipators are unsupported");
  const int L = liou.spec.num_sites;
  const auto& recs = traj.records;
  std::vector<double> series(recs.size(),
                             std::numeric_limits<double>::quiet_NaN());
  if (recs.size() < 3) return series;
  const double dt = recs[1].t - recs[0].t;
  std::vector<int> bond_out, bond_in;
  site_bond_maps(liou, bond_out, bond_in);
  for (std::size_t i = 1; i + 1 < recs.size(); ++i) {
    double worst = 0.0;
    for (int r = 0; r < L; ++r)
      worst = std::max(
          worst, std::abs(site_residual(recs, i, r, dt, bond_out, bond_in)));
    series[i] = worst;
  }
  return series;
}

ContinuityReport continuity_residual(const Trajectory& traj,
                                     const Liouvillian& liou) {
  if (!liou.all_dissipators_on_site)
    throw std::runtime_error(
        "continuity_residual: multi-site dissipators are unsupported");
  const int L = liou.spec.num_sites;
  const auto& recs = traj.records;
  ContinuityReport rep;
  rep.max_residual_per_site.assign(L, 0.0);
  if (recs.size() < 3) {
    rep.too_coarse_warning = true;
    return rep;
  }
  const double dt = recs[1].t - recs[0].t;
  std::vector<int> bond_out, bond_in;
  site_bond_maps(liou, bond_out, bond_in);

  double max_density_step = 0.0;
  for (std::size_t i = 1; i + 1 < recs.size(); ++i) {
    for (int r = 0; r < L; ++r) {
      const double res = site_residual(recs, i, r, dt, bond_out, bond_in);
      rep.max_residual_per_site[r] =
          std::max(rep.max_residual_per_site[r], std::abs(res));
      max_density_step =
          std::max(max_density_step,
                   std::abs(recs[i + 1].site_density[r] -
                            recs[i].site_density[r]));
    }
  }
  for (double m : rep.max_residual_per_site)
    rep.max_residual = std::max(rep.max_residual, m);
  // crude resolution check: densities should move little per record step
  rep.too_coarse_warning = max_density_step > 0.05;
  return rep;
}

}  // namespace oqs::lindblad
