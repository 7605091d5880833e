#include "pdearena/evolve.hpp"

#include <cmath>
#include <string>

#include "pdearena/errors.hpp"
#include "pdearena/timer.hpp"

namespace pdearena {

namespace {

double reaction(double u) { return u * (1.0 - u) * (1.0 - 2.0 * u); }
double reaction_prime(double u) { return 1.0 - 6.0 * u + 6.0 * u * u; }
double well(double u) { return u * u * (1.0 - u) * (1.0 - u); }

std::vector<double> lumped_masses(const SparseMatrix& mass) {
  std::vector<double> m(mass.n, 0.0);
  for (int r = 0; r < mass.n; ++r)
    for (int k = mass.row_offsets[r]; k < mass.row_offsets[r + 1]; ++k)
      m[r] += mass.values[k];
  return m;
}

// Copy of `a` with column m scaled by v[m].
SparseMatrix column_scaled(const SparseMatrix& a, std::span<const double> v) {
  SparseMatrix out = a;
  for (std::size_t k = 0; k < out.values.size(); ++k)
    out.values[k] *= v[out.column_indices[k]];
  return out;
}

std::vector<double> expand_to_nodes(const DofMap& dofs,
                                    std::span<const double> u) {
  std::vector<double> nodal(dofs.node_to_dof.size());
  for (std::size_t node = 0; node < nodal.size(); ++node)
    nodal[node] = u[dofs.node_to_dof[node]];
  return nodal;
}

}  // namespace

AllenCahnStepper::AllenCahnStepper(const Mesh& mesh, double eps, double dt,
                                   Scheme scheme, double newton_tol,
                                   int newton_max)
    : mesh_(&mesh),
      eps_(eps),
      dt_(dt),
      newton_tol_(newton_tol),
      newton_max_(newton_max),
      scheme_(scheme) {
  if (!(dt > 0.0) || !(eps > 0.0))
    throw InvalidArgument("Allen-Cahn stepper needs dt > 0 and eps > 0");
  dofs_ = build_dof_map(mesh, BoundarySpec::all_periodic(mesh.dim));
  mass_ = assemble_matrix(mesh, dofs_, 0.0, 1.0);
  stiffness_ = assemble_matrix(mesh, dofs_, 1.0, 0.0);
  system_ = assemble_matrix(mesh, dofs_, eps * dt, 1.0);
  if (scheme == Scheme::SemiImplicit) system_ilu_ = ilu0_factor(system_);
  lumped_ = lumped_masses(mass_);
}

std::vector<double> AllenCahnStepper::initial_dofs(const SpatialFn& ic) const {
  std::vector<double> u(dofs_.n_dofs);
  for (int d = 0; d < dofs_.n_dofs; ++d)
    u[d] = ic(mesh_->nodes[dofs_.dof_to_node[d]].data());
  return u;
}

NewtonReport AllenCahnStepper::step(std::vector<double>& u,
                                    const double* predictor) const {
  const int n = dofs_.n_dofs;
  if (scheme_ == Scheme::SemiImplicit) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = reaction(u[i]);
    std::vector<double> rhs = spmv(mass_, u);
    const std::vector<double> mg = spmv(mass_, g);
    axpy(-2.0 * dt_ / eps_, mg, rhs);
    u = cg_solve(system_, rhs, &system_ilu_, 1e-8, 10 * n + 100).x;
    return {};
  }

  // Implicit: Newton on F(v) = M(v - u) + eps dt K v + (2dt/eps) M g(v).
  NewtonReport report;
  std::vector<double> v =
      predictor ? std::vector<double>(predictor, predictor + n) : u;
  std::vector<double> g(n), gp(n), f(n), tmp(n);
  SparseMatrix jac = system_;  // pattern template
  for (int it = 0; it < newton_max_; ++it) {
    for (int i = 0; i < n; ++i) g[i] = reaction(v[i]);
    spmv_into(system_, v, f);  // M v + eps dt K v
    spmv_into(mass_, u, tmp);
    axpy(-1.0, tmp, f);
    spmv_into(mass_, g, tmp);
    axpy(2.0 * dt_ / eps_, tmp, f);
    const double fnorm = norm2(f);
    report.residuals.push_back(fnorm);
    if (fnorm <= newton_tol_) {
      report.iterations = it;
      u = std::move(v);
      return report;
    }
    for (int i = 0; i < n; ++i) gp[i] = reaction_prime(v[i]);
    // J = M + eps dt K + (2dt/eps) M diag(g'(v)): column-scaled mass added
    for (std::size_t k = 0; k < jac.values.size(); ++k)
      jac.values[k] = system_.values[k] + (2.0 * dt_ / eps_) * mass_.values[k] *
                                              gp[jac.column_indices[k]];
    IluFactors ilu = ilu0_factor(jac);
    for (auto& x : f) x = -x;
    const SolveResult delta = gmres_solve(jac, f, &ilu, 1e-12, 50, 20 * n);
    axpy(1.0, delta.x, v);
    ++report.iterations;
  }
  throw NewtonFailure("Allen-Cahn Newton did not converge in " +
                          std::to_string(newton_max_) + " iterations",
                      std::move(report.residuals));
}

double AllenCahnStepper::energy(std::span<const double> u,
                                bool nodal_quartic) const {
  const int n = dofs_.n_dofs;
  std::vector<double> ku(n);
  spmv_into(stiffness_, u, ku);
  double e = 0.5 * eps_ * dot(u, ku);
  if (nodal_quartic) {
    for (int i = 0; i < n; ++i) e += lumped_[i] * well(u[i]) / eps_;
    return e;
  }
  if (mesh_->dim != 1)
    throw InvalidArgument("exact quartic energy implemented for 1D meshes");
  // 3-point Gauss per cell integrates the quartic well exactly.
  static const double xi[3] = {0.5 * (1.0 - std::sqrt(0.6)), 0.5,
                               0.5 * (1.0 + std::sqrt(0.6))};
  static const double w[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  const std::vector<double> nodal = expand_to_nodes(dofs_, u);
  for (int c = 0; c < mesh_->n_cells(); ++c) {
    const double u0 = nodal[mesh_->cells[c][0]], u1 = nodal[mesh_->cells[c][1]];
    const double h = mesh_->cell_measure(c);
    double q = 0.0;
    for (int k = 0; k < 3; ++k) q += w[k] * well(u0 + xi[k] * (u1 - u0));
    e += h * q / eps_;
  }
  return e;
}

SchrodingerStepper::SchrodingerStepper(const Mesh& mesh, double dt,
                                       Scheme scheme, double diffusion,
                                       double newton_tol, int newton_max)
    : mesh_(&mesh),
      dt_(dt),
      diffusion_(diffusion),
      newton_tol_(newton_tol),
      newton_max_(newton_max),
      scheme_(scheme) {
  if (!(dt > 0.0)) throw InvalidArgument("Schroedinger stepper needs dt > 0");
  dofs_ = build_dof_map(mesh, BoundarySpec::all_periodic(mesh.dim));
  mass_ = assemble_matrix(mesh, dofs_, 0.0, 1.0);
  stiffness_ = assemble_matrix(mesh, dofs_, 1.0, 0.0);

  // Coupled 2n-by-2n pattern with interleaved unknowns (uR_i at 2i, uI_i at
  // 2i+1). Interleaving keeps the pattern banded in 1D, where ILU(0) then
  // coincides with the exact banded factorization. Values are refilled
  // before each solve.
  const int n = dofs_.n_dofs;
  block_.n = 2 * n;
  block_.row_offsets.resize(2 * n + 1, 0);
  for (int r = 0; r < n; ++r) {
    const int nnz = mass_.row_offsets[r + 1] - mass_.row_offsets[r];
    block_.row_offsets[2 * r + 1] = block_.row_offsets[2 * r] + 2 * nnz;
    block_.row_offsets[2 * r + 2] = block_.row_offsets[2 * r + 1] + 2 * nnz;
  }
  block_.column_indices.resize(block_.row_offsets[2 * n]);
  block_.values.assign(block_.column_indices.size(), 0.0);
  for (int r = 0; r < n; ++r)
    for (int half = 0; half < 2; ++half) {
      int out = block_.row_offsets[2 * r + half];
      for (int k = mass_.row_offsets[r]; k < mass_.row_offsets[r + 1]; ++k) {
        block_.column_indices[out++] = 2 * mass_.column_indices[k];
        block_.column_indices[out++] = 2 * mass_.column_indices[k] + 1;
      }
    }
}

std::vector<double> SchrodingerStepper::initial_dofs(
    const SpatialFn& ic) const {
  std::vector<double> u(dofs_.n_dofs);
  for (int d = 0; d < dofs_.n_dofs; ++d)
    u[d] = ic(mesh_->nodes[dofs_.dof_to_node[d]].data());
  return u;
}

std::vector<double> SchrodingerStepper::node_weights(
    std::span<const double> ur, std::span<const double> ui) const {
  std::vector<double> w(mesh_->n_nodes());
  for (int node = 0; node < mesh_->n_nodes(); ++node) {
    const int d = dofs_.node_to_dof[node];
    w[node] = ur[d] * ur[d] + ui[d] * ui[d];
  }
  return w;
}

void SchrodingerStepper::fill_block(const SparseMatrix& j00,
                                    const SparseMatrix& j01,
                                    const SparseMatrix& j10,
                                    const SparseMatrix& j11,
                                    SparseMatrix& block) const {
  const int n = dofs_.n_dofs;
  for (int r = 0; r < n; ++r) {
    const int nnz = mass_.row_offsets[r + 1] - mass_.row_offsets[r];
    const int src = mass_.row_offsets[r];
    double* even = block.values.data() + block.row_offsets[2 * r];
    double* odd = block.values.data() + block.row_offsets[2 * r + 1];
    for (int k = 0; k < nnz; ++k) {
      even[2 * k] = j00.values[src + k];
      even[2 * k + 1] = j01.values[src + k];
      odd[2 * k] = j10.values[src + k];
      odd[2 * k + 1] = j11.values[src + k];
    }
  }
}

std::vector<double> SchrodingerStepper::solve_block(
    const SparseMatrix& block, std::span<const double> rhs) const {
  const IluFactors ilu = ilu0_factor(block);
  const double tol = scheme_ == Scheme::SemiImplicit ? 1e-8 : 1e-12;
  return gmres_solve(block, rhs, &ilu, tol, 30, 10 * block.n + 100).x;
}

NewtonReport SchrodingerStepper::step(std::vector<double>& ur,
                                      std::vector<double>& ui) const {
  const int n = dofs_.n_dofs;
  std::vector<double> rhs(2 * n);
  {
    std::vector<double> t(n);
    spmv_into(mass_, ur, t);
    for (int i = 0; i < n; ++i) rhs[2 * i] = t[i];
    spmv_into(mass_, ui, t);
    for (int i = 0; i < n; ++i) rhs[2 * i + 1] = t[i];
  }

  if (scheme_ == Scheme::SemiImplicit) {
    const SparseMatrix mw =
        assemble_weighted_mass(*mesh_, dofs_, node_weights(ur, ui));
    SparseMatrix j01 = mw;  // dt (M_w - diffusion K)
    SparseMatrix j10 = mw;  // dt (diffusion K - M_w)
    for (std::size_t k = 0; k < j01.values.size(); ++k) {
      j01.values[k] = dt_ * (mw.values[k] - diffusion_ * stiffness_.values[k]);
      j10.values[k] = -j01.values[k];
    }
    fill_block(mass_, j01, j10, mass_, block_);
    const std::vector<double> sol = solve_block(block_, rhs);
    for (int i = 0; i < n; ++i) {
      ur[i] = sol[2 * i];
      ui[i] = sol[2 * i + 1];
    }
    return {};
  }

  // Implicit: Newton on the coupled system with |h|^2 at the new level.
  NewtonReport report;
  std::vector<double> vr = ur, vi = ui;
  std::vector<double> f(2 * n), t1(n), t2(n), t3(n);
  for (int it = 0; it < newton_max_; ++it) {
    const SparseMatrix mw =
        assemble_weighted_mass(*mesh_, dofs_, node_weights(vr, vi));
    // F_R = M(vr - ur) + dt (M_w - diffusion K) vi
    // F_I = M(vi - ui) + dt (diffusion K - M_w) vr
    spmv_into(mass_, vr, t1);
    spmv_into(mw, vi, t2);
    spmv_into(stiffness_, vi, t3);
    for (int i = 0; i < n; ++i)
      f[2 * i] = t1[i] - rhs[2 * i] + dt_ * (t2[i] - diffusion_ * t3[i]);
    spmv_into(mass_, vi, t1);
    spmv_into(mw, vr, t2);
    spmv_into(stiffness_, vr, t3);
    for (int i = 0; i < n; ++i)
      f[2 * i + 1] =
          t1[i] - rhs[2 * i + 1] + dt_ * (diffusion_ * t3[i] - t2[i]);

    const double fnorm = norm2(f);
    report.residuals.push_back(fnorm);
    if (fnorm <= newton_tol_) {
      report.iterations = it;
      ur = std::move(vr);
      ui = std::move(vi);
      return report;
    }

    const std::vector<double> nr = expand_to_nodes(dofs_, vr);
    const std::vector<double> ni = expand_to_nodes(dofs_, vi);
    const SparseMatrix mur = assemble_weighted_mass(*mesh_, dofs_, nr);
    const SparseMatrix mui = assemble_weighted_mass(*mesh_, dofs_, ni);

    SparseMatrix j00 = column_scaled(mui, vr);
    SparseMatrix j01 = column_scaled(mui, vi);
    SparseMatrix j10 = column_scaled(mur, vr);
    SparseMatrix j11 = column_scaled(mur, vi);
    for (std::size_t k = 0; k < j00.values.size(); ++k) {
      j00.values[k] = mass_.values[k] + 2.0 * dt_ * j00.values[k];
      j01.values[k] =
          dt_ * (mw.values[k] - diffusion_ * stiffness_.values[k] +
                 2.0 * j01.values[k]);
      j10.values[k] =
          dt_ * (diffusion_ * stiffness_.values[k] - mw.values[k] -
                 2.0 * j10.values[k]);
      j11.values[k] = mass_.values[k] - 2.0 * dt_ * j11.values[k];
    }
    fill_block(j00, j01, j10, j11, block_);
    for (auto& x : f) x = -x;
    const std::vector<double> delta = solve_block(block_, f);
    for (int i = 0; i < n; ++i) {
      vr[i] += delta[2 * i];
      vi[i] += delta[2 * i + 1];
    }
    ++report.iterations;
  }
  throw NewtonFailure("Schroedinger Newton did not converge in " +
                          std::to_string(newton_max_) + " iterations",
                      std::move(report.residuals));
}

double SchrodingerStepper::mass_l2sq(std::span<const double> ur,
                                     std::span<const double> ui) const {
  std::vector<double> t(dofs_.n_dofs);
  spmv_into(mass_, ur, t);
  double m = dot(ur, t);
  spmv_into(mass_, ui, t);
  return m + dot(ui, t);
}

namespace {

EvolutionState state_from_dofs(const Mesh& mesh, const DofMap& dofs, double t,
                               std::initializer_list<const std::vector<double>*>
                                   dof_fields) {
  EvolutionState s;
  s.t = t;
  for (const auto* u : dof_fields) s.fields.push_back(make_field(mesh, dofs, *u));
  return s;
}

std::vector<double> dofs_from_field(const DofMap& dofs, const FemField& f) {
  std::vector<double> u(dofs.n_dofs);
  for (int d = 0; d < dofs.n_dofs; ++d) u[d] = f.coefficients[dofs.dof_to_node[d]];
  return u;
}

}  // namespace

EvolutionState step_allen_cahn_semi_implicit(const EvolutionState& state,
                                             double dt, double eps) {
  const Mesh& mesh = *state.fields.at(0).mesh;
  AllenCahnStepper stepper(mesh, eps, dt, Scheme::SemiImplicit);
  std::vector<double> u = dofs_from_field(stepper.dofs(), state.fields[0]);
  stepper.step(u);
  return state_from_dofs(mesh, stepper.dofs(), state.t + dt, {&u});
}

EvolutionState step_allen_cahn_implicit(const EvolutionState& state, double dt,
                                        double eps, double newton_tol,
                                        int newton_max, NewtonReport* report) {
  const Mesh& mesh = *state.fields.at(0).mesh;
  AllenCahnStepper stepper(mesh, eps, dt, Scheme::Implicit, newton_tol,
                           newton_max);
  std::vector<double> u = dofs_from_field(stepper.dofs(), state.fields[0]);
  NewtonReport r = stepper.step(u);
  if (report) *report = std::move(r);
  return state_from_dofs(mesh, stepper.dofs(), state.t + dt, {&u});
}

EvolutionState step_schrodinger_semi_implicit(const EvolutionState& state,
                                              double dt, double diffusion) {
  const Mesh& mesh = *state.fields.at(0).mesh;
  SchrodingerStepper stepper(mesh, dt, Scheme::SemiImplicit, diffusion);
  std::vector<double> ur = dofs_from_field(stepper.dofs(), state.fields.at(0));
  std::vector<double> ui = dofs_from_field(stepper.dofs(), state.fields.at(1));
  stepper.step(ur, ui);
  return state_from_dofs(mesh, stepper.dofs(), state.t + dt, {&ur, &ui});
}

Trajectory run_evolution(const EvolutionProblem& problem, const Mesh& mesh,
                         double dt, double t_final,
                         Scheme scheme, std::span<const double> snapshot_times) {
  if (!(dt > 0.0)) throw InvalidArgument("run_evolution: dt must be positive");
  const double steps_real = t_final / dt;
  const long n_steps = std::lround(steps_real);
  if (std::abs(steps_real - static_cast<double>(n_steps)) > 1e-9)
    throw InvalidArgument("run_evolution: t_final must be a multiple of dt");
  const double align_tol = 1e-9 * std::max(1.0, t_final);
  for (double ts : snapshot_times) {
    const double k = ts / dt;
    if (std::abs(k - std::round(k)) * dt > align_tol)
      throw InvalidArgument("run_evolution: snapshot time off the dt grid");
  }
  auto wants_snapshot = [&](double t) {
    for (double ts : snapshot_times)
      if (std::abs(ts - t) <= align_tol) return true;
    return false;
  };

  Trajectory out;
  double t_failed = 0.0;
  WallTimer timer;
  try {
    if (problem.components == 1) {
      AllenCahnStepper stepper(mesh, problem.eps, dt, scheme);
      auto ic = [&](const double* x) { return problem.initial(x, 0); };
      std::vector<double> u = stepper.initial_dofs(ic);
      if (wants_snapshot(0.0))
        out.snapshots.push_back(state_from_dofs(mesh, stepper.dofs(), 0.0, {&u}));
      for (long s = 1; s <= n_steps; ++s) {
        t_failed = static_cast<double>(s) * dt;
        stepper.step(u);
        if (wants_snapshot(t_failed))
          out.snapshots.push_back(
              state_from_dofs(mesh, stepper.dofs(), t_failed, {&u}));
      }
    } else {
      SchrodingerStepper stepper(mesh, dt, scheme, problem.diffusion);
      auto icr = [&](const double* x) { return problem.initial(x, 0); };
      auto ici = [&](const double* x) { return problem.initial(x, 1); };
      std::vector<double> ur = stepper.initial_dofs(icr);
      std::vector<double> ui = stepper.initial_dofs(ici);
      if (wants_snapshot(0.0))
        out.snapshots.push_back(
            state_from_dofs(mesh, stepper.dofs(), 0.0, {&ur, &ui}));
      for (long s = 1; s <= n_steps; ++s) {
        t_failed = static_cast<double>(s) * dt;
        stepper.step(ur, ui);
        if (wants_snapshot(t_failed))
          out.snapshots.push_back(
              state_from_dofs(mesh, stepper.dofs(), t_failed, {&ur, &ui}));
      }
    }
  } catch (const std::runtime_error& e) {
    throw std::runtime_error("evolution step failed at t=" +
                             std::to_string(t_failed) + ": " + e.what());
  }
  out.solve_seconds = timer.seconds();
  return out;
}

}  // namespace pdearena
