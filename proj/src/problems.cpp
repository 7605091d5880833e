#include "pdearena/problems.hpp"

#include <cmath>

#include "pdearena/errors.hpp"
#include "pdearena/parallel.hpp"
#include "pdearena/session.hpp"
#include "pdearena/timer.hpp"

namespace pdearena {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double sech(double x) { return 1.0 / std::cosh(x); }

}  // namespace

std::string to_string(ProblemId id) {
  switch (id) {
    case ProblemId::Poisson1d: return "poisson1d";
    case ProblemId::Poisson2d: return "poisson2d";
    case ProblemId::Poisson3d: return "poisson3d";
    case ProblemId::AllenCahn1d: return "allen_cahn1d";
    case ProblemId::Schrodinger1d: return "schrodinger1d";
    case ProblemId::Schrodinger2d: return "schrodinger2d";
  }
  return "?";
}

std::optional<ProblemId> problem_from_string(const std::string& name) {
  for (int i = 0; i < kProblemCount; ++i)
    if (to_string(static_cast<ProblemId>(i)) == name)
      return static_cast<ProblemId>(i);
  return std::nullopt;
}

ProblemSpec build_problem(ProblemId id) {
  ProblemSpec p;
  p.id = id;
  switch (id) {
    case ProblemId::Poisson1d:
      p.spatial_dim = p.input_dim = 1;
      p.lo = {0, 0, 0};
      p.hi = {1, 0, 0};
      p.n_f = 256;
      p.n_g = 2;
      p.source = [](const double* x) {
        return (4.0 * x[0] * x[0] * x[0] - 6.0 * x[0]) * std::exp(-x[0] * x[0]);
      };
      p.analytic = [](const double* x) { return x[0] * std::exp(-x[0] * x[0]); };
      break;
    case ProblemId::Poisson2d:
      p.spatial_dim = p.input_dim = 2;
      p.lo = {0, 0, 0};
      p.hi = {1, 1, 0};
      p.n_f = 2000;
      p.n_g = 250;
      p.source = [](const double* q) {
        const double x = q[0], y = q[1];
        return 2.0 * (std::pow(x, 4) * (3.0 * y - 2.0) +
               std::pow(x, 3) * (4.0 - 6.0 * y) +
               x * x * (6.0 * y * y * y - 12.0 * y * y + 9.0 * y - 2.0) -
               6.0 * x * (y - 1.0) * (y - 1.0) * y + (y - 1.0) * (y - 1.0) * y);
      };
      p.analytic = [](const double* q) {
        const double x = q[0], y = q[1];
        return x * x * (x - 1.0) * (x - 1.0) * y * (y - 1.0) * (y - 1.0);
      };
      break;
    case ProblemId::Poisson3d:
      p.spatial_dim = p.input_dim = 3;
      p.lo = {0, 0, 0};
      p.hi = {1, 1, 1};
      p.n_f = 1000;
      p.n_g = 100;
      p.source = [](const double* q) {
        return -3.0 * kPi * kPi * std::sin(kPi * q[0]) * std::sin(kPi * q[1]) *
               std::sin(kPi * q[2]);
      };
      p.analytic = [](const double* q) {
        return std::sin(kPi * q[0]) * std::sin(kPi * q[1]) * std::sin(kPi * q[2]);
      };
      break;
    case ProblemId::AllenCahn1d:
      p.spatial_dim = 1;
      p.input_dim = 2;
      p.t_final = 0.05;
      p.lo = {0, 0, 0};
      p.hi = {1, 0, 0};
      p.eps = 0.01;
      p.ic_weight = 1000.0;
      p.n_f = 20000;
      p.n_g = 250;
      p.n_h = 500;
      p.initial = [](const double* x, int) {
        return 0.5 * (0.5 * std::sin(2.0 * kPi * x[0]) +
                      0.5 * std::sin(16.0 * kPi * x[0])) +
               0.5;
      };
      break;
    case ProblemId::Schrodinger1d:
      p.spatial_dim = 1;
      p.input_dim = 2;
      p.components = 2;
      p.t_final = kPi / 2.0;
      p.lo = {-5, 0, 0};
      p.hi = {5, 0, 0};
      p.diffusion = 0.5;
      p.n_f = 20000;
      p.n_g = 50;
      p.n_h = 50;
      p.initial = [](const double* x, int comp) {
        return comp == 0 ? 2.0 * sech(x[0]) : 0.0;
      };
      break;
    case ProblemId::Schrodinger2d:
      p.spatial_dim = 2;
      p.input_dim = 3;
      p.components = 2;
      p.t_final = kPi / 2.0;
      p.lo = {-5, -5, 0};
      p.hi = {5, 5, 0};
      p.diffusion = 0.5;
      p.n_f = 5000;
      p.n_g = 100;
      p.n_h = 100;
      p.initial = [](const double* x, int comp) {
        return comp == 0 ? sech(x[0]) + 0.5 * sech(x[1] - 2.0) +
                               0.5 * sech(x[1] + 2.0)
                         : 0.0;
      };
      break;
  }
  return p;
}

SampleBatch sample_batch(const ProblemSpec& p, CounterRng& rng) {
  SampleBatch batch;
  CounterRng r_interior = rng.child(1), r_boundary = rng.child(2),
             r_initial = rng.child(3);

  // interior: LHS over the full input box (time first for evolution)
  double lo[4], hi[4];
  int d = 0;
  if (!p.stationary()) {
    lo[d] = 0.0;
    hi[d] = p.t_final;
    ++d;
  }
  for (int s = 0; s < p.spatial_dim; ++s, ++d) {
    lo[d] = p.lo[s];
    hi[d] = p.hi[s];
  }
  batch.interior = lhs_sample(p.n_f, p.input_dim, lo, hi, r_interior);

  switch (p.id) {
    case ProblemId::Poisson1d:
      batch.boundary_group = 1;
      batch.boundary = {Point{p.lo[0], 0, 0, 0}, Point{p.hi[0], 0, 0, 0}};
      break;
    case ProblemId::Poisson2d: {
      batch.boundary_group = 4;
      const auto draws = lhs_sample(p.n_g, 2, lo, hi, r_boundary);
      for (const auto& q : draws) {
        batch.boundary.push_back({p.lo[0], q[1], 0, 0});
        batch.boundary.push_back({p.hi[0], q[1], 0, 0});
        batch.boundary.push_back({q[0], p.lo[1], 0, 0});
        batch.boundary.push_back({q[0], p.hi[1], 0, 0});
      }
      break;
    }
    case ProblemId::Poisson3d: {
      batch.boundary_group = 6;
      const auto draws = lhs_sample(p.n_g, 3, lo, hi, r_boundary);
      for (const auto& q : draws) {
        batch.boundary.push_back({p.lo[0], q[1], q[2], 0});
        batch.boundary.push_back({p.hi[0], q[1], q[2], 0});
        batch.boundary.push_back({q[0], p.lo[1], q[2], 0});
        batch.boundary.push_back({q[0], p.hi[1], q[2], 0});
        batch.boundary.push_back({q[0], q[1], p.lo[2], 0});
        batch.boundary.push_back({q[0], q[1], p.hi[2], 0});
      }
      break;
    }
    case ProblemId::AllenCahn1d:
    case ProblemId::Schrodinger1d: {
      batch.boundary_group = 2;
      const double tlo = 0.0, thi = p.t_final;
      const auto draws = lhs_sample(p.n_g, 1, &tlo, &thi, r_boundary);
      for (const auto& q : draws) {
        batch.boundary.push_back({q[0], p.lo[0], 0, 0});
        batch.boundary.push_back({q[0], p.hi[0], 0, 0});
      }
      break;
    }
    case ProblemId::Schrodinger2d: {
      batch.boundary_group = 4;
      const auto draws = lhs_sample(p.n_g, 3, lo, hi, r_boundary);
      for (const auto& q : draws) {
        batch.boundary.push_back({q[0], p.lo[0], q[2], 0});
        batch.boundary.push_back({q[0], p.hi[0], q[2], 0});
        batch.boundary.push_back({q[0], q[1], p.lo[1], 0});
        batch.boundary.push_back({q[0], q[1], p.hi[1], 0});
      }
      break;
    }
  }

  if (p.n_h > 0) {
    double slo[4], shi[4];
    for (int s = 0; s < p.spatial_dim; ++s) {
      slo[s] = p.lo[s];
      shi[s] = p.hi[s];
    }
    const auto draws = lhs_sample(p.n_h, p.spatial_dim, slo, shi, r_initial);
    for (const auto& q : draws) {
      Point pt{0, 0, 0, 0};
      for (int s = 0; s < p.spatial_dim; ++s) pt[s + 1] = q[s];
      batch.initial.push_back(pt);
    }
  }
  return batch;
}

namespace {

// Term indexing: [0, n_f) interior, then boundary draws, then initial.
struct TermLayout {
  int n_interior = 0, n_boundary = 0, n_initial = 0;
  int count() const { return n_interior + n_boundary + n_initial; }
};

TermLayout layout_of(const ProblemSpec& p, const SampleBatch& batch) {
  TermLayout l;
  l.n_interior = static_cast<int>(batch.interior.size());
  l.n_boundary = batch.boundary_draws();
  l.n_initial = static_cast<int>(batch.initial.size());
  if (l.n_interior != p.n_f)
    throw InvalidArgument("batch interior count does not match the problem");
  return l;
}

ad::TVar interior_term(const ProblemSpec& p, const Point& pt,
                       TermSession& s) {
  std::span<const double> x(pt.data(), p.input_dim);
  const auto h = s.jet(x);
  switch (p.id) {
    case ProblemId::Poisson1d:
    case ProblemId::Poisson2d:
    case ProblemId::Poisson3d: {
      ad::TVar lap = h.second[0][0];
      for (int k = 1; k < p.input_dim; ++k) lap = lap + h.second[0][k];
      return square(lap - p.source(pt.data()));
    }
    case ProblemId::AllenCahn1d: {
      const ad::TVar u = h.value[0];
      const ad::TVar ut = h.first[0][0];
      const ad::TVar uxx = h.second[0][1];
      const ad::TVar reaction = u * (1.0 - u) * (1.0 - 2.0 * u);
      return square(ut - p.eps * uxx + (2.0 / p.eps) * reaction);
    }
    case ProblemId::Schrodinger1d:
    case ProblemId::Schrodinger2d: {
      const ad::TVar ur = h.value[0], ui = h.value[1];
      const ad::TVar urt = h.first[0][0], uit = h.first[1][0];
      ad::TVar lap_r = h.second[0][1], lap_i = h.second[1][1];
      for (int k = 2; k < p.input_dim; ++k) {
        lap_r = lap_r + h.second[0][k];
        lap_i = lap_i + h.second[1][k];
      }
      const ad::TVar w = square(ur) + square(ui);
      const ad::TVar r1 = uit - p.diffusion * lap_r - w * ur;
      const ad::TVar r2 = urt + p.diffusion * lap_i + w * ui;
      return square(r1) + square(r2);
    }
  }
  throw InvalidArgument("unknown problem");
}

ad::TVar boundary_term(const ProblemSpec& p, const SampleBatch& batch,
                       int draw, TermSession& s) {
  const Point* g = batch.boundary.data() +
                   static_cast<std::size_t>(draw) * batch.boundary_group;
  const int nd = p.input_dim;
  switch (p.id) {
    case ProblemId::Poisson1d: {
      const auto h = s.value(std::span<const double>(g[0].data(), nd));
      const double target = p.analytic(g[0].data());
      return square(h.value[0] - target);
    }
    case ProblemId::Poisson2d: {
      // outward normal derivatives on x-faces and the top, value on y=0
      const auto h0 = s.jet(std::span<const double>(g[0].data(), nd));
      const auto h1 = s.jet(std::span<const double>(g[1].data(), nd));
      const auto h2 = s.value(std::span<const double>(g[2].data(), nd));
      const auto h3 = s.jet(std::span<const double>(g[3].data(), nd));
      return square(h0.first[0][0]) + square(h1.first[0][0]) +
             square(h2.value[0]) + square(h3.first[0][1]);
    }
    case ProblemId::Poisson3d: {
      ad::TVar sum = square(
          s.value(std::span<const double>(g[0].data(), nd)).value[0]);
      for (int f = 1; f < 6; ++f)
        sum = sum + square(
            s.value(std::span<const double>(g[f].data(), nd)).value[0]);
      return sum;
    }
    case ProblemId::AllenCahn1d: {
      const auto hl = s.value(std::span<const double>(g[0].data(), nd));
      const auto hr = s.value(std::span<const double>(g[1].data(), nd));
      return square(hl.value[0] - hr.value[0]);
    }
    case ProblemId::Schrodinger1d: {
      const auto hl = s.jet(std::span<const double>(g[0].data(), nd));
      const auto hr = s.jet(std::span<const double>(g[1].data(), nd));
      return square(hl.value[0] - hr.value[0]) +
             square(hl.value[1] - hr.value[1]) +
             square(hl.first[0][1] - hr.first[0][1]) +
             square(hl.first[1][1] - hr.first[1][1]);
    }
    case ProblemId::Schrodinger2d: {
      const auto xl = s.jet(std::span<const double>(g[0].data(), nd));
      const auto xr = s.jet(std::span<const double>(g[1].data(), nd));
      const auto yl = s.jet(std::span<const double>(g[2].data(), nd));
      const auto yr = s.jet(std::span<const double>(g[3].data(), nd));
      ad::TVar sum = square(xl.value[0] - xr.value[0]) +
                     square(xl.value[1] - xr.value[1]) +
                     square(yl.value[0] - yr.value[0]) +
                     square(yl.value[1] - yr.value[1]);
      sum = sum + square(xl.first[0][1] - xr.first[0][1]) +
            square(xl.first[1][1] - xr.first[1][1]);
      sum = sum + square(yl.first[0][2] - yr.first[0][2]) +
            square(yl.first[1][2] - yr.first[1][2]);
      return sum;
    }
  }
  throw InvalidArgument("unknown problem");
}

ad::TVar initial_term(const ProblemSpec& p, const Point& pt, TermSession& s) {
  const auto h = s.value(std::span<const double>(pt.data(), p.input_dim));
  const double* spatial = pt.data() + 1;
  switch (p.id) {
    case ProblemId::AllenCahn1d:
      return square(h.value[0] - p.initial(spatial, 0));
    case ProblemId::Schrodinger1d:
      return square(h.value[0] - p.initial(spatial, 0)) + square(h.value[1]);
    case ProblemId::Schrodinger2d: {
      ad::TVar sum = square(h.value[0] - p.initial(spatial, 0));
      if (p.schrod2d_imag_ic) sum = sum + square(h.value[1]);
      return sum;
    }
    default:
      throw InvalidArgument("problem has no initial condition");
  }
}

TermFn make_term_fn(const ProblemSpec& p, const SampleBatch& batch,
                    const TermLayout& l) {
  return [&p, &batch, l](int i, TermSession& s) -> ad::TVar {
    if (i < l.n_interior) return interior_term(p, batch.interior[i], s);
    i -= l.n_interior;
    if (i < l.n_boundary) return boundary_term(p, batch, i, s);
    i -= l.n_boundary;
    return initial_term(p, batch.initial[i], s);
  };
}

WeightFn make_weight_fn(const ProblemSpec& p, const TermLayout& l) {
  const double wb = p.id == ProblemId::Poisson1d ? 1.0 : 1.0 / p.n_g;
  const double wi = p.n_h > 0 ? p.ic_weight / p.n_h : 0.0;
  return [l, nf = p.n_f, wb, wi](int i) {
    if (i < l.n_interior) return 1.0 / nf;
    if (i < l.n_interior + l.n_boundary) return wb;
    return wi;
  };
}

}  // namespace

std::vector<double> pde_residual(const ProblemSpec& p, const MlpParams& params,
                                 const Point& x) {
  const Jet2 jet = jet2(params, std::span<const double>(x.data(), p.input_dim));
  switch (p.id) {
    case ProblemId::Poisson1d:
    case ProblemId::Poisson2d:
    case ProblemId::Poisson3d:
      return {jet.laplacian(0) - p.source(x.data())};
    case ProblemId::AllenCahn1d: {
      const double u = jet.value[0];
      return {jet.d1(0, 0) - p.eps * jet.laplacian(0, 1) +
              (2.0 / p.eps) * u * (1.0 - u) * (1.0 - 2.0 * u)};
    }
    case ProblemId::Schrodinger1d:
    case ProblemId::Schrodinger2d: {
      const double ur = jet.value[0], ui = jet.value[1];
      const double w = ur * ur + ui * ui;
      return {jet.d1(1, 0) - p.diffusion * jet.laplacian(0, 1) - w * ur,
              jet.d1(0, 0) + p.diffusion * jet.laplacian(1, 1) + w * ui};
    }
  }
  throw InvalidArgument("unknown problem");
}

double total_loss(const ProblemSpec& p, const MlpParams& params,
                  const SampleBatch& batch) {
  const TermLayout l = layout_of(p, batch);
  return loss_value(params, l.count(), make_term_fn(p, batch, l),
                    make_weight_fn(p, l));
}

double total_loss_gradient(const ProblemSpec& p, const MlpParams& params,
                           const SampleBatch& batch, std::span<double> grad) {
  const TermLayout l = layout_of(p, batch);
  return loss_gradient(params, l.count(), make_term_fn(p, batch, l),
                       make_weight_fn(p, l), grad);
}

namespace {

void require_ic_problem(const ProblemSpec& p) {
  if (p.id != ProblemId::AllenCahn1d)
    throw InvalidArgument("initial-condition pretraining is an Allen-Cahn path");
}

}  // namespace

double ic_only_loss(const ProblemSpec& p, const MlpParams& params,
                    const SampleBatch& batch) {
  require_ic_problem(p);
  const double w = p.ic_weight / p.n_h;
  return loss_value(
      params, static_cast<int>(batch.initial.size()),
      [&](int i, TermSession& s) { return initial_term(p, batch.initial[i], s); },
      [w](int) { return w; });
}

double ic_only_loss_gradient(const ProblemSpec& p, const MlpParams& params,
                             const SampleBatch& batch, std::span<double> grad) {
  require_ic_problem(p);
  const double w = p.ic_weight / p.n_h;
  return loss_gradient(
      params, static_cast<int>(batch.initial.size()),
      [&](int i, TermSession& s) { return initial_term(p, batch.initial[i], s); },
      [w](int) { return w; }, grad);
}

PinnEval evaluate_pinn(const ProblemSpec& p, const MlpParams& params,
                       std::span<const Point> points) {
  PinnEval out;
  const int nc = p.components;
  out.values.resize(points.size() * nc);
  WallTimer timer;
  for_each_stripe(points.size(), [&](std::size_t, std::size_t b, std::size_t e) {
    JetTrace trace;
    for (std::size_t i = b; i < e; ++i) {
      jet_forward(params, std::span<const double>(points[i].data(), p.input_dim),
                  0, trace);
      for (int c = 0; c < nc; ++c) out.values[i * nc + c] = trace.jet.value[c];
    }
  });
  out.seconds = timer.seconds();
  return out;
}

}  // namespace pdearena
