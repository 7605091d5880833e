#include "pdearena/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "pdearena/errors.hpp"
#include "pdearena/sparse.hpp"  // dot, norm2, axpy

namespace pdearena {

void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grad) {
  if (params.size() != grad.size())
    throw InvalidArgument("adam_step: shape mismatch");
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size())
    throw InvalidArgument("adam_step: state shape mismatch");
  for (double g : grad)
    if (std::isnan(g)) throw InvalidArgument("adam_step: NaN gradient");

  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, state.step);
  const double bc2 = 1.0 - std::pow(state.beta2, state.step);
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

namespace {

struct Pair {
  std::vector<double> s, y;
  double rho;
};

// Two-loop recursion: d = -H g.
std::vector<double> lbfgs_direction(const std::deque<Pair>& pairs,
                                    std::span<const double> g) {
  std::vector<double> q(g.begin(), g.end());
  std::vector<double> alpha(pairs.size());
  for (int i = static_cast<int>(pairs.size()) - 1; i >= 0; --i) {
    alpha[i] = pairs[i].rho * dot(pairs[i].s, q);
    axpy(-alpha[i], pairs[i].y, q);
  }
  if (!pairs.empty()) {
    const Pair& last = pairs.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (auto& v : q) v *= gamma;
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double beta = pairs[i].rho * dot(pairs[i].y, q);
    axpy(alpha[i] - beta, pairs[i].s, q);
  }
  for (auto& v : q) v = -v;
  return q;
}

}  // namespace

LbfgsResult lbfgs_minimize(const LossGradFn& f, std::span<const double> x0,
                           const LbfgsOptions& opts) {
  const std::size_t n = x0.size();
  LbfgsResult res;
  res.x.assign(x0.begin(), x0.end());
  std::vector<double> g(n), x_new(n), g_new(n);
  res.loss = f(res.x, g);
  res.grad_norm = norm2(g);
  if (!std::isfinite(res.loss))
    throw InvalidArgument("lbfgs: loss not finite at the starting point");
  if (res.grad_norm <= opts.grad_tol) {
    res.converged = true;
    res.stop_reason = "gradient below tolerance";
    return res;
  }

  std::deque<Pair> pairs;
  for (int it = 0; it < opts.max_iter; ++it) {
    std::vector<double> d = lbfgs_direction(pairs, g);
    double dg = dot(d, g);
    if (dg >= 0.0) {  // not a descent direction: fall back to steepest descent
      d.assign(g.begin(), g.end());
      for (auto& v : d) v = -v;
      dg = -res.grad_norm * res.grad_norm;
      pairs.clear();
    }

    // Strong Wolfe line search: bracket, then zoom with safeguarded cubic
    // interpolation (Nocedal & Wright, algorithms 3.5/3.6).
    const double phi0 = res.loss, dphi0 = dg;
    double alpha = pairs.empty() ? std::min(1.0, 1.0 / std::max(1.0, res.grad_norm))
                                 : 1.0;
    bool found = false;
    double phi_alpha = phi0, dphi_alpha = dphi0;
    int evals = 0;
    auto eval_at = [&](double a) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = res.x[i] + a * d[i];
      phi_alpha = f(x_new, g_new);
      dphi_alpha = dot(g_new, d);
      ++evals;
    };
    auto interpolate = [](double a, double fa, double da, double b, double fb,
                          double db) {
      const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
      const double disc = d1 * d1 - da * db;
      const double width = std::abs(b - a);
      double t = 0.5 * (a + b);
      if (disc >= 0.0) {
        const double d2 = std::copysign(std::sqrt(disc), b - a);
        const double c = b - (b - a) * ((db + d2 - d1) / (db - da + 2.0 * d2));
        if (std::isfinite(c)) t = c;
      }
      const double lo = std::min(a, b) + 0.1 * width;
      const double hi = std::max(a, b) - 0.1 * width;
      return std::clamp(t, lo, hi);
    };

    double lo = 0.0, phi_lo = phi0, dphi_lo = dphi0;
    double hi = 0.0, phi_hi = phi0, dphi_hi = dphi0;
    bool bracketed = false;
    double alpha_prev = 0.0, phi_prev = phi0, dphi_prev = dphi0;
    while (evals < opts.max_line_search) {
      eval_at(alpha);
      if (!std::isfinite(phi_alpha) ||
          phi_alpha > phi0 + opts.armijo_c1 * alpha * dphi0 ||
          (evals > 1 && phi_alpha >= phi_prev)) {
        lo = alpha_prev;
        phi_lo = phi_prev;
        dphi_lo = dphi_prev;
        hi = alpha;
        phi_hi = phi_alpha;
        dphi_hi = dphi_alpha;
        bracketed = true;
        break;
      }
      if (std::abs(dphi_alpha) <= -opts.wolfe_c2 * dphi0) {
        found = true;
        break;
      }
      if (dphi_alpha >= 0.0) {
        lo = alpha;
        phi_lo = phi_alpha;
        dphi_lo = dphi_alpha;
        hi = alpha_prev;
        phi_hi = phi_prev;
        dphi_hi = dphi_prev;
        bracketed = true;
        break;
      }
      alpha_prev = alpha;
      phi_prev = phi_alpha;
      dphi_prev = dphi_alpha;
      alpha *= 2.0;
    }
    if (bracketed) {
      while (evals < opts.max_line_search) {
        const double a = interpolate(lo, phi_lo, dphi_lo, hi, phi_hi, dphi_hi);
        eval_at(a);
        if (!std::isfinite(phi_alpha) ||
            phi_alpha > phi0 + opts.armijo_c1 * a * dphi0 ||
            phi_alpha >= phi_lo) {
          hi = a;
          phi_hi = phi_alpha;
          dphi_hi = dphi_alpha;
        } else {
          if (std::abs(dphi_alpha) <= -opts.wolfe_c2 * dphi0) {
            alpha = a;
            found = true;
            break;
          }
          if (dphi_alpha * (hi - lo) >= 0.0) {
            hi = lo;
            phi_hi = phi_lo;
            dphi_hi = dphi_lo;
          }
          lo = a;
          phi_lo = phi_alpha;
          dphi_lo = dphi_alpha;
        }
        if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) break;
      }
    }

    if (!found && !(std::isfinite(phi_alpha) && phi_alpha < phi0)) {
      res.stop_reason = "line search failure";
      res.iterations = it;
      return res;
    }
    // accept the step (Wolfe point, or the last improving trial)
    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - res.x[i];
      y[i] = g_new[i] - g[i];
    }
    res.x = x_new;
    res.loss = phi_alpha;
    g = g_new;
    res.grad_norm = norm2(g);
    res.iterations = it + 1;

    const double sy = dot(s, y);
    if (sy > 1e-12 * norm2(s) * norm2(y)) {
      pairs.push_back({std::move(s), std::move(y), 1.0 / sy});
      if (static_cast<int>(pairs.size()) > opts.history) pairs.pop_front();
    }
    if (res.grad_norm <= opts.grad_tol) {
      res.converged = true;
      res.stop_reason = "gradient below tolerance";
      return res;
    }
  }
  res.stop_reason = "max iterations";
  return res;
}

}  // namespace pdearena
