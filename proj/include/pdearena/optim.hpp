#ifndef PDEARENA_OPTIM_HPP
#define PDEARENA_OPTIM_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace pdearena {

/// Adam with standard bias correction. Moments live here; parameters are
/// updated in place.
struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<double> m, v;
};

void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grad);

/// loss(x, grad_out) -> loss value, writing the gradient into grad_out.
using LossGradFn =
    std::function<double(std::span<const double>, std::span<double>)>;

struct LbfgsOptions {
  int history = 10;
  int max_iter = 500;
  double grad_tol = 1e-9;
  int max_line_search = 30;
  double armijo_c1 = 1e-4;
  double wolfe_c2 = 0.9;
};

struct LbfgsResult {
  std::vector<double> x;
  double loss = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
};

/// Two-loop recursion L-BFGS with a strong-Wolfe line search. Stored (s, y)
/// pairs must satisfy s.y > 0; violating pairs are skipped. A failed line
/// search is not fatal: the best iterate so far is returned with the reason
/// recorded.
LbfgsResult lbfgs_minimize(const LossGradFn& f, std::span<const double> x0,
                           const LbfgsOptions& opts = {});

}  // namespace pdearena

#endif
