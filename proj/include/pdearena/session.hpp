#ifndef PDEARENA_SESSION_HPP
#define PDEARENA_SESSION_HPP

#include <array>
#include <functional>
#include <span>

#include "pdearena/net.hpp"
#include "pdearena/tape.hpp"

namespace pdearena {

/// Scratch context for one loss term. Network evaluations requested through
/// it surface as tape variables, so a term is ordinary arithmetic on
/// handles; backward() then pulls the tape adjoints through the recorded
/// jet traces into the parameter gradient.
class TermSession {
 public:
  explicit TermSession(const MlpParams& params) : params_(&params) {}

  struct Handles {
    int n_out = 0, n_in = 0;
    std::array<ad::TVar, 2> value{};
    std::array<std::array<ad::TVar, 3>, 2> first{};   // [out][coord]
    std::array<std::array<ad::TVar, 3>, 2> second{};  // [out][coord]
  };

  /// Full jet evaluation (value + first + pure second derivatives).
  Handles jet(std::span<const double> x) { return eval(x, true); }
  /// Value-only evaluation (cheaper; no derivative handles).
  Handles value(std::span<const double> x) { return eval(x, false); }

  void reset();

  /// Weighted term value; parameter gradient accumulated into `grad`.
  double backward(ad::TVar root, double weight, std::span<double> grad);
  /// Weighted term value without differentiation.
  double value_of(ad::TVar root, double weight) const {
    return weight * root.v;
  }

 private:
  struct EvalRecord {
    int trace_slot = 0;
    int first_leaf = 0;
  };

  Handles eval(std::span<const double> x, bool with_jet);

  const MlpParams* params_;
  ad::Tape tape_;
  std::vector<JetTrace> trace_pool_;
  int traces_used_ = 0;
  std::vector<EvalRecord> evals_;
  std::vector<double> adj_;
};

using TermFn = std::function<ad::TVar(int, TermSession&)>;
using WeightFn = std::function<double(int)>;

/// Weighted sum of term values, parallel over a fixed 16-stripe partition
/// with in-order reduction (bit-deterministic for any thread count).
double loss_value(const MlpParams& params, int n_terms, const TermFn& term,
                  const WeightFn& weight);

/// Same sum plus its gradient with respect to every parameter (layout of
/// pack_params). Gradients flow reverse-over-forward: tape adjoints seed
/// the structured jet backward pass. Throws on NaN loss.
double loss_gradient(const MlpParams& params, int n_terms, const TermFn& term,
                     const WeightFn& weight, std::span<double> grad);

}  // namespace pdearena

#endif
