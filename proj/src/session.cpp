#include "pdearena/session.hpp"

#include <cmath>
#include <stdexcept>

#include "pdearena/parallel.hpp"

namespace pdearena {

void TermSession::reset() {
  tape_.clear();
  traces_used_ = 0;
  evals_.clear();
}

TermSession::Handles TermSession::eval(std::span<const double> x,
                                       bool with_jet) {
  if (traces_used_ == static_cast<int>(trace_pool_.size()))
    trace_pool_.emplace_back();
  JetTrace& trace = trace_pool_[traces_used_];
  const int seeds = with_jet ? params_->input_width() : 0;
  jet_forward(*params_, x, seeds, trace);

  Handles h;
  h.n_out = params_->output_width();
  h.n_in = seeds;
  EvalRecord rec;
  rec.trace_slot = traces_used_++;
  rec.first_leaf = static_cast<int>(tape_.size());
  for (int o = 0; o < h.n_out; ++o)
    h.value[o] = {&tape_, tape_.leaf(), trace.jet.value[o]};
  for (int o = 0; o < h.n_out; ++o)
    for (int k = 0; k < seeds; ++k)
      h.first[o][k] = {&tape_, tape_.leaf(), trace.jet.d1(o, k)};
  for (int o = 0; o < h.n_out; ++o)
    for (int k = 0; k < seeds; ++k)
      h.second[o][k] = {&tape_, tape_.leaf(), trace.jet.d2(o, k)};
  evals_.push_back(rec);
  return h;
}

double TermSession::backward(ad::TVar root, double weight,
                             std::span<double> grad) {
  tape_.backward(root.idx, weight, adj_);
  const int n_out = params_->output_width();
  Jet2 seed;
  for (const EvalRecord& rec : evals_) {
    const JetTrace& trace = trace_pool_[rec.trace_slot];
    const int seeds = trace.seeds;
    seed.n_out = n_out;
    seed.n_in = seeds;
    seed.value.assign(n_out, 0.0);
    seed.first.assign(static_cast<std::size_t>(n_out) * seeds, 0.0);
    seed.second.assign(static_cast<std::size_t>(n_out) * seeds, 0.0);
    int leaf = rec.first_leaf;
    for (int o = 0; o < n_out; ++o) seed.value[o] = adj_[leaf++];
    for (int o = 0; o < n_out; ++o)
      for (int k = 0; k < seeds; ++k) seed.first[o * seeds + k] = adj_[leaf++];
    for (int o = 0; o < n_out; ++o)
      for (int k = 0; k < seeds; ++k) seed.second[o * seeds + k] = adj_[leaf++];
    jet_backward(*params_, trace, seed, grad);
  }
  return weight * root.v;
}

double loss_value(const MlpParams& params, int n_terms, const TermFn& term,
                  const WeightFn& weight) {
  std::array<double, kStripes> partial{};
  for_each_stripe(n_terms, [&](std::size_t stripe, std::size_t b, std::size_t e) {
    TermSession session(params);
    double acc = 0.0;
    for (std::size_t i = b; i < e; ++i) {
      session.reset();
      const ad::TVar root = term(static_cast<int>(i), session);
      acc += session.value_of(root, weight(static_cast<int>(i)));
    }
    partial[stripe] = acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  if (std::isnan(total))
    throw std::runtime_error("loss evaluated to NaN");
  return total;
}

double loss_gradient(const MlpParams& params, int n_terms, const TermFn& term,
                     const WeightFn& weight, std::span<double> grad) {
  const std::size_t np = params.parameter_count();
  if (grad.size() != np)
    throw std::invalid_argument("loss_gradient: gradient size mismatch");
  std::array<double, kStripes> partial{};
  std::vector<std::vector<double>> stripe_grad(kStripes);
  for_each_stripe(n_terms, [&](std::size_t stripe, std::size_t b, std::size_t e) {
    TermSession session(params);
    auto& g = stripe_grad[stripe];
    g.assign(np, 0.0);
    double acc = 0.0;
    for (std::size_t i = b; i < e; ++i) {
      session.reset();
      const ad::TVar root = term(static_cast<int>(i), session);
      acc += session.backward(root, weight(static_cast<int>(i)), g);
    }
    partial[stripe] = acc;
  });
  double total = 0.0;
  std::fill(grad.begin(), grad.end(), 0.0);
  for (std::size_t s = 0; s < kStripes; ++s) {
    total += partial[s];
    if (!stripe_grad[s].empty())
      for (std::size_t j = 0; j < np; ++j) grad[j] += stripe_grad[s][j];
  }
  if (std::isnan(total))
    throw std::runtime_error(
        "loss evaluated to NaN; gradient is not defined");
  return total;
}

}  // namespace pdearena
