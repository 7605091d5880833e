#ifndef PDEARENA_NET_HPP
#define PDEARENA_NET_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pdearena {

/// Dense feed-forward network with tanh hidden activations and an identity
/// output layer. Weights are row-major (out x in).
struct Layer {
  int in = 0, out = 0;
  std::vector<double> w;
  std::vector<double> b;
};

struct MlpParams {
  std::vector<int> arch;  // full widths: input, hidden..., output
  std::uint64_t seed = 0;
  std::vector<Layer> layers;

  int input_width() const { return arch.front(); }
  int output_width() const { return arch.back(); }
  std::size_t parameter_count() const;
};

/// Glorot-uniform weights, zero biases; bit-identical for equal (arch, seed).
/// `arch` includes the input width and must have at least two entries.
MlpParams init_params(std::span<const int> arch, std::uint64_t seed);

std::vector<double> pack_params(const MlpParams& p);
void unpack_params(std::span<const double> flat, MlpParams& p);

std::vector<double> forward(const MlpParams& p, std::span<const double> x);

/// Value, gradient, and pure (diagonal) second derivatives of every output
/// with respect to every input coordinate, row-major [out][in].
struct Jet2 {
  int n_out = 0, n_in = 0;
  std::vector<double> value;
  std::vector<double> first;
  std::vector<double> second;

  double& d1(int out, int in) { return first[out * n_in + in]; }
  double& d2(int out, int in) { return second[out * n_in + in]; }
  double d1(int out, int in) const { return first[out * n_in + in]; }
  double d2(int out, int in) const { return second[out * n_in + in]; }
  /// Sum of pure spatial second derivatives, skipping the first
  /// `skip_leading` coordinates (the time slot of evolution problems).
  double laplacian(int out, int skip_leading = 0) const {
    double s = 0.0;
    for (int k = skip_leading; k < n_in; ++k) s += d2(out, k);
    return s;
  }
};

/// Forward record of one evaluation point: activations plus per-seed
/// pre-activation first/second derivatives, everything the structured
/// backward pass needs. `seeds` is 0 for a value-only evaluation or n_in
/// for a full jet.
struct JetTrace {
  int seeds = 0;
  std::vector<double> act;  // activations, all layers incl. input
  std::vector<double> dz;   // per layer, per seed (layers 1..L)
  std::vector<double> sz;
  Jet2 jet;
};

/// Second-order forward propagation: one truncated-Taylor pass per input
/// coordinate. With seeds == 0 this is a plain (traced) forward pass.
void jet_forward(const MlpParams& p, std::span<const double> x, int seeds,
                 JetTrace& trace);

/// Reverse pass through a recorded trace. `seed` holds the adjoints of the
/// jet outputs (value/first/second, same layout as Jet2; first/second are
/// ignored for value-only traces). Accumulates into `grad`, which uses the
/// pack_params layout.
void jet_backward(const MlpParams& p, const JetTrace& trace, const Jet2& seed,
                  std::span<double> grad);

/// Convenience wrappers.
Jet2 jet2(const MlpParams& p, std::span<const double> x);

/// Checkpoint round trip: {arch, seed, params}. Doubles survive bit-exactly.
std::string params_to_json(const MlpParams& p);
MlpParams params_from_json(const std::string& text);

}  // namespace pdearena

#endif
