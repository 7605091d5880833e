#include "pdearena/net.hpp"

#include <cmath>
#include <json.hpp>

#include "pdearena/errors.hpp"
#include "pdearena/rng.hpp"

namespace pdearena {

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.w.size() + l.b.size();
  return n;
}

MlpParams init_params(std::span<const int> arch, std::uint64_t seed) {
  if (arch.size() < 2) throw InvalidArgument("network needs >= 2 layer widths");
  for (int w : arch)
    if (w < 1) throw InvalidArgument("layer widths must be positive");
  MlpParams p;
  p.arch.assign(arch.begin(), arch.end());
  p.seed = seed;
  CounterRng rng(seed);
  for (std::size_t l = 0; l + 1 < arch.size(); ++l) {
    Layer layer;
    layer.in = arch[l];
    layer.out = arch[l + 1];
    layer.w.resize(static_cast<std::size_t>(layer.in) * layer.out);
    layer.b.assign(layer.out, 0.0);
    const double bound = std::sqrt(6.0 / (layer.in + layer.out));
    for (auto& w : layer.w) w = rng.next_double(-bound, bound);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

std::vector<double> pack_params(const MlpParams& p) {
  std::vector<double> flat;
  flat.reserve(p.parameter_count());
  for (const auto& l : p.layers) {
    flat.insert(flat.end(), l.w.begin(), l.w.end());
    flat.insert(flat.end(), l.b.begin(), l.b.end());
  }
  return flat;
}

void unpack_params(std::span<const double> flat, MlpParams& p) {
  if (flat.size() != p.parameter_count())
    throw InvalidArgument("unpack_params: length mismatch");
  std::size_t k = 0;
  for (auto& l : p.layers) {
    std::copy_n(flat.begin() + k, l.w.size(), l.w.begin());
    k += l.w.size();
    std::copy_n(flat.begin() + k, l.b.size(), l.b.begin());
    k += l.b.size();
  }
}

std::vector<double> forward(const MlpParams& p, std::span<const double> x) {
  if (static_cast<int>(x.size()) != p.input_width())
    throw InvalidArgument("forward: input width mismatch");
  std::vector<double> a(x.begin(), x.end()), z;
  const int n_layers = static_cast<int>(p.layers.size());
  for (int l = 0; l < n_layers; ++l) {
    const Layer& layer = p.layers[l];
    z.assign(layer.out, 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double* wr = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
      double s = layer.b[o];
      for (int i = 0; i < layer.in; ++i) s += wr[i] * a[i];
      z[o] = s;
    }
    if (l + 1 < n_layers)
      for (auto& v : z) v = std::tanh(v);
    a.swap(z);
  }
  return a;
}

namespace {

struct Offsets {
  std::vector<int> act;   // start of layer activations in trace.act
  std::vector<int> dz;    // start of layer (dz|sz) blocks, stride seeds*width
  int act_total = 0, dz_total = 0;
};

Offsets layout(const MlpParams& p, int seeds) {
  Offsets off;
  off.act.resize(p.arch.size());
  off.dz.resize(p.arch.size());
  int a = 0, d = 0;
  for (std::size_t l = 0; l < p.arch.size(); ++l) {
    off.act[l] = a;
    a += p.arch[l];
    off.dz[l] = d;
    if (l > 0) d += p.arch[l] * seeds;
  }
  off.act_total = a;
  off.dz_total = d;
  return off;
}

}  // namespace

void jet_forward(const MlpParams& p, std::span<const double> x, int seeds,
                 JetTrace& trace) {
  const int n_in = p.input_width(), n_out = p.output_width();
  if (static_cast<int>(x.size()) != n_in)
    throw InvalidArgument("jet_forward: input width mismatch");
  if (seeds != 0 && seeds != n_in)
    throw InvalidArgument("jet_forward: seeds must be 0 or the input width");
  const Offsets off = layout(p, seeds);
  trace.seeds = seeds;
  trace.act.assign(off.act_total, 0.0);
  trace.dz.assign(off.dz_total, 0.0);
  trace.sz.assign(off.dz_total, 0.0);
  std::copy(x.begin(), x.end(), trace.act.begin());

  const int n_layers = static_cast<int>(p.layers.size());
  // post-activation derivatives of the previous layer, per seed
  std::vector<double> da_prev, sa_prev, da_cur, sa_cur;
  for (int l = 0; l < n_layers; ++l) {
    const Layer& layer = p.layers[l];
    const double* a_prev = trace.act.data() + off.act[l];
    double* a_cur = trace.act.data() + off.act[l + 1];
    double* dz = trace.dz.data() + off.dz[l + 1];
    double* sz = trace.sz.data() + off.dz[l + 1];

    for (int o = 0; o < layer.out; ++o) {
      const double* wr = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
      double s = layer.b[o];
      for (int i = 0; i < layer.in; ++i) s += wr[i] * a_prev[i];
      a_cur[o] = s;
    }
    for (int k = 0; k < seeds; ++k) {
      double* dzk = dz + k * layer.out;
      double* szk = sz + k * layer.out;
      if (l == 0) {
        // da_0 = e_k, sa_0 = 0: first derivatives pick one weight column.
        for (int o = 0; o < layer.out; ++o) {
          dzk[o] = layer.w[static_cast<std::size_t>(o) * layer.in + k];
          szk[o] = 0.0;
        }
      } else {
        const double* dak = da_prev.data() + k * layer.in;
        const double* sak = sa_prev.data() + k * layer.in;
        for (int o = 0; o < layer.out; ++o) {
          const double* wr =
              layer.w.data() + static_cast<std::size_t>(o) * layer.in;
          double sd = 0.0, ss = 0.0;
          for (int i = 0; i < layer.in; ++i) {
            sd += wr[i] * dak[i];
            ss += wr[i] * sak[i];
          }
          dzk[o] = sd;
          szk[o] = ss;
        }
      }
    }
    if (l + 1 < n_layers) {
      da_cur.assign(static_cast<std::size_t>(seeds) * layer.out, 0.0);
      sa_cur.assign(static_cast<std::size_t>(seeds) * layer.out, 0.0);
      for (int o = 0; o < layer.out; ++o) a_cur[o] = std::tanh(a_cur[o]);
      for (int k = 0; k < seeds; ++k) {
        const double* dzk = dz + k * layer.out;
        const double* szk = sz + k * layer.out;
        double* dak = da_cur.data() + k * layer.out;
        double* sak = sa_cur.data() + k * layer.out;
        for (int o = 0; o < layer.out; ++o) {
          const double t = a_cur[o];
          const double t1 = 1.0 - t * t;
          const double t2 = -2.0 * t * t1;
          dak[o] = t1 * dzk[o];
          sak[o] = t1 * szk[o] + t2 * dzk[o] * dzk[o];
        }
      }
      da_prev.swap(da_cur);
      sa_prev.swap(sa_cur);
    }
  }

  // identity output layer: jet components read straight from the trace
  trace.jet.n_out = n_out;
  trace.jet.n_in = seeds;
  const double* a_top = trace.act.data() + off.act[p.arch.size() - 1];
  trace.jet.value.assign(a_top, a_top + n_out);
  trace.jet.first.assign(static_cast<std::size_t>(n_out) * seeds, 0.0);
  trace.jet.second.assign(static_cast<std::size_t>(n_out) * seeds, 0.0);
  const double* dz_top = trace.dz.data() + off.dz[p.arch.size() - 1];
  const double* sz_top = trace.sz.data() + off.dz[p.arch.size() - 1];
  for (int k = 0; k < seeds; ++k)
    for (int o = 0; o < n_out; ++o) {
      trace.jet.first[o * seeds + k] = dz_top[k * n_out + o];
      trace.jet.second[o * seeds + k] = sz_top[k * n_out + o];
    }
}

void jet_backward(const MlpParams& p, const JetTrace& trace, const Jet2& seed,
                  std::span<double> grad) {
  const int n_out = p.output_width();
  const int seeds = trace.seeds;
  const Offsets off = layout(p, seeds);
  const int n_layers = static_cast<int>(p.layers.size());

  // layer offsets into the flat gradient
  std::vector<std::size_t> gofs(n_layers);
  {
    std::size_t k = 0;
    for (int l = 0; l < n_layers; ++l) {
      gofs[l] = k;
      k += p.layers[l].w.size() + p.layers[l].b.size();
    }
    if (grad.size() != k) throw InvalidArgument("jet_backward: grad size");
  }

  // adjoints of the current layer pre-activations (z) per seed
  std::vector<double> zbar(seed.value.begin(), seed.value.end());
  std::vector<double> dzbar(static_cast<std::size_t>(seeds) * n_out);
  std::vector<double> szbar(static_cast<std::size_t>(seeds) * n_out);
  for (int k = 0; k < seeds; ++k)
    for (int o = 0; o < n_out; ++o) {
      dzbar[k * n_out + o] = seed.first[o * seeds + k];
      szbar[k * n_out + o] = seed.second[o * seeds + k];
    }

  std::vector<double> abar_prev, dabar_prev, sabar_prev, da_sc, sa_sc;
  for (int l = n_layers - 1; l >= 0; --l) {
    const Layer& layer = p.layers[l];
    const double* a_prev = trace.act.data() + off.act[l];
    const double* dz_prev = l > 0 ? trace.dz.data() + off.dz[l] : nullptr;
    const double* sz_prev = l > 0 ? trace.sz.data() + off.dz[l] : nullptr;
    double* gw = grad.data() + gofs[l];
    double* gb = gw + layer.w.size();

    // recompute the previous layer's post-activation jets
    da_sc.assign(static_cast<std::size_t>(seeds) * layer.in, 0.0);
    sa_sc.assign(static_cast<std::size_t>(seeds) * layer.in, 0.0);
    if (l > 0) {
      for (int k = 0; k < seeds; ++k)
        for (int i = 0; i < layer.in; ++i) {
          const double t = a_prev[i];
          const double t1 = 1.0 - t * t;
          const double t2 = -2.0 * t * t1;
          const double d = dz_prev[k * layer.in + i];
          da_sc[k * layer.in + i] = t1 * d;
          sa_sc[k * layer.in + i] = t1 * sz_prev[k * layer.in + i] + t2 * d * d;
        }
    } else {
      for (int k = 0; k < seeds; ++k) da_sc[k * layer.in + k] = 1.0;
    }

    // parameter gradients and input adjoints of the affine map
    abar_prev.assign(layer.in, 0.0);
    dabar_prev.assign(static_cast<std::size_t>(seeds) * layer.in, 0.0);
    sabar_prev.assign(static_cast<std::size_t>(seeds) * layer.in, 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double* wr = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
      double* gwr = gw + static_cast<std::size_t>(o) * layer.in;
      const double zb = zbar[o];
      gb[o] += zb;
      for (int i = 0; i < layer.in; ++i) {
        gwr[i] += zb * a_prev[i];
        abar_prev[i] += wr[i] * zb;
      }
      for (int k = 0; k < seeds; ++k) {
        const double db = dzbar[k * layer.out + o];
        const double sb = szbar[k * layer.out + o];
        if (db == 0.0 && sb == 0.0) continue;
        const double* dak = da_sc.data() + k * layer.in;
        const double* sak = sa_sc.data() + k * layer.in;
        double* dabk = dabar_prev.data() + k * layer.in;
        double* sabk = sabar_prev.data() + k * layer.in;
        for (int i = 0; i < layer.in; ++i) {
          gwr[i] += db * dak[i] + sb * sak[i];
          dabk[i] += wr[i] * db;
          sabk[i] += wr[i] * sb;
        }
      }
    }

    if (l == 0) break;

    // tanh backward: post-activation adjoints -> pre-activation adjoints
    zbar.assign(layer.in, 0.0);
    dzbar.assign(static_cast<std::size_t>(seeds) * layer.in, 0.0);
    szbar.assign(static_cast<std::size_t>(seeds) * layer.in, 0.0);
    for (int i = 0; i < layer.in; ++i) {
      const double t = a_prev[i];
      const double t1 = 1.0 - t * t;
      const double t2 = -2.0 * t * t1;
      const double t3 = -2.0 * t1 * (1.0 - 3.0 * t * t);
      double zb = abar_prev[i] * t1;
      for (int k = 0; k < seeds; ++k) {
        const double d = dz_prev[k * layer.in + i];
        const double s = sz_prev[k * layer.in + i];
        const double dab = dabar_prev[k * layer.in + i];
        const double sab = sabar_prev[k * layer.in + i];
        zb += dab * t2 * d + sab * (t2 * s + t3 * d * d);
        dzbar[k * layer.in + i] = dab * t1 + sab * 2.0 * t2 * d;
        szbar[k * layer.in + i] = sab * t1;
      }
      zbar[i] = zb;
    }
  }
}

Jet2 jet2(const MlpParams& p, std::span<const double> x) {
  JetTrace trace;
  jet_forward(p, x, p.input_width(), trace);
  return trace.jet;
}

std::string params_to_json(const MlpParams& p) {
  nlohmann::json j;
  j["arch"] = p.arch;
  j["seed"] = p.seed;
  j["params"] = pack_params(p);
  return j.dump();
}

MlpParams params_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const auto arch = j.at("arch").get<std::vector<int>>();
  MlpParams p = init_params(arch, j.at("seed").get<std::uint64_t>());
  const auto flat = j.at("params").get<std::vector<double>>();
  unpack_params(flat, p);
  return p;
}

}  // namespace pdearena
