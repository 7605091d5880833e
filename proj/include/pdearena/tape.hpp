#ifndef PDEARENA_TAPE_HPP
#define PDEARENA_TAPE_HPP

#include <vector>

namespace pdearena::ad {

/// Minimal reverse-mode tape used to combine network outputs into scalar
/// loss terms. Heavy lifting (the network itself) is differentiated by the
/// structured jet backward pass; this tape only covers the thin polynomial
/// layer on top, so a handful of nodes per collocation point suffice.
class Tape {
 public:
  int leaf() {
    nodes_.push_back({0.0, 0.0, -1, -1});
    return static_cast<int>(nodes_.size()) - 1;
  }
  int unary(int a, double da) {
    nodes_.push_back({da, 0.0, a, -1});
    return static_cast<int>(nodes_.size()) - 1;
  }
  int binary(int a, int b, double da, double db) {
    nodes_.push_back({da, db, a, b});
    return static_cast<int>(nodes_.size()) - 1;
  }

  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }

  /// Adjoints of every node with respect to `root`, scaled by `scale`.
  void backward(int root, double scale, std::vector<double>& adj) const {
    adj.assign(nodes_.size(), 0.0);
    adj[root] = scale;
    for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
      const double a = adj[i];
      if (a == 0.0) continue;
      const Node& n = nodes_[i];
      if (n.ia >= 0) adj[n.ia] += n.da * a;
      if (n.ib >= 0) adj[n.ib] += n.db * a;
    }
  }

 private:
  struct Node {
    double da, db;
    int ia, ib;
  };
  std::vector<Node> nodes_;
};

/// Tape-tracked scalar. Arithmetic records adjoint weights as it computes.
struct TVar {
  Tape* tape = nullptr;
  int idx = -1;
  double v = 0.0;
};

inline TVar operator+(TVar a, TVar b) {
  return {a.tape, a.tape->binary(a.idx, b.idx, 1.0, 1.0), a.v + b.v};
}
inline TVar operator-(TVar a, TVar b) {
  return {a.tape, a.tape->binary(a.idx, b.idx, 1.0, -1.0), a.v - b.v};
}
inline TVar operator*(TVar a, TVar b) {
  return {a.tape, a.tape->binary(a.idx, b.idx, b.v, a.v), a.v * b.v};
}
inline TVar operator-(TVar a) { return {a.tape, a.tape->unary(a.idx, -1.0), -a.v}; }
inline TVar operator*(double c, TVar a) {
  return {a.tape, a.tape->unary(a.idx, c), c * a.v};
}
inline TVar operator*(TVar a, double c) { return c * a; }
inline TVar operator+(TVar a, double c) {
  return {a.tape, a.tape->unary(a.idx, 1.0), a.v + c};
}
inline TVar operator+(double c, TVar a) { return a + c; }
inline TVar operator-(TVar a, double c) { return a + (-c); }
inline TVar operator-(double c, TVar a) {
  return {a.tape, a.tape->unary(a.idx, -1.0), c - a.v};
}
inline TVar square(TVar a) {
  return {a.tape, a.tape->unary(a.idx, 2.0 * a.v), a.v * a.v};
}

}  // namespace pdearena::ad

#endif
