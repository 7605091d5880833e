#ifndef PDEARENA_TIMER_HPP
#define PDEARENA_TIMER_HPP

#include <chrono>

namespace pdearena {

class WallTimer {
 public:
  WallTimer() : start_(clock::now()) {}
  void reset() { start_ = clock::now(); }
  double seconds() const {
    return std::chrono::duration<double>(clock::now() - start_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_;
};

}  // namespace pdearena

#endif
