#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace djst {

// Deterministic random source. Every draw is an explicit transform of the raw
// engine output, so identical seeds give identical streams regardless of the
// standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), unbiased.
  int uniform_index(int n) {
    assert(n > 0);
    const auto nn = static_cast<std::uint64_t>(n);
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % nn;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<int>(x % nn);
  }

  // Standard normal via Box-Muller; consumes exactly two engine words.
  double normal01() {
    const double u1 = std::max(uniform01(), 0x1.0p-53);
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Gamma(shape, rate) by Marsaglia-Tsang squeeze, with the shape<1 boost.
  double gamma(double shape, double rate = 1.0) {
    assert(shape > 0.0 && rate > 0.0);
    if (shape < 1.0) {
      const double u = std::max(uniform01(), 0x1.0p-53);
      return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      const double x = normal01();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = std::max(uniform01(), 0x1.0p-53);
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
        return d * v / rate;
      }
    }
  }

  std::vector<double> dirichlet(const std::vector<double>& concentration) {
    std::vector<double> draw(concentration.size());
    double total = 0.0;
    for (std::size_t i = 0; i < concentration.size(); ++i) {
      draw[i] = gamma(concentration[i]);
      total += draw[i];
    }
    if (total <= 0.0) {
      const double flat = 1.0 / static_cast<double>(draw.size());
      for (double& v : draw) v = flat;
      return draw;
    }
    for (double& v : draw) v /= total;
    return draw;
  }

  // Index drawn proportionally to non-negative weights (cumulative method).
  int categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    assert(total > 0.0);
    const double u = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  std::string state_text() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
  }

  void restore(const std::string& text) {
    std::istringstream is(text);
    is >> engine_;
  }

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace djst
