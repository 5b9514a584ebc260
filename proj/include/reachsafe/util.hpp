#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace reachsafe {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Smooth positivity transform used to keep learned parameters strictly positive.
double softplus(double r);
double softplus_grad(double r);       // d softplus / dr = sigmoid(r)
double softplus_inverse(double p);    // p > 0

double wrap_angle(double a);          // into (-pi, pi]

// Deterministic uniform draws. std::uniform_real_distribution output is
// implementation-defined, so the engine output is mapped by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform01();                              // [0, 1)
  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);                 // inclusive bounds
  std::uint64_t raw() { return engine_(); }
  static std::uint64_t substream(std::uint64_t seed, std::uint64_t index);

 private:
  std::mt19937_64 engine_;
};

// Fixed-shape pairwise reduction: result depends only on the element order,
// never on how the fill was parallelized.
double tree_sum(std::span<const double> xs);

std::size_t worker_count(int requested);  // env REACHSAFE_THREADS wins; 0 = auto
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t, std::size_t)>& body);

std::string format_double(double v);      // shortest round-trip decimal
std::string fnv1a_hex(const std::string& bytes);

// Error taxonomy mapped to process exit codes by the CLI.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace reachsafe
