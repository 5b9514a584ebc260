#include "reachsafe/util.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace reachsafe {

double softplus(double r) {
  if (r > 30.0) return r;
  return std::log1p(std::exp(r));
}

double softplus_grad(double r) {
  if (r > 30.0) return 1.0;
  if (r < -30.0) return std::exp(r);
  return 1.0 / (1.0 + std::exp(-r));
}

double softplus_inverse(double p) {
  if (!(p > 0.0)) throw std::invalid_argument("softplus_inverse: need p > 0");
  if (p > 30.0) return p;
  return std::log(std::expm1(p));
}

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * M_PI);  // (-pi, pi], remainder gives [-pi, pi]
  if (w <= -M_PI) w += 2.0 * M_PI;
  return w;
}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

int Rng::uniform_int(int lo, int hi) {
  // Modulo bias is irrelevant for the small ranges used here.
  return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
}

std::uint64_t Rng::substream(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 step keeps episode substreams decorrelated and order-free.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double tree_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  std::size_t half = xs.size() / 2;
  return tree_sum(xs.first(half)) + tree_sum(xs.subspan(half));
}

std::size_t worker_count(int requested) {
  if (const char* env = std::getenv("REACHSAFE_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  if (requested > 0) return static_cast<std::size_t>(requested);
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  if (workers <= 1 || n < 2 * workers) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk;
    if (lo >= n) break;
    std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf, 16);
}

}  // namespace reachsafe
