#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "velling/rng.hpp"
#include "velling/solver.hpp"

namespace velling {

namespace {

constexpr long long kBatchSize = 8192;

struct Stats {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }

  // Chan et al. pairwise merge; associative enough for fixed merge order.
  void merge(const Stats& o) {
    if (o.n == 0) return;
    if (n == 0) { *this = o; return; }
    const double d = o.mean - mean;
    const long long t = n + o.n;
    mean += d * o.n / t;
    m2 += o.m2 + d * d * (static_cast<double>(n) * o.n / t);
    n = t;
  }
};

struct WalkEnd {
  Complex exit;
  int label;
};

WalkEnd walk(const StarDomain& d, Complex z, double eps, long long max_steps,
             SplitMix64& rng) {
  for (long long step = 0; step < max_steps; ++step) {
    const auto [dist, label] = d.boundary_proximity(z);
    if (dist < eps) {
      const auto [exit, lbl] = d.nearest_boundary(z);
      return {exit, lbl};
    }
    z += std::polar(dist, kTwoPi * rng.uniform());
  }
  // Walks terminate almost surely; a cusp can stall one for a long time, so
  // classify at the current nearest point after the cap.
  const auto [exit, lbl] = d.nearest_boundary(z);
  return {exit, lbl};
}

template <typename Score>
Estimate run_wos(const StarDomain& d, const Complex& start, const WosParams& params,
                 Score&& score) {
  if (!d.contains(start))
    throw std::domain_error("walk on spheres: start point is not interior");
  if (params.n < 1) throw std::invalid_argument("walk on spheres: n must be >= 1");
  if (!(params.eps > 0.0)) throw std::invalid_argument("walk on spheres: eps must be > 0");
  if (d.distance_to_boundary(start).first < params.eps)
    throw std::invalid_argument("walk on spheres: eps exceeds the start distance");

  const long long batches = (params.n + kBatchSize - 1) / kBatchSize;
  std::vector<Stats> partial(batches);

  auto run_batch = [&](long long b) {
    const long long lo = b * kBatchSize;
    const long long hi = std::min(lo + kBatchSize, params.n);
    Stats s;
    for (long long i = lo; i < hi; ++i) {
      SplitMix64 rng = trajectory_stream(params.seed, static_cast<std::uint64_t>(i));
      const WalkEnd end = walk(d, start, params.eps, params.max_steps, rng);
      s.add(score(end));
    }
    partial[b] = s;
  };

  int threads = params.threads;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 1 || batches == 1) {
    for (long long b = 0; b < batches; ++b) run_batch(b);
  } else {
    std::atomic<long long> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (long long b = next.fetch_add(1); b < batches; b = next.fetch_add(1))
          run_batch(b);
      });
    for (auto& t : pool) t.join();
  }

  Stats total;
  for (const auto& s : partial) total.merge(s);  // fixed order: batch index

  Estimate e;
  e.value = total.mean;
  e.samples = total.n;
  e.seed = params.seed;
  e.std_error = total.n > 1 ? std::sqrt(total.m2 / (static_cast<double>(total.n) *
                                                    (total.n - 1)))
                            : 0.0;
  e.bias_bound = params.bias_constant * (params.eps + d.max_delta());
  return e;
}

}  // namespace

Estimate wos_harmonic_measure(const StarDomain& d, const Complex& start,
                              const std::set<int>& target, const WosParams& params) {
  return run_wos(d, start, params, [&target](const WalkEnd& end) {
    return target.count(end.label) ? 1.0 : 0.0;
  });
}

Estimate wos_green(const StarDomain& d, const Complex& pole, const Complex& z,
                   const WosParams& params) {
  if (z == pole) throw std::invalid_argument("wos_green: z coincides with the pole");
  if (!d.contains(pole)) throw std::domain_error("wos_green: pole is not interior");
  Estimate e = run_wos(d, z, params, [&pole](const WalkEnd& end) {
    return std::log(std::abs(end.exit - pole));
  });
  e.value += -std::log(std::abs(z - pole));
  return e;
}

}  // namespace velling
