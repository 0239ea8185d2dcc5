#include "qmem/kernels.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <random>
#include <stdexcept>

#include <omp.h>

namespace qmem {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block) {
  return splitmix64(splitmix64(seed) ^ (block * 0xD1B54A32D192ED03ULL));
}

namespace {

void check_ensemble(int shots, int width) {
  if (shots < 1) throw std::invalid_argument("ensemble: shots must be >= 1");
  if (width < 1) throw std::invalid_argument("ensemble: width must be >= 1");
}

void run_block(const InhomogeneityModel& model, int shots, std::uint64_t seed, int width,
               const ShotKernel& kernel, int block, Complex* partial) {
  std::mt19937_64 rng(block_seed(seed, static_cast<std::uint64_t>(block)));
  std::vector<Complex> one(static_cast<std::size_t>(width));
  const int first = block * kShotBlock;
  const int last = std::min(shots, first + kShotBlock);
  for (int s = first; s < last; ++s) {
    const ShotDraw draw = draw_shot(model, rng);
    std::fill(one.begin(), one.end(), Complex(0.0, 0.0));
    kernel(draw, one.data());
    for (int w = 0; w < width; ++w) partial[w] += one[static_cast<std::size_t>(w)];
  }
}

std::vector<Complex> reduce(const std::vector<Complex>& partials, int blocks, int width,
                            int shots) {
  std::vector<Complex> mean(static_cast<std::size_t>(width), Complex(0.0, 0.0));
  for (int b = 0; b < blocks; ++b) {
    for (int w = 0; w < width; ++w) {
      mean[static_cast<std::size_t>(w)] += partials[static_cast<std::size_t>(b) * width + w];
    }
  }
  for (auto& m : mean) m /= static_cast<double>(shots);
  return mean;
}

}  // namespace

std::vector<Complex> ensemble_mean_serial(const InhomogeneityModel& model, int shots,
                                          std::uint64_t seed, int width,
                                          const ShotKernel& kernel) {
  check_ensemble(shots, width);
  const int blocks = (shots + kShotBlock - 1) / kShotBlock;
  std::vector<Complex> partials(static_cast<std::size_t>(blocks) * width, Complex(0.0, 0.0));
  for (int b = 0; b < blocks; ++b) {
    run_block(model, shots, seed, width, kernel, b, &partials[static_cast<std::size_t>(b) * width]);
  }
  return reduce(partials, blocks, width, shots);
}

std::vector<Complex> ensemble_mean_omp(const InhomogeneityModel& model, int shots,
                                       std::uint64_t seed, int width, const ShotKernel& kernel) {
  check_ensemble(shots, width);
  const int blocks = (shots + kShotBlock - 1) / kShotBlock;
  std::vector<Complex> partials(static_cast<std::size_t>(blocks) * width, Complex(0.0, 0.0));
  std::exception_ptr error;
  std::mutex error_mutex;
#pragma omp parallel for schedule(static)
  for (int b = 0; b < blocks; ++b) {
    try {
      run_block(model, shots, seed, width, kernel, b,
                &partials[static_cast<std::size_t>(b) * width]);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return reduce(partials, blocks, width, shots);
}

std::vector<Complex> ensemble_mean(Exec exec, const InhomogeneityModel& model, int shots,
                                   std::uint64_t seed, int width, const ShotKernel& kernel) {
  return exec == Exec::OpenMP ? ensemble_mean_omp(model, shots, seed, width, kernel)
                              : ensemble_mean_serial(model, shots, seed, width, kernel);
}

void for_each_index(Exec exec, int n, const std::function<void(int)>& f) {
  if (exec == Exec::Serial) {
    for (int k = 0; k < n; ++k) f(k);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < n; ++k) {
    try {
      f(k);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

int worker_threads() { return omp_get_max_threads(); }

void set_worker_threads(int n) {
  if (n < 1) throw std::invalid_argument("worker threads must be >= 1");
  omp_set_num_threads(n);
}

}  // namespace qmem
