#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qmem/error_dynamics.hpp"

namespace qmem {

// Shots are grouped in fixed blocks; block b draws from its own generator
// seeded by block_seed(seed, b). Partial sums are reduced in block order, so
// serial and OpenMP results are bitwise identical for any thread count.
inline constexpr int kShotBlock = 64;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block);

enum class Exec { Serial, OpenMP };

/// Writes `width` values for one ensemble member.
using ShotKernel = std::function<void(const ShotDraw&, Complex* out)>;

std::vector<Complex> ensemble_mean_serial(const InhomogeneityModel& model, int shots,
                                          std::uint64_t seed, int width, const ShotKernel& kernel);
std::vector<Complex> ensemble_mean_omp(const InhomogeneityModel& model, int shots,
                                       std::uint64_t seed, int width, const ShotKernel& kernel);
std::vector<Complex> ensemble_mean(Exec exec, const InhomogeneityModel& model, int shots,
                                   std::uint64_t seed, int width, const ShotKernel& kernel);

/// out[k] = f(k) for k < n, serial or with one OpenMP task per index.
void for_each_index(Exec exec, int n, const std::function<void(int)>& f);

/// Number of worker threads OpenMP regions will use.
int worker_threads();
void set_worker_threads(int n);

}  // namespace qmem
