#pragma once

#include <atomic>
#include <complex>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace borelsum {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

/// Errors raised by hypothesis/precondition violations (bad inputs, bad specs).
class validation_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Errors raised when an iteration or series fails to converge.
class convergence_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Errors raised by numerical preconditions at run time (inadmissible
/// direction, value on a branch cut, singular denominator).
class numeric_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
  while (a > pi) a -= 2.0 * pi;
  while (a <= -pi) a += 2.0 * pi;
  return a;
}

/// Principal-branch complex power z^k, erroring on the cut (-inf, 0].
inline cplx principal_pow(cplx z, double k) {
  if (z == cplx(0.0, 0.0)) return {0.0, 0.0};
  if (std::imag(z) == 0.0 && std::real(z) < 0.0)
    throw numeric_error("principal_pow: argument on the negative real cut");
  return std::pow(z, k);
}

/// (r e^{i phi})^k with the phase supplied explicitly, phi in (-pi, pi).
inline cplx ray_pow(double r, double phi, double k) {
  const double rk = std::pow(r, k);
  return {rk * std::cos(k * phi), rk * std::sin(k * phi)};
}

/// Warnings accumulated by operations that degrade gracefully.
using diagnostics = std::vector<std::string>;

/// Runs fn(i) for i in [0, n) over `workers` threads. Each index writes its
/// own output slot, so the result does not depend on the thread count.
template <typename F>
void parallel_for(std::size_t n, int workers, F&& fn) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const int nw = static_cast<int>(std::min<std::size_t>(workers, n));
  std::vector<std::thread> pool;
  pool.reserve(nw);
  std::atomic<std::size_t> next{0};
  for (int t = 0; t < nw; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace borelsum
