#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dgns {

/// Thrown when a field operation receives or produces invalid data.
class FieldError : public std::runtime_error {
 public:
  explicit FieldError(const std::string& what) : std::runtime_error(what) {}
};

/// Number of worker threads for node-local loops. Controlled by the
/// DGNS_THREADS environment variable; unset or invalid means 1 (fully
/// deterministic single-threaded mode). Parallel loops only ever split
/// disjoint index ranges, so results are bit-identical for any count.
int thread_count();

/// Runs f(begin, end) over [0, n) split into contiguous chunks, one per
/// worker. With thread_count() == 1 this is a plain function call.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& f);

/// Integral over [a, b] of the piecewise-linear interpolant through
/// (times[i], values[i]). Requires strictly increasing times covering
/// [a, b] up to a 1e-12 slack at either end.
double pwl_integral(const std::vector<double>& times, const std::vector<double>& values,
                    double a, double b);

/// Value of the same piecewise-linear interpolant at t.
double pwl_value(const std::vector<double>& times, const std::vector<double>& values, double t);

}  // namespace dgns
