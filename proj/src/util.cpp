#include "dgns/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace dgns {

int thread_count() {
  static const int cached = [] {
    const char* env = std::getenv("DGNS_THREADS");
    if (env == nullptr) return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || v < 1) return 1;
    return static_cast<int>(std::min(v, 64L));
  }();
  return cached;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& f) {
  const int workers = thread_count();
  if (workers <= 1 || n < 2) {
    f(0, n);
    return;
  }
  const std::size_t chunks = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  const std::size_t base = n / chunks;
  const std::size_t rem = n % chunks;
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  std::size_t begin = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t len = base + (c < rem ? 1 : 0);
    pool.emplace_back([&f, begin, len] { f(begin, begin + len); });
    begin += len;
  }
  for (auto& t : pool) t.join();
}

namespace {
constexpr double kWindowSlack = 1e-12;
}

double pwl_value(const std::vector<double>& times, const std::vector<double>& values, double t) {
  if (times.size() != values.size() || times.empty()) {
    throw std::invalid_argument("pwl_value: times/values size mismatch or empty");
  }
  if (t <= times.front() + kWindowSlack && t >= times.front() - kWindowSlack) return values.front();
  if (t <= times.back() + kWindowSlack && t >= times.back() - kWindowSlack) return values.back();
  if (t < times.front() || t > times.back()) {
    throw std::invalid_argument("pwl_value: t outside sample range");
  }
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - times.begin());
  const double t0 = times[j - 1], t1 = times[j];
  const double w = (t - t0) / (t1 - t0);
  return values[j - 1] * (1.0 - w) + values[j] * w;
}

double pwl_integral(const std::vector<double>& times, const std::vector<double>& values,
                    double a, double b) {
  if (times.size() != values.size() || times.size() < 1) {
    throw std::invalid_argument("pwl_integral: times/values size mismatch or empty");
  }
  if (b < a) throw std::invalid_argument("pwl_integral: b < a");
  if (a < times.front() - kWindowSlack || b > times.back() + kWindowSlack) {
    throw std::invalid_argument("pwl_integral: window exceeds sample range");
  }
  a = std::max(a, times.front());
  b = std::min(b, times.back());
  if (b <= a) return 0.0;
  const double fa = pwl_value(times, values, a);
  const double fb = pwl_value(times, values, b);
  // Trapezoid over [a, first node >= a], interior full cells, [last node <= b, b].
  double sum = 0.0;
  std::size_t j = 0;
  while (j < times.size() && times[j] <= a) ++j;  // first node strictly right of a
  double t_prev = a, f_prev = fa;
  for (; j < times.size() && times[j] < b; ++j) {
    sum += 0.5 * (f_prev + values[j]) * (times[j] - t_prev);
    t_prev = times[j];
    f_prev = values[j];
  }
  sum += 0.5 * (f_prev + fb) * (b - t_prev);
  return sum;
}

}  // namespace dgns
