#pragma once

#include <atomic>
#include <filesystem>
#include <mutex>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "nnd/core.hpp"
#include "nnd/error.hpp"

namespace nnd::test {

// Collects warnings for the lifetime of the object.
class WarningCapture {
 public:
  WarningCapture() {
    std::lock_guard lock(mutex());
    messages().clear();
    set_warning_sink(&record);
  }
  ~WarningCapture() { set_warning_sink(nullptr); }

  std::vector<std::string> taken() const {
    std::lock_guard lock(mutex());
    return messages();
  }

 private:
  static std::mutex& mutex() {
    static std::mutex m;
    return m;
  }
  static std::vector<std::string>& messages() {
    static std::vector<std::string> m;
    return m;
  }
  static void record(std::string_view message) {
    std::lock_guard lock(mutex());
    messages().emplace_back(message);
  }
};

inline std::filesystem::path data_dir() { return NND_TEST_DATA_DIR; }

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("nnd-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline Instance unit_square(Metric metric = Metric::kExact) {
  return Instance("square", {{0, 0}, {1, 0}, {1, 1}, {0, 1}}, metric);
}

inline std::vector<Point> random_points(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) {
    p.x = u(rng);
    p.y = u(rng);
  }
  return pts;
}

inline Instance random_instance(int n, std::uint64_t seed, Metric metric = Metric::kExact) {
  return Instance("random", random_points(n, seed), metric);
}

// Comb tour on the two-row layout: first row left to right, second row back.
inline std::vector<NodeId> comb_order(int n) {
  std::vector<NodeId> order;
  for (int i = 0; i < n / 2; ++i) order.push_back(i);
  for (int i = n - 1; i >= n / 2; --i) order.push_back(i);
  return order;
}

}  // namespace nnd::test
