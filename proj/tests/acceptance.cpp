// Acceptance suite runner: one PASS/FAIL line per criterion, nonzero exit on
// any failure.

#include <cstdio>

#include "mql/selftest.hpp"

int main() {
  auto results = mql::selftest::run_acceptance();
  int failed = 0;
  for (const auto& r : results) {
    std::printf("%s  [%2d] %s%s%s  (%.2fs)\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.empty() ? "" : " — ", r.detail.c_str(), r.seconds);
    if (!r.passed) ++failed;
  }
  std::printf("%zu/%zu acceptance criteria passed\n", results.size() - static_cast<std::size_t>(failed),
              results.size());
  return failed == 0 ? 0 : 1;
}
