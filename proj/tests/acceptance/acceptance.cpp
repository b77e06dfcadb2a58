// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
// Usage: kvsync_acceptance [--only N] [--threads T]

#include "kvsync/kvsync.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

namespace {

struct Criterion {
  int id;
  std::string title;
  std::function<kvsync::Check()> run;
};

kvsync::Check single(const kvsync::ExperimentResult& r) {
  kvsync::Check c{r.id, r.all_pass(), ""};
  for (const auto& part : r.checks) c.detail += (c.detail.empty() ? "" : " | ") + part.detail;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  kvsync::ReproduceOptions opt;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--only") && i + 1 < argc) only = std::atoi(argv[++i]);
    else if (!std::strcmp(argv[i], "--threads") && i + 1 < argc) opt.threads = std::atoi(argv[++i]);
  }

  const std::vector<Criterion> criteria{
      {1, "closed-form thresholds, 2D and 1D", [] { return single(kvsync::run_table1()); }},
      {2, "angular PDE transition independent of F", [&] { return single(kvsync::run_fig1(opt)); }},
      {3, "spatial PDE, four normalizations below/above threshold",
       [&] {
         kvsync::Check c{"spatial", true, ""};
         for (int fig = 2; fig <= 5; ++fig) {
           const auto r = kvsync::run_spatial_figure(fig, opt);
           c.pass = c.pass && r.all_pass();
           c.detail += (c.detail.empty() ? "" : " | ") + r.checks.front().detail;
         }
         return c;
       }},
      {4, "eigenvalue branch vs second-order perturbation theory", [] { return single(kvsync::run_fig6()); }},
      {5, "numerical vs perturbative critical coupling", [&] { return single(kvsync::run_fig7(opt)); }},
      {6, "stationary state cross-validation", [&] { return single(kvsync::run_stationary_crossvalidation(opt)); }},
      {7, "property suites", [&] { return single(kvsync::run_property_suite(opt)); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    kvsync::Check result;
    try {
      result = c.run();
    } catch (const std::exception& e) {
      result = {c.title, false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!result.pass) ++failures;
    std::printf("[%s] criterion %d: %s (%.1fs) :: %s\n", result.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                result.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
