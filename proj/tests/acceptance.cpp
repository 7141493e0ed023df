// Acceptance run: the full validation suite on the default scenario, once with
// one worker and once with eight, plus the byte-identity check between the two
// reports. One line per criterion; exit status 1 if any fails.
//
//   acceptance [seed] [samples]

#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>

#include "risfbl/scenario.hpp"
#include "risfbl/validation.hpp"

namespace {

// wall-clock budgets for single-worker runs
const std::map<int, double> runtime_limit_s{{1, 60.0}, {3, 10.0}};

} // namespace

int main(int argc, char **argv) {
  risfbl::ValidationOptions opt;
  if (argc > 1)
    opt.seed = std::strtoull(argv[1], nullptr, 10);
  if (argc > 2)
    opt.samples = std::strtoull(argv[2], nullptr, 10);
  const risfbl::ScenarioConfig cfg;

  std::map<int, double> seconds;
  opt.workers = 1;
  const auto serial = risfbl::run_validation(cfg, opt, [&](int id, double s) { seconds[id] = s; });
  opt.workers = 8;
  const auto parallel = risfbl::run_validation(cfg, opt);

  bool all = true;
  for (const auto &c : serial.criteria) {
    bool pass = c.pass;
    std::string timing = " [" + risfbl::detail::fmt("%.1f s", seconds[c.id]);
    if (const auto it = runtime_limit_s.find(c.id); it != runtime_limit_s.end()) {
      const bool in_time = seconds[c.id] < it->second;
      timing += risfbl::detail::fmt(", limit %.0f s", it->second);
      if (!in_time)
        timing += ", over budget";
      pass = pass && in_time;
    }
    timing += "]";
    all = all && pass;
    std::printf("criterion %2d %s  %-26s %s%s\n", c.id, pass ? "PASS" : "FAIL", c.name.c_str(),
                c.summary.c_str(), timing.c_str());
  }
  const std::string a = serial.dump(), b = parallel.dump();
  const bool identical = a == b;
  all = all && identical;
  std::printf("criterion 10 %s  %-26s reports for workers 1 and 8 %s (%zu bytes)\n",
              identical ? "PASS" : "FAIL", "determinism", identical ? "identical" : "differ",
              a.size());
  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAILED");
  return all ? 0 : 1;
}
