// Derives the frozen allgen constants from a high-trial run and prints the
// fixture JSON. Re-running with the same arguments reproduces the file.
//
//   allgen_calibrate [trials] [seed] > tests/fixtures/allgen_calibration_v1.json

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <string>

#include "json.hpp"

#include "batchlearn/distributions.hpp"
#include "batchlearn/ensemble.hpp"

int main(int argc, char** argv) {
  const std::size_t trials = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20000;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 20240101;
  const std::size_t n = 1000;
  // Constants are the 0.1% / 99.9% ratio quantiles widened by this factor.
  // Extremes are unusable for heavy tails: one vector with 1 - p near 1e-16
  // makes the worst ratio astronomically large.
  const double margin = 2.0;

  nlohmann::ordered_json out;
  out["schema"] = "batchlearn.allgen_calibration/1";
  out["n"] = n;
  out["trials"] = trials;
  out["seed"] = seed;
  out["margin"] = margin;
  out["constants"] = nlohmann::ordered_json::object();

  const batchlearn::AllgenConstants open{0.0, std::numeric_limits<double>::infinity()};
  for (const char* spec : {"powertail:beta=1", "uniform", "powertail:beta=-0.5"}) {
    const auto dist = batchlearn::OverlapDistribution::parse(spec);
    const auto r = batchlearn::allgen_bounds_check(dist, n, trials, seed, open, 0);
    const double c1 = r.low_lower_ratio / margin;
    const double c2 = r.high_upper_ratio * margin;
    out["constants"][dist.spec()] = {{"c1", c1},
                                     {"c2", c2},
                                     {"observed_min_lower_ratio", r.min_lower_ratio},
                                     {"observed_max_upper_ratio", r.max_upper_ratio},
                                     {"observed_median_lower_ratio", r.median_lower_ratio},
                                     {"observed_low_lower_ratio", r.low_lower_ratio},
                                     {"observed_high_upper_ratio", r.high_upper_ratio}};
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}
