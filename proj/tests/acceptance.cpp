// SPDX-License-Identifier: Apache-2.0
// Runs the eight acceptance criteria with their default settings and prints one verdict line each.
#include <iostream>

#include "symlab/experiments.hpp"

int main() {
  bool all = true;
  symlab::run_acceptance({}, [&](const symlab::CriterionResult& c) {
    all = all && c.passed();
    std::cout << "criterion " << c.number << ": " << (c.passed() ? "PASS" : "FAIL") << "  " << c.title << "  ["
              << symlab::detail::num(c.report.seconds, 3) << " s]" << std::endl;
    for (const auto& k : c.report.checks)
      if (!k.passed)
        std::cout << "    failed check " << k.id << ": measured " << k.measured << ' ' << k.relation << ' ' << k.tolerance
                  << (k.detail.empty() ? "" : "; " + k.detail) << std::endl;
  });
  return all ? 0 : 1;
}
