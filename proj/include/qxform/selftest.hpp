#pragma once

// Fixed invariant suite behind `qxform selftest`. The report carries no
// timing or host information, so repeated runs are byte-identical.

#include "qxform/scenario.hpp"

#include <vector>

namespace qxform {

std::vector<Check> selftest_checks();
Json selftest_report(const std::vector<Check>& checks);

}  // namespace qxform
