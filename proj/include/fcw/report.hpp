#pragma once

#include "fcw/harness.hpp"

#include <iosfwd>

namespace fcw {

/// Metrics, windows, light strings, driver outcome and solver statistics.
void write_attack_summary(std::ostream& os, const Experiment& e, const AttackResult& r, const Outcome& o);

/// One row per step. Manipulation columns are omitted for the unattacked strategy.
void write_attack_steps(std::ostream& os, const AttackResult& r);

/// Per-step (d, v) measurements and estimates before and after the attack, for plotting.
void write_plot_data(std::ostream& os, const AttackResult& r);

}  // namespace fcw
