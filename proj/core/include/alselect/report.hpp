#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "alselect/simulator.hpp"

namespace alselect {

/// `strategy,seed,round,labeled,accuracy`, one row per round.
void write_curve_csv(std::span<const ExperimentResult> runs, std::ostream& out);

/// Learning-curve plot: one polyline per strategy, rounds against accuracy.
void write_curve_svg(std::span<const StrategyCurve> curves, std::ostream& out);

/// Per-strategy mean and stdev by round plus every run's final accuracy.
std::string summary_json(const Comparison& comparison, const std::string& config_digest);

/// Shortest round-trip decimal.
std::string format_double(double value);

}  // namespace alselect
