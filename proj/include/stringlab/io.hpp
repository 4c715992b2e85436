// File surface: curve files (t x y z per breakpoint), dense curve samples,
// profile and convergence CSVs at 17 significant digits, field dumps, and
// static log-log SVG plots.

#pragma once

#include <string>
#include <vector>

#include "stringlab/curve.hpp"
#include "stringlab/density.hpp"
#include "stringlab/experiment.hpp"
#include "stringlab/field.hpp"

namespace stringlab {

std::string fmt17(double v);

PiecewiseAffineCurve read_curve(const std::string& path);
void write_curve(const PiecewiseAffineCurve& curve, const std::string& path);

// `t x y z dx dy dz` at n uniform parameters
void write_curve_samples(const SmoothCurve& curve, int n, const std::string& path);

// `r f fc is_contact`
void write_profile_csv(const RadialEnvelope& env, const std::string& path);

void write_records_csv(const std::vector<ConvergenceRecord>& records,
                       const std::string& path);
std::vector<ConvergenceRecord> read_records_csv(const std::string& path);

// `x1 x2 x3 u1 u2 u3 det` over the grid nodes
void write_field_dump(const TubeField& field, const BoxGrid& grid, const std::string& path);

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};
// log-log line plot; display-only static SVG
void write_loglog_svg(const std::vector<PlotSeries>& series, const std::string& path);

}  // namespace stringlab
