#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "convolab/classify.hpp"
#include "convolab/evolution.hpp"

namespace convolab {

// Version stamp carried by every JSON document this module emits.
inline constexpr int kSchemaVersion = 1;

using ordered_json = nlohmann::ordered_json;

// Locale-independent number rendering for CSV cells ("%.12g", C locale).
std::string csv_num(double x);

// Construction recipes <-> JSON. Parsers throw config_error on malformed
// documents; writers emit only the fields the kind uses, in a fixed order.
ordered_json kernel_spec_to_json(const KernelSpec& s);
KernelSpec kernel_spec_from_json(const ordered_json& j);
ordered_json region_spec_to_json(const RegionSpec& s);
RegionSpec region_spec_from_json(const ordered_json& j);
ordered_json operator_spec_to_json(const OperatorSpec& s);
OperatorSpec operator_spec_from_json(const ordered_json& j);

// Classification report with full witness provenance: verdict array sorted
// by class name, each fail carrying its witness point and spectral distance,
// plus the sweep grids.
ordered_json classification_to_json(const ClassificationReport& rep);

// Evolution family as CSV rows (t, point_index, re, im, residual); the
// residual column is the defining-identity defect of the sampled family at
// that node, recomputed from the trajectory by cumulative quadrature.
// Quadrature metadata rides in `#` header comments.
std::string trajectory_csv(const Trajectory& traj, const SpectralOperator& op,
                           const Kernel& k);

// Interchange table for tabulated kernels: rows (t, value, est_error).
std::string kernel_table_csv(const std::vector<double>& t,
                             const std::vector<double>& values,
                             const std::vector<double>& est_error = {});
// Parses the same format (comment lines ignored) into a tabulated kernel.
Kernel tabulated_from_csv(const std::string& text);

// Region boundary as CSV rows (re, im).
std::string boundary_csv(const BoundarySample& b);

}  // namespace convolab
