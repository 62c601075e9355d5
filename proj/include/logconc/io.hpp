#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "logconc/measure.hpp"
#include "logconc/pushforward.hpp"
#include "logconc/verifier.hpp"

namespace logconc {

// Full-precision serialization: every float in an output file is printed
// with 17 significant digits, enough to reproduce the double exactly.
std::string format_g17(double v);

std::string json_escape(const std::string& s);

// Builds a measure from a JSON object such as
//   {"family":"gaussian","dim":2}
//   {"family":"gaussian","mean":[0,0],"cov":[[1,0],[0,1]]}
//   {"family":"uniform_box","dim":1,"side":3.4641016151377544}
//   {"family":"uniform_box","center":[0],"half_widths":[1.5]}
//   {"family":"uniform_ball","dim":2,"radius":1}
//   {"family":"product_exponential","rates":[1,2]}
// Custom potentials cannot be described in JSON and are rejected.
LogConcaveMeasure measure_from_json(const std::string& text);

// Density grid as CSV: "# key: value" metadata lines, then "t,density"
// rows.  The exact evaluator does not survive a round trip; everything
// else (grid, support, singular points, head/tail mass) does.
void write_density_csv(std::ostream& os, const Density1D& d);
Density1D read_density_csv(std::istream& is);

// Sample matrix as CSV with one point per row.
void write_samples_csv(std::ostream& os, const Eigen::MatrixXd& points);

// Reports as a JSON array (the schema of the verify subcommand).  With
// deterministic = true the wall-clock runtime field is omitted so reruns
// are byte-identical.
std::string report_to_json(const InequalityReport& rep, bool deterministic,
                           int indent = 0);
std::string reports_to_json(const std::vector<InequalityReport>& reps,
                            bool deterministic);

}  // namespace logconc
