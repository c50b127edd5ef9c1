#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dsfw/data.hpp"
#include "dsfw/matrix.hpp"
#include "dsfw/solver.hpp"

namespace dsfw::io {

/// Comma-separated numeric rows. Blank lines are skipped, a non-numeric first
/// line is treated as a header.
std::vector<std::vector<double>> read_numeric_csv(std::istream& in);
std::vector<std::vector<double>> read_numeric_csv(const std::string& path);

SquareMatrix read_matrix(const std::string& path);
void write_matrix(std::ostream& out, const SquareMatrix& m);
void write_matrix(std::ostream& out, const SimilarityMatrix& a);

FeatureMatrix read_features(const std::string& path);
void write_features(std::ostream& out, const FeatureMatrix& f);

/// Rows of h,s,v.
std::vector<HsvPixel> read_hsv(const std::string& path);

/// One label per line, or object_id,label rows (ids 0-based, any order).
std::vector<int> read_labels(const std::string& path);
void write_labels(std::ostream& out, const std::vector<int>& labels);

void write_trace(std::ostream& out, const std::vector<StepRecord>& trace);
std::vector<StepRecord> read_trace(std::istream& in);
std::vector<StepRecord> read_trace(const std::string& path);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace dsfw::io
