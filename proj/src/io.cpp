#include "dsfw/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <span>
#include <fstream>
#include <sstream>

#include "dsfw/error.hpp"

namespace dsfw::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& v) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::vector<double>> read_numeric_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    std::vector<double> row;
    row.reserve(cells.size());
    bool ok = true;
    for (auto c : cells) {
      double v = 0.0;
      if (!parse_double(c, v)) {
        ok = false;
        break;
      }
      row.push_back(v);
    }
    if (!ok) {
      if (first) {
        first = false;
        continue;  // header
      }
      fail(ErrorCode::ParseError, "non-numeric value on line " + std::to_string(lineno));
    }
    first = false;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
  auto in = open_in(path);
  return read_numeric_csv(in);
}

SquareMatrix read_matrix(const std::string& path) {
  return SquareMatrix::from_rows(read_numeric_csv(path));
}

namespace {

void write_rows(std::ostream& out, std::size_t n, std::size_t d, std::span<const double> v) {
  std::string line;
  for (std::size_t i = 0; i < n; ++i) {
    line.clear();
    for (std::size_t j = 0; j < d; ++j) {
      if (j) line += ',';
      line += format_double(v[i * d + j]);
    }
    line += '\n';
    out << line;
  }
}

}  // namespace

void write_matrix(std::ostream& out, const SquareMatrix& m) {
  write_rows(out, m.size(), m.size(), m.data());
}

void write_matrix(std::ostream& out, const SimilarityMatrix& a) {
  write_rows(out, a.size(), a.size(), a.data());
}

FeatureMatrix read_features(const std::string& path) {
  const auto rows = read_numeric_csv(path);
  if (rows.empty()) return {};
  const std::size_t d = rows[0].size();
  std::vector<double> v;
  v.reserve(rows.size() * d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d)
      fail(ErrorCode::ParseError, "feature row " + std::to_string(i) + " has the wrong width");
    v.insert(v.end(), rows[i].begin(), rows[i].end());
  }
  return FeatureMatrix(rows.size(), d, std::move(v));
}

void write_features(std::ostream& out, const FeatureMatrix& f) { write_rows(out, f.n, f.d, f.rows); }

std::vector<HsvPixel> read_hsv(const std::string& path) {
  const auto rows = read_numeric_csv(path);
  std::vector<HsvPixel> px;
  px.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.size() != 3) fail(ErrorCode::ParseError, "HSV rows need exactly 3 values");
    px.push_back({r[0], r[1], r[2]});
  }
  return px;
}

std::vector<int> read_labels(const std::string& path) {
  const auto rows = read_numeric_csv(path);
  auto as_int = [](double v) {
    if (v != std::floor(v) || v < 0.0 || v > 2147483647.0)
      fail(ErrorCode::ParseError, "labels must be nonnegative integers");
    return static_cast<int>(v);
  };
  if (rows.empty()) return {};
  const std::size_t width = rows[0].size();
  if (width == 1) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
      if (r.size() != 1) fail(ErrorCode::ParseError, "inconsistent label file width");
      out.push_back(as_int(r[0]));
    }
    return out;
  }
  if (width != 2) fail(ErrorCode::ParseError, "label file must have 1 or 2 columns");
  std::vector<int> out(rows.size(), -1);
  for (const auto& r : rows) {
    if (r.size() != 2) fail(ErrorCode::ParseError, "inconsistent label file width");
    const int id = as_int(r[0]);
    if (static_cast<std::size_t>(id) >= out.size() || out[id] != -1)
      fail(ErrorCode::ParseError, "object ids must be a permutation of 0..n-1");
    out[id] = as_int(r[1]);
  }
  return out;
}

void write_labels(std::ostream& out, const std::vector<int>& labels) {
  out << "object_id,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
}

namespace {

constexpr const char* kTraceHeader =
    "t,kind,gamma,gap_full,gap_half,f,support_size,s_index,v_index,f_before,r_s,r_v,a_sv";

std::string index_cell(std::size_t i) { return i == kNoIndex ? "" : std::to_string(i); }

}  // namespace

void write_trace(std::ostream& out, const std::vector<StepRecord>& trace) {
  out << kTraceHeader << '\n';
  for (const auto& s : trace) {
    out << s.t << ',' << to_string(s.kind) << ',' << format_double(s.gamma) << ','
        << format_double(s.gap) << ',' << format_double(s.gap_half) << ','
        << format_double(s.f_after) << ',' << s.support_after << ',' << index_cell(s.s_index)
        << ',' << index_cell(s.v_index) << ',' << format_double(s.f_before) << ','
        << format_double(s.r_s) << ',' << format_double(s.r_v) << ',' << format_double(s.a_sv)
        << '\n';
  }
}

std::vector<StepRecord> read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::EmptyTrace, "trace file is empty");
  const auto header = split(line);
  std::vector<std::string> names(header.begin(), header.end());
  auto col = [&](const char* name) -> std::ptrdiff_t {
    const auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? -1 : it - names.begin();
  };
  const auto c_t = col("t"), c_kind = col("kind"), c_gamma = col("gamma"),
             c_gap = col("gap_full"), c_half = col("gap_half"), c_f = col("f"),
             c_supp = col("support_size"), c_s = col("s_index"), c_v = col("v_index"),
             c_fb = col("f_before"), c_rs = col("r_s"), c_rv = col("r_v"), c_a = col("a_sv");
  if (c_t < 0 || c_kind < 0 || c_gap < 0 || c_f < 0)
    fail(ErrorCode::ParseError, "trace header lacks t, kind, gap_full or f");

  std::vector<StepRecord> trace;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != names.size())
      fail(ErrorCode::ParseError, "trace line " + std::to_string(lineno) + " has the wrong width");
    auto num = [&](std::ptrdiff_t c, double dflt) {
      if (c < 0) return dflt;
      double v = 0.0;
      if (!parse_double(cells[c], v))
        fail(ErrorCode::ParseError, "bad number on trace line " + std::to_string(lineno));
      return v;
    };
    auto idx = [&](std::ptrdiff_t c) {
      if (c < 0 || cells[c].empty()) return kNoIndex;
      return static_cast<std::size_t>(num(c, 0.0));
    };
    StepRecord s;
    s.t = static_cast<std::size_t>(num(c_t, 0.0));
    const auto kind = step_kind_from_string(cells[c_kind]);
    if (!kind) fail(ErrorCode::ParseError, "unknown step kind on line " + std::to_string(lineno));
    s.kind = *kind;
    s.gamma = num(c_gamma, 0.0);
    s.gap = num(c_gap, 0.0);
    s.gap_half = num(c_half, 0.5 * s.gap);
    s.f_after = num(c_f, 0.0);
    s.support_after = static_cast<std::size_t>(num(c_supp, 0.0));
    s.s_index = idx(c_s);
    s.v_index = idx(c_v);
    s.f_before = num(c_fb, trace.empty() ? 0.0 : trace.back().f_after);
    s.r_s = num(c_rs, 0.0);
    s.r_v = num(c_rv, 0.0);
    s.a_sv = num(c_a, 0.0);
    trace.push_back(s);
  }
  if (trace.empty()) fail(ErrorCode::EmptyTrace, "trace has no steps");
  return trace;
}

std::vector<StepRecord> read_trace(const std::string& path) {
  auto in = open_in(path);
  return read_trace(in);
}

}  // namespace dsfw::io
