#include "fracsource/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace fracsource::io {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line != "\r") out.push_back(line);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) throw std::runtime_error("format_double failed");
  return {buf, res.ptr};
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || first == last)
    throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

void write_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string to_csv(const GridTable& g) {
  if (g.values.rows() != static_cast<Eigen::Index>(g.x.size()) ||
      g.values.cols() != static_cast<Eigen::Index>(g.t.size()))
    throw std::invalid_argument("GridTable: shape mismatch");
  std::string out = "x/t";
  for (double t : g.t) out += "," + format_double(t);
  out += "\n";
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    out += format_double(g.x[i]);
    for (std::size_t j = 0; j < g.t.size(); ++j)
      out += "," + format_double(g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    out += "\n";
  }
  return out;
}

GridTable parse_grid_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw std::invalid_argument("grid csv: empty");
  const auto head = split(lines[0], ',');
  if (head.empty() || head[0] != "x/t") throw std::invalid_argument("grid csv: bad header");
  GridTable g;
  for (std::size_t j = 1; j < head.size(); ++j) g.t.push_back(parse_double(head[j]));
  g.values.resize(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(g.t.size()));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    if (cells.size() != head.size()) throw std::invalid_argument("grid csv: ragged row");
    g.x.push_back(parse_double(cells[0]));
    for (std::size_t j = 1; j < cells.size(); ++j)
      g.values(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1)) = parse_double(cells[j]);
  }
  return g;
}

GridTable to_table(const forward::SpaceTimeField& u) {
  return {u.sgrid.nodes(), u.tgrid.nodes(), u.values};
}

GridTable to_table(const observe::ObservationData& d) { return {d.x, d.t, d.samples}; }

std::string window_meta(const observe::ObservationData& d) {
  std::string out;
  out += "omega.left = " + format_double(d.window.omega.left) + "\n";
  out += "omega.right = " + format_double(d.window.omega.right) + "\n";
  out += "T1 = " + format_double(d.window.t1) + "\n";
  out += "T = " + format_double(d.window.t_end) + "\n";
  out += "epsilon = " + format_double(d.epsilon) + "\n";
  out += "seed = " + std::to_string(d.seed) + "\n";
  out += "delta = " + format_double(d.delta) + "\n";
  out += std::string("noise_model = ") +
         (d.model == observe::NoiseModel::literal ? "literal" : "symmetric") + "\n";
  return out;
}

std::string trace_csv(const invert::InversionTrace& trace) {
  Table t{{"k", "residual", "rho", "error"}, {}};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  t.rows.push_back({0.0, trace.initial_residual, nan, trace.initial_error});
  for (const auto& r : trace.records)
    t.rows.push_back({static_cast<double>(r.k), r.residual, r.rho, r.error});
  return to_csv(t);
}

std::vector<TraceRow> parse_trace_csv(const std::string& text) {
  const auto t = parse_table_csv(text);
  if (t.header != std::vector<std::string>{"k", "residual", "rho", "error"})
    throw std::invalid_argument("trace csv: bad header");
  std::vector<TraceRow> out;
  for (const auto& r : t.rows) out.push_back({static_cast<std::size_t>(r[0]), r[1], r[2], r[3]});
  return out;
}

std::string reconstruction_csv(const std::vector<double>& x, const std::vector<double>& f_k,
                               const std::vector<double>& f_true) {
  if (f_k.size() != x.size() || f_true.size() != x.size())
    throw std::invalid_argument("reconstruction csv: size mismatch");
  Table t{{"x", "f_K", "f_true"}, {}};
  for (std::size_t i = 0; i < x.size(); ++i) t.rows.push_back({x[i], f_k[i], f_true[i]});
  return to_csv(t);
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t j = 0; j < t.header.size(); ++j) out += (j ? "," : "") + t.header[j];
  out += "\n";
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) throw std::invalid_argument("table: ragged row");
    for (std::size_t j = 0; j < row.size(); ++j) out += (j ? "," : "") + format_double(row[j]);
    out += "\n";
  }
  return out;
}

Table parse_table_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw std::invalid_argument("csv: empty");
  Table t;
  t.header = split(lines[0], ',');
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    if (cells.size() != t.header.size()) throw std::invalid_argument("csv: ragged row");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace fracsource::io
