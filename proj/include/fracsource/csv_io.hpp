#pragma once

#include "fracsource/forward.hpp"
#include "fracsource/invert.hpp"
#include "fracsource/observe.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace fracsource::io {

namespace fs = std::filesystem;

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);
/// Throws std::invalid_argument unless the whole string is a number.
double parse_double(const std::string& s);

/// Writes `contents` to a temporary sibling and renames it over `path`.
void write_atomic(const fs::path& path, const std::string& contents);
std::string read_file(const fs::path& path);

/// Grid-shaped table: header "x/t,t_0,t_1,...", then one row per space node
/// "x_i,v_i0,v_i1,...".
struct GridTable {
  std::vector<double> x;
  std::vector<double> t;
  Eigen::MatrixXd values;
};

std::string to_csv(const GridTable& g);
GridTable parse_grid_csv(const std::string& text);

GridTable to_table(const forward::SpaceTimeField& u);
GridTable to_table(const observe::ObservationData& d);

/// `key = value` lines.
std::string window_meta(const observe::ObservationData& d);

/// Columns k,residual,rho,error; row k = 0 is the initial guess (rho empty).
std::string trace_csv(const invert::InversionTrace& trace);

struct TraceRow {
  std::size_t k;
  double residual;
  double rho;  // NaN on the k = 0 row
  double error;
};
std::vector<TraceRow> parse_trace_csv(const std::string& text);

/// Columns x,f_K,f_true over the given nodes.
std::string reconstruction_csv(const std::vector<double>& x, const std::vector<double>& f_k,
                               const std::vector<double>& f_true);

/// Generic numeric table: header of names, rows of numbers (NaN allowed).
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
std::string to_csv(const Table& t);
Table parse_table_csv(const std::string& text);

}  // namespace fracsource::io
