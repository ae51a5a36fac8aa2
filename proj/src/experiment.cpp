#include "fracsource/experiment.hpp"

#include "fracsource/csv_io.hpp"
#include "fracsource/expression.hpp"
#include "fracsource/forward.hpp"
#include "fracsource/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace fracsource::experiment {
namespace {

using config::ConfigError;

const char* stop_name(invert::StopReason r) {
  return r == invert::StopReason::discrepancy ? "discrepancy" : "iteration_cap";
}

invert::EndCondition end_condition(const std::string& key, const std::string& v) {
  if (v == "clamped") return invert::EndCondition::clamped;
  if (v == "free") return invert::EndCondition::free;
  throw ConfigError(key + ": expected clamped or free, got '" + v + "'");
}

const char* end_name(invert::EndCondition e) {
  return e == invert::EndCondition::free ? "free" : "clamped";
}

// Nodes of the closure of the reconstruction support.
std::vector<std::size_t> support_nodes(const spectral::SpaceGrid& grid, const spectral::Subdomain& omega) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    if (omega.contains(x)) continue;
    if (x == omega.left && omega.left == 0.0) continue;
    if (x == omega.right && omega.right == 1.0) continue;
    out.push_back(i);
  }
  return out;
}

std::string eps_dir(double e) { return "eps_" + io::format_double(e); }

}  // namespace

void ExperimentSpec::validate() const {
  if (cases.empty()) throw ConfigError("no cases");
  std::set<std::string> labels;
  for (const auto& c : cases) {
    if (c.label.empty() || !labels.insert(c.label).second)
      throw ConfigError("case labels must be unique and non-empty");
    if (!(c.alpha > 0.0 && c.alpha <= 1.0)) throw ConfigError("case " + c.label + ": alpha must lie in (0, 1]");
    if (!(c.beta > 0.0 && c.beta <= 1.0)) throw ConfigError("case " + c.label + ": beta must lie in (0, 1]");
    if (!(c.t1 > 0.0 && c.t1 < final_time)) throw ConfigError("case " + c.label + ": need 0 < T1 < T");
  }
  if (!(final_time > 0.0)) throw ConfigError("problem.T must be positive");
  if (!(t0 > 0.0 && t0 <= final_time)) throw ConfigError("problem.T0 must lie in (0, T]");
  if (!(omega.left >= 0.0 && omega.left < omega.right && omega.right <= 1.0) ||
      (omega.left == 0.0 && omega.right == 1.0))
    throw ConfigError("problem.omega must be a proper subinterval of (0, 1)");
  if (epsilons.empty()) throw ConfigError("noise.epsilons is empty");
  for (double e : epsilons)
    if (!(e >= 0.0) || !std::isfinite(e)) throw ConfigError("noise.epsilons must be non-negative");
  if (seeds.empty()) throw ConfigError("noise.seeds is empty");
  if (space_nodes < 5 || space_nodes % 2 == 0) throw ConfigError("grid.space_nodes must be odd and >= 5");
  if (time_nodes < 3) throw ConfigError("grid.time_nodes must be >= 3");
  if (modes == 0 || 4 * modes > space_nodes) throw ConfigError("grid.modes must lie in [1, space_nodes / 4]");
  if (basis.count == 0) throw ConfigError("basis.count must be positive");
  try {
    lm.validate();
    source_shape(f_true);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ExperimentSpec preset(const std::string& name) {
  ExperimentSpec s;
  s.preset = name;
  s.cases = {{"a", 0.5, 0.7, 0.1}, {"b", 0.5, 0.7, 0.3}, {"c", 0.6, 0.8, 0.1}, {"d", 0.6, 0.8, 0.3}};
  if (name == "table1") {
    s.f_true = "ftrue1";
  } else if (name == "table2") {
    s.f_true = "ftrue2";
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected table1 or table2)");
  }
  return s;
}

void apply(ExperimentSpec& s, const config::KeyValues& kv) {
  using namespace config;
  for (const auto& [key, v] : kv) {
    if (key == "preset" || key.starts_with("forward.")) continue;
    if (key == "source.true") s.f_true = v;
    else if (key == "problem.T") s.final_time = to_double(key, v);
    else if (key == "problem.T0") s.t0 = to_double(key, v);
    else if (key == "problem.omega") {
      const auto e = to_doubles(key, v);
      if (e.size() != 2 || !(e[0] < e[1])) throw ConfigError(key + ": expected 'left, right'");
      s.omega.left = e[0];
      s.omega.right = e[1];
    } else if (key.starts_with("case.")) {
      const auto label = key.substr(5);
      const auto e = to_doubles(key, v);
      if (label.empty() || e.size() != 3) throw ConfigError(key + ": expected 'alpha, beta, T1'");
      Case c{label, e[0], e[1], e[2]};
      bool replaced = false;
      for (auto& old : s.cases)
        if (old.label == label) old = c, replaced = true;
      if (!replaced) s.cases.push_back(c);
    } else if (key == "cases") {
      // Restrict and order the case list, e.g. "a, c".
      std::vector<Case> picked;
      std::string list = v;
      for (char& ch : list)
        if (ch == ',') ch = ' ';
      std::istringstream in(list);
      for (std::string label; in >> label;) {
        bool found = false;
        for (const auto& c : s.cases)
          if (c.label == label) picked.push_back(c), found = true;
        if (!found) throw ConfigError("cases: unknown case '" + label + "'");
      }
      s.cases = picked;
    } else if (key == "noise.epsilons") s.epsilons = to_doubles(key, v);
    else if (key == "noise.seeds") s.seeds = to_seeds(key, v);
    else if (key == "noise.literal_formula")
      s.noise = to_bool(key, v) ? observe::NoiseModel::literal : observe::NoiseModel::symmetric;
    else if (key == "grid.space_nodes") s.space_nodes = to_size(key, v);
    else if (key == "grid.time_nodes") s.time_nodes = to_size(key, v);
    else if (key == "grid.modes") s.modes = to_size(key, v);
    else if (key == "basis.kind") {
      if (v == "legendre") s.basis.kind = invert::BasisKind::legendre;
      else if (v == "hat") s.basis.kind = invert::BasisKind::hat;
      else throw ConfigError(key + ": expected legendre or hat, got '" + v + "'");
    } else if (key == "basis.count") s.basis.count = to_size(key, v);
    else if (key == "basis.interface_end") s.basis.interface_end = end_condition(key, v);
    else if (key == "basis.boundary_end") s.basis.boundary_end = end_condition(key, v);
    else if (key == "lm.gamma0") s.lm.gamma0 = to_double(key, v);
    else if (key == "lm.k0") s.lm.k0 = to_double(key, v);
    else if (key == "lm.eta") s.lm.eta = to_double(key, v);
    else if (key == "lm.max_iterations") s.lm.max_iterations = to_size(key, v);
    else if (key == "lm.fd_step") s.lm.fd_step = to_double(key, v);
    else if (key == "lm.recompute_jacobian") s.lm.recompute_jacobian = to_bool(key, v);
    else if (key == "lm.divergence_factor") s.lm.divergence_factor = to_double(key, v);
    else if (key == "output.dir") s.out_dir = v;
    else throw ConfigError("unknown key '" + key + "'");
  }
}

std::function<double(double)> source_shape(const std::string& selector) {
  if (selector == "ftrue1")
    return [](double x) { return x * x * x * x + x * std::sin(std::numbers::pi * x); };
  if (selector == "ftrue2")
    return [](double x) {
      return std::exp(-std::numbers::pi * x * x) + std::cos(2.0 * std::numbers::pi * x);
    };
  const std::string text = selector.starts_with("expr:") ? selector.substr(5) : selector;
  expr::Expression e(text, {"x"});
  return [e](double x) { return e(x); };
}

ExperimentResult run_experiment(const ExperimentSpec& spec, std::ostream& log, bool write_files) {
  spec.validate();
  const auto shape = source_shape(spec.f_true);
  const spectral::SpaceGrid sgrid(spec.space_nodes);
  const auto snodes = support_nodes(sgrid, spec.omega);

  std::vector<double> f_true(sgrid.size());
  std::vector<double> f_masked(sgrid.size());
  for (std::size_t i = 0; i < sgrid.size(); ++i) {
    f_true[i] = shape(sgrid.node(i));
    f_masked[i] = spec.omega.contains(sgrid.node(i)) ? 0.0 : f_true[i];
  }
  std::vector<double> xs;
  std::vector<double> ft_support;
  for (auto i : snodes) {
    xs.push_back(sgrid.node(i));
    ft_support.push_back(f_true[i]);
  }

  const auto support = spectral::SubdomainUnion::complement(spec.omega);
  const auto basis = invert::make_basis(support, spec.basis);
  const std::size_t n_eps = spec.epsilons.size();
  const std::size_t n_seed = spec.seeds.size();

  ExperimentResult result;
  result.cells.resize(spec.cases.size() * n_eps * n_seed);

  for (std::size_t ci = 0; ci < spec.cases.size(); ++ci) {
    const auto& c = spec.cases[ci];
    auto cfg = forward::make_config(c.alpha, c.beta, spec.final_time, spec.time_nodes, spec.space_nodes,
                                    spec.modes);
    observe::ObservationWindow window{spec.omega, c.t1, spec.final_time};
    const invert::ForwardMap fm(cfg, forward::TemporalSource::constant_window(spec.t0), window, basis);
    const auto clean = fm.observe_source(f_masked);

    parallel_for(n_eps * n_seed, [&](std::size_t job) {
      const std::size_t ei = job / n_seed;
      const std::size_t si = job % n_seed;
      const double eps = spec.epsilons[ei];
      const auto seed = spec.seeds[si];
      const auto data = observe::add_noise(clean, eps, seed, spec.noise);
      const auto res = invert::run(fm, data, spec.lm, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis->size())),
                                   &f_true);
      const auto& tr = res.trace;
      CellResult cell;
      cell.case_index = ci;
      cell.epsilon = eps;
      cell.seed = seed;
      cell.delta = data.delta;
      cell.error = invert::relative_error(*basis, res.a, f_true, sgrid);
      cell.stop_index = tr.stop_index;
      cell.reason = tr.reason;
      cell.final_residual = tr.records.empty() ? tr.initial_residual : tr.records.back().residual;
      cell.previous_residual =
          tr.records.size() >= 2 ? tr.records[tr.records.size() - 2].residual : tr.initial_residual;
      cell.f_k = basis->synthesize(res.a, sgrid);

      if (write_files) {
        const auto dir = spec.out_dir / c.label / eps_dir(eps) / ("seed_" + std::to_string(seed));
        std::vector<double> fk_support;
        for (auto i : snodes) fk_support.push_back(cell.f_k[i]);
        io::write_atomic(dir / "trace.csv", io::trace_csv(tr));
        io::write_atomic(dir / "reconstruction.csv", io::reconstruction_csv(xs, fk_support, ft_support));
        io::write_atomic(dir / "observation.csv", io::to_csv(io::to_table(data)));
        io::write_atomic(dir / "observation.meta", io::window_meta(data));
        std::string meta;
        auto put = [&meta](const std::string& k, const std::string& v) { meta += k + " = " + v + "\n"; };
        put("preset", spec.preset.empty() ? "custom" : spec.preset);
        put("case", c.label);
        put("alpha", io::format_double(c.alpha));
        put("beta", io::format_double(c.beta));
        put("T", io::format_double(spec.final_time));
        put("T0", io::format_double(spec.t0));
        put("T1", io::format_double(c.t1));
        put("omega", io::format_double(spec.omega.left) + ", " + io::format_double(spec.omega.right));
        put("f_true", spec.f_true);
        put("epsilon", io::format_double(eps));
        put("seed", std::to_string(seed));
        put("noise_model", spec.noise == observe::NoiseModel::literal ? "literal" : "symmetric");
        put("delta", io::format_double(data.delta));
        put("basis", spec.basis.kind == invert::BasisKind::hat ? "hat" : "legendre");
        put("basis.count", std::to_string(spec.basis.count));
        if (spec.basis.kind == invert::BasisKind::hat) {
          put("basis.interface_end", end_name(spec.basis.interface_end));
          put("basis.boundary_end", end_name(spec.basis.boundary_end));
        }
        put("grid", std::to_string(spec.space_nodes) + " x " + std::to_string(spec.time_nodes) + ", " +
                        std::to_string(spec.modes) + " modes");
        put("lm.gamma0", io::format_double(spec.lm.gamma0));
        put("lm.k0", io::format_double(spec.lm.k0));
        put("lm.eta", io::format_double(spec.lm.eta));
        put("lm.max_iterations", std::to_string(spec.lm.max_iterations));
        put("K", std::to_string(tr.stop_index));
        put("stop_reason", stop_name(tr.reason));
        put("E_K", io::format_double(cell.final_residual));
        put("err", io::format_double(cell.error));
        io::write_atomic(dir / "metadata.txt", meta);
      }
      result.cells[(ci * n_eps + ei) * n_seed + si] = std::move(cell);
    });
  }

  result.table.setZero(static_cast<Eigen::Index>(n_eps), static_cast<Eigen::Index>(spec.cases.size()));
  for (const auto& cell : result.cells) {
    std::size_t ei = 0;
    while (spec.epsilons[ei] != cell.epsilon) ++ei;
    result.table(static_cast<Eigen::Index>(ei), static_cast<Eigen::Index>(cell.case_index)) +=
        cell.error / static_cast<double>(n_seed);
  }

  io::Table summary;
  summary.header.push_back("epsilon");
  for (const auto& c : spec.cases) summary.header.push_back(c.label);
  for (std::size_t ei = 0; ei < n_eps; ++ei) {
    std::vector<double> row{spec.epsilons[ei]};
    for (std::size_t ci = 0; ci < spec.cases.size(); ++ci)
      row.push_back(result.table(static_cast<Eigen::Index>(ei), static_cast<Eigen::Index>(ci)));
    summary.rows.push_back(std::move(row));
  }
  result.summary_csv = io::to_csv(summary);

  if (write_files) {
    io::write_atomic(spec.out_dir / "summary.csv", result.summary_csv);
    for (std::size_t ci = 0; ci < spec.cases.size(); ++ci) {
      io::Table fig;
      fig.header = {"x", "f_true"};
      for (double e : spec.epsilons) fig.header.push_back("f_K_" + eps_dir(e));
      for (std::size_t r = 0; r < snodes.size(); ++r) {
        std::vector<double> row{xs[r], ft_support[r]};
        for (std::size_t ei = 0; ei < n_eps; ++ei) {
          double mean = 0.0;
          for (std::size_t si = 0; si < n_seed; ++si)
            mean += result.cells[(ci * n_eps + ei) * n_seed + si].f_k[snodes[r]];
          row.push_back(mean / static_cast<double>(n_seed));
        }
        fig.rows.push_back(std::move(row));
      }
      io::write_atomic(spec.out_dir / ("figure_" + spec.cases[ci].label + ".csv"), io::to_csv(fig));
    }
  }

  char buf[64];
  log << "relative error, f_true = " << spec.f_true << ", " << n_seed << (n_seed == 1 ? " seed" : " seeds")
      << "\n";
  std::snprintf(buf, sizeof buf, "%-10s", "epsilon");
  log << buf;
  for (const auto& c : spec.cases) {
    std::snprintf(buf, sizeof buf, "  %10s", ("(" + c.label + ")").c_str());
    log << buf;
  }
  log << "\n";
  for (std::size_t ei = 0; ei < n_eps; ++ei) {
    std::snprintf(buf, sizeof buf, "%-10g", spec.epsilons[ei]);
    log << buf;
    for (std::size_t ci = 0; ci < spec.cases.size(); ++ci) {
      std::snprintf(buf, sizeof buf, "  %10.4g",
                    result.table(static_cast<Eigen::Index>(ei), static_cast<Eigen::Index>(ci)));
      log << buf;
    }
    log << "\n";
  }
  return result;
}

ForwardSpec forward_spec(const config::KeyValues& kv) {
  using namespace config;
  ForwardSpec s;
  for (const auto& [key, v] : kv) {
    if (key == "forward.alpha") s.alpha = to_double(key, v);
    else if (key == "forward.beta") s.beta = to_double(key, v);
    else if (key == "forward.phi") s.phi = v;
    else if (key == "forward.f") s.f = v;
    else if (key == "forward.mu") s.mu = v;
    else if (key == "problem.T") s.final_time = to_double(key, v);
    else if (key == "problem.T0") s.t0 = to_double(key, v);
    else if (key == "grid.space_nodes") s.space_nodes = to_size(key, v);
    else if (key == "grid.time_nodes") s.time_nodes = to_size(key, v);
    else if (key == "grid.modes") s.modes = to_size(key, v);
    else if (key == "output.dir") s.out_dir = v;
    else if (key.starts_with("forward.")) throw ConfigError("unknown key '" + key + "'");
  }
  return s;
}

fs::path run_forward(const ForwardSpec& s) {
  forward::ProblemConfig cfg;
  try {
    cfg = forward::make_config(s.alpha, s.beta, s.final_time, s.time_nodes, s.space_nodes, s.modes);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  auto strip = [](const std::string& v) { return v.starts_with("expr:") ? v.substr(5) : v; };
  const expr::Expression phi(strip(s.phi), {"x"});
  const expr::Expression f(strip(s.f), {"x"});
  std::vector<double> phi_s(cfg.sgrid.size());
  std::vector<double> f_s(cfg.sgrid.size());
  for (std::size_t i = 0; i < cfg.sgrid.size(); ++i) {
    phi_s[i] = phi(cfg.sgrid.node(i));
    f_s[i] = f(cfg.sgrid.node(i));
  }
  forward::TemporalSource mu = forward::TemporalSource::zero();
  if (s.mu == "window") {
    mu = forward::TemporalSource::constant_window(s.t0);
  } else {
    const expr::Expression m(strip(s.mu), {"t"});
    std::vector<double> samples(cfg.tgrid.size());
    for (std::size_t j = 0; j < samples.size(); ++j) samples[j] = m(cfg.tgrid.node(j));
    mu = forward::TemporalSource::sampled(cfg.tgrid, samples);
  }
  const auto u = forward::solve(cfg, phi_s, f_s, mu);
  const auto path = s.out_dir / "field.csv";
  io::write_atomic(path, io::to_csv(io::to_table(u)));
  return path;
}

}  // namespace fracsource::experiment
