// SPDX-License-Identifier: Apache-2.0
#include "speclab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "speclab/eigensolve.hpp"
#include "speclab/experiments.hpp"
#include "speclab/oscillator1d.hpp"

namespace speclab::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Outcome {
  Table table;
  std::vector<std::pair<std::string, std::string>> results;  // appended to metadata
  std::string summary;
  bool converged = true;
};

// Every RunConfig field in output order, with its default.
const std::vector<std::pair<std::string, std::string>> kFields = {
    {"p", "2"},           {"lambda", "1"},    {"mu", "0"},
    {"k", "50,100,200"},  {"radius", "20"},   {"spacing", "0.05"},
    {"count", "4"},       {"sigma", "1.5"},   {"biglambda", "1,2,4,8"},
    {"tol", "1e-8"},      {"seed", "42"},     {"bc", "dirichlet"},
    {"index", "1"},       {"pvalues", "1,2,4,8,16"},
    {"radii", "2,4,6,8,10,12,14,16,18,20"},   {"plo", "1"},
    {"phi", "3"},         {"width", "1e-4"},  {"kind", "supercritical"},
};

const std::map<std::string, std::vector<std::string>> kCommandFlags = {
    {"gamma", {"p", "tol"}},
    {"gamma-min", {"plo", "phi", "tol"}},
    {"spectrum", {"p", "lambda", "radius", "spacing", "bc", "count", "tol", "seed"}},
    {"scan-r", {"p", "lambda", "radii", "spacing", "bc", "count", "tol", "seed"}},
    {"bracket", {"p", "lambda", "radius", "spacing", "count", "tol", "seed"}},
    {"critical", {"p", "radius", "spacing", "width", "tol", "seed"}},
    {"surface", {"pvalues", "radius", "spacing", "width", "tol", "seed"}},
    {"quasimode", {"p", "lambda", "mu", "k", "kind"}},
    {"moments", {"p", "lambda", "biglambda", "sigma", "radius", "spacing", "tol", "seed"}},
    {"eigfun", {"p", "lambda", "radius", "spacing", "bc", "index", "tol", "seed"}},
};

const std::map<std::string, std::string> kCommandHelp = {
    {"gamma", "ground energy of -d^2/dt^2 + |t|^p"},
    {"gamma-min", "minimum of gamma_p over [plo, phi]"},
    {"spectrum", "lowest lattice eigenvalues of L_p(lambda)"},
    {"scan-r", "lowest eigenvalues against the cutoff radius"},
    {"bracket", "Dirichlet and Neumann eigenvalues side by side"},
    {"critical", "coupling where the lowest Dirichlet eigenvalue crosses zero"},
    {"surface", "critical coupling alongside gamma_p over several p"},
    {"quasimode", "residuals of trial states for the essential spectrum"},
    {"moments", "eigenvalue moments and the bound's Lambda-shape"},
    {"eigfun", "gridded eigenfunction samples"},
};

class Config {
 public:
  std::string command;
  std::map<std::string, std::string> given;
  std::string output;
  std::string format = "csv";

  std::string text(const std::string& key) const {
    const auto it = given.find(key);
    if (it != given.end()) return it->second;
    for (const auto& [name, value] : kFields)
      if (name == key) return value;
    throw std::logic_error("unknown field " + key);
  }

  double real(const std::string& key) const { return parse_real(key, text(key)); }

  long long integer(const std::string& key) const {
    const std::string s = text(key);
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || errno == ERANGE) throw UsageError("--" + key + ": not an integer: " + s);
    return v;
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, item));
    if (out.empty()) throw UsageError("--" + key + ": empty list");
    return out;
  }

  BoundaryKind boundary() const {
    try {
      return parse_boundary(text("bc"));
    } catch (const std::invalid_argument&) {
      throw UsageError("--bc must be dirichlet or neumann");
    }
  }

  SolveOptions solve_options() const {
    SolveOptions o;
    o.tol = real("tol");
    const long long seed = integer("seed");
    if (seed < 0) throw UsageError("--seed must be non-negative");
    o.seed = static_cast<std::uint64_t>(seed);
    return o;
  }

 private:
  static double parse_real(const std::string& key, const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || !std::isfinite(v)) throw UsageError("--" + key + ": not a finite number: " + s);
    return v;
  }
};

std::string sector_name(Sector s) { return to_string(s); }

Outcome run_gamma(const Config& c) {
  const double p = c.real("p");
  const GammaReport r = gamma_report(p, c.real("tol"));
  Outcome o;
  o.table.columns = {"p", "gamma", "halflength", "meshcount", "change", "refinements"};
  o.table.rows.push_back({p, r.gamma, r.halflength, static_cast<long long>(r.meshcount), r.change,
                          static_cast<long long>(r.refinements)});
  o.summary = "gamma_p(p=" + c.text("p") + ") = " + format_real(r.gamma);
  return o;
}

Outcome run_gamma_min(const Config& c) {
  const GammaMinimum m = gamma_min(c.real("plo"), c.real("phi"), c.real("tol"));
  Outcome o;
  o.table.columns = {"pstar", "gammastar", "evaluations"};
  o.table.rows.push_back({m.pstar, m.gammastar, static_cast<long long>(m.evaluations)});
  o.summary = "minimum gamma_p = " + format_real(m.gammastar) + " at p = " + format_real(m.pstar);
  return o;
}

PotentialParams potential_params(const Config& c) { return PotentialParams(c.real("p"), c.real("lambda")); }

int positive_count(const Config& c, const std::string& key) {
  const long long n = c.integer(key);
  if (n < 1 || n > 100000) throw UsageError("--" + key + " must be a positive integer");
  return static_cast<int>(n);
}

void spectrum_rows(Table& t, const LatticeSpectrum& s) {
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
    t.rows.push_back({static_cast<long long>(i + 1), s.eigenvalues[i], s.residuals[i], sector_name(s.sectors[i])});
}

Outcome run_spectrum(const Config& c) {
  const Grid2D grid = grid_for_spacing(c.real("radius"), c.real("spacing"));
  const LatticeSpectrum s =
      solve_lowest(grid, potential_params(c), c.boundary(), positive_count(c, "count"), c.solve_options());
  Outcome o;
  o.table.columns = {"index", "eigenvalue", "residual", "sector"};
  spectrum_rows(o.table, s);
  o.converged = s.converged;
  o.results = {{"npts", std::to_string(grid.npts())}, {"grid_spacing", format_real(grid.spacing())}};
  o.summary = "E_1 = " + (s.eigenvalues.empty() ? std::string("n/a") : format_real(s.eigenvalues[0]));
  return o;
}

Outcome run_scan(const Config& c) {
  const auto rows = cutoff_scan(potential_params(c), c.list("radii"), c.boundary(), positive_count(c, "count"),
                                c.real("spacing"), c.solve_options());
  Outcome o;
  o.table.columns = {"radius", "npts", "index", "eigenvalue", "residual", "converged"};
  for (const auto& r : rows) {
    o.converged = o.converged && r.converged;
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i)
      o.table.rows.push_back({r.radius, static_cast<long long>(r.npts), static_cast<long long>(i + 1),
                              r.eigenvalues[i], r.residuals[i], static_cast<long long>(r.converged)});
  }
  o.summary = "scanned " + std::to_string(rows.size()) + " radii";
  if (!rows.empty() && !rows.back().eigenvalues.empty())
    o.summary += ", E_1(R=" + format_real(rows.back().radius) + ") = " + format_real(rows.back().eigenvalues[0]);
  return o;
}

Outcome run_bracket(const Config& c) {
  const DnBracket b = dn_bracket(potential_params(c), c.real("radius"), c.real("spacing"),
                                 positive_count(c, "count"), c.solve_options());
  Outcome o;
  o.table.columns = {"index", "neumann", "dirichlet", "gap", "neumann_residual", "dirichlet_residual"};
  for (const auto& r : b.rows)
    o.table.rows.push_back({static_cast<long long>(r.index), r.neumann, r.dirichlet, r.gap, r.neumann_residual,
                            r.dirichlet_residual});
  o.converged = b.converged;
  o.results = {{"grid_spacing", format_real(b.spacing)}};
  if (!b.rows.empty()) o.summary = "first gap = " + format_real(b.rows[0].gap);
  return o;
}

Outcome run_critical(const Config& c) {
  const CriticalResult r = critical_lambda(c.real("p"), c.real("radius"), c.real("spacing"), c.real("width"),
                                           c.solve_options());
  Outcome o;
  o.table.columns = {"p", "lambdastar", "lower", "upper", "e_lower", "e_upper", "res_lower", "res_upper",
                     "gamma", "solves", "certified"};
  o.table.rows.push_back({r.p, r.lambdastar, r.lower, r.upper, r.e_lower, r.e_upper, r.res_lower, r.res_upper,
                          r.gamma, static_cast<long long>(r.solves), static_cast<long long>(r.certified)});
  o.summary = "lambda* = " + format_real(r.lambdastar) + (r.certified ? " (certified)" : " (not certified)");
  return o;
}

Outcome run_surface(const Config& c) {
  const CriticalScan s = critical_surface(c.list("pvalues"), c.real("radius"), c.real("spacing"), c.real("width"),
                                          c.solve_options());
  Outcome o;
  o.table.columns = {"p", "lambdastar", "gamma", "uncertainty", "resolved", "error"};
  for (std::size_t i = 0; i < s.pvalues.size(); ++i) {
    o.table.rows.push_back({s.pvalues[i], s.lambdastar[i], s.gammacurve[i], s.uncertainty[i],
                            static_cast<long long>(s.resolved[i]), s.errors[i]});
    if (!s.errors[i].empty()) o.converged = false;
  }
  o.results = {{"grid_spacing", format_real(s.resolution)},
               {"resolution_limited", s.resolution_limited ? "1" : "0"}};
  if (s.meeting) {
    o.results.emplace_back("meeting_plo", format_real(s.meeting->first));
    o.results.emplace_back("meeting_phi", format_real(s.meeting->second));
    o.summary = "curves meet for p in [" + format_real(s.meeting->first) + ", " + format_real(s.meeting->second) + "]";
  } else {
    o.summary = "no resolved meeting of the curves";
  }
  return o;
}

Outcome run_quasimode(const Config& c) {
  const std::string kind = c.text("kind");
  if (kind != "supercritical" && kind != "critical") throw UsageError("--kind must be supercritical or critical");
  const double p = c.real("p");
  if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
  const OscillatorSolution osc = quasimode_oscillator(p);
  Outcome o;
  o.table.columns = {"k", "norm", "residual", "relative", "beta", "tcut", "change"};
  double lambda = 0.0;
  for (double k : c.list("k")) {
    const QuasimodeSpec spec = kind == "critical" ? make_critical(c.real("mu"), k, osc)
                                                  : make_supercritical(potential_params(c), c.real("mu"), k, osc);
    lambda = spec.params.lambda();
    const QuasimodeResult r = quasimode_residual(spec);
    o.table.rows.push_back({k, r.norm, r.residual, r.relative, spec.beta, r.tcut, r.change});
  }
  o.results = {{"gamma", format_real(osc.gamma)}, {"lambda_used", format_real(lambda)}};
  o.summary = "relative residual at k = " + format_real(std::get<double>(o.table.rows.back()[0])) + ": " +
              format_real(std::get<double>(o.table.rows.back()[3]));
  return o;
}

Outcome run_moments(const Config& c) {
  const double sigma = c.real("sigma");
  Outcome o;
  o.table.columns = {"biglambda", "count", "moment", "clambda", "boundshape", "ratio", "gamma"};
  for (double big : c.list("biglambda")) {
    const MomentReport r = moment_sum(potential_params(c), big, sigma, c.real("radius"), c.real("spacing"),
                                      c.solve_options());
    o.converged = o.converged && r.converged;
    o.table.rows.push_back({big, static_cast<long long>(r.eigenvalues.size()), r.moment, r.clambda, r.boundshape,
                            r.ratio, r.gamma});
  }
  o.summary = "moment at Lambda = " + format_real(std::get<double>(o.table.rows.back()[0])) + ": " +
              format_real(std::get<double>(o.table.rows.back()[2]));
  return o;
}

Outcome run_eigfun(const Config& c) {
  const long long index = c.integer("index");
  if (index < 1 || index > 100000) throw UsageError("--index must be a positive integer");
  const EigenfunctionGrid g = export_eigenfunction(potential_params(c), c.real("radius"), c.real("spacing"),
                                                   c.boundary(), static_cast<int>(index), c.solve_options());
  Outcome o;
  o.table.columns = {"x", "y", "value"};
  for (int i = 0; i < g.npts; ++i)
    for (int j = 0; j < g.npts; ++j) o.table.rows.push_back({g.coordinate(i), g.coordinate(j), g.at(i, j)});
  o.results = {{"eigenvalue", format_real(g.eigenvalue)},
               {"residual", format_real(g.residual)},
               {"sector", sector_name(g.sector)},
               {"npts", std::to_string(g.npts)}};
  o.summary = "eigenfunction " + std::to_string(index) + ", E = " + format_real(g.eigenvalue);
  return o;
}

const std::map<std::string, std::function<Outcome(const Config&)>> kRunners = {
    {"gamma", run_gamma},       {"gamma-min", run_gamma_min}, {"spectrum", run_spectrum},
    {"scan-r", run_scan},       {"bracket", run_bracket},     {"critical", run_critical},
    {"surface", run_surface},   {"quasimode", run_quasimode}, {"moments", run_moments},
    {"eigfun", run_eigfun},
};

std::string csv_cell(const Cell& cell) {
  if (const double* d = std::get_if<double>(&cell)) return format_real(*d);
  if (const long long* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  std::string s = std::get<std::string>(cell);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch == '\n' ? ' ' : ch;
  }
  return q + "\"";
}

std::vector<std::pair<std::string, std::string>> metadata(const Config& c, const Outcome& o) {
  std::vector<std::pair<std::string, std::string>> m;
  m.emplace_back("command", c.command);
  for (const auto& [key, value] : kFields) m.emplace_back(key, c.text(key));
  m.emplace_back("output", c.output);
  m.emplace_back("format", c.format);
  m.emplace_back("version", SPECLAB_VERSION);
  m.emplace_back("status", o.converged ? "ok" : "nonconverged");
  for (const auto& r : o.results) m.push_back(r);
  return m;
}

void write_csv(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& meta, const Table& t) {
  os << '#';
  for (const auto& [key, value] : meta) os << ' ' << key << '=' << value;
  os << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << '\n';
  }
}

void write_json(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& meta, const Table& t) {
  nlohmann::ordered_json doc;
  doc["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : meta) doc["metadata"][key] = value;
  doc["columns"] = t.columns;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const Cell& cell : row) std::visit([&](const auto& v) { r.push_back(v); }, cell);
    doc["rows"].push_back(std::move(r));
  }
  os << doc.dump(1) << '\n';
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral experiments for -Laplacian + |xy|^p - lambda (x^2+y^2)^{p/(p+2)}", "speclab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SPECLAB_VERSION);
  Config config;
  std::map<std::string, std::string> values;
  for (const auto& [name, flags] : kCommandFlags) {
    CLI::App* sub = app.add_subcommand(name, kCommandHelp.at(name));
    for (const std::string& flag : flags) {
      std::string fallback;
      for (const auto& [key, value] : kFields)
        if (key == flag) fallback = value;
      sub->add_option("--" + flag, values[name + "/" + flag], "default " + fallback);
    }
    sub->add_option("--output", config.output, "output file (stdout when absent)");
    sub->add_option("--format", config.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    if (const CLI::App* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front())
      err << sub->help();
    else
      err << app.help();
    return kExitUsage;
  }

  const CLI::App* sub = app.get_subcommands().front();
  config.command = sub->get_name();
  for (const std::string& flag : kCommandFlags.at(config.command)) {
    if (sub->get_option("--" + flag)->count() > 0) config.given[flag] = values[config.command + "/" + flag];
  }

  Outcome outcome;
  int status = kExitOk;
  try {
    outcome = kRunners.at(config.command)(config);
    if (!outcome.converged) status = kExitNonConvergence;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n' << sub->help();
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    outcome.converged = false;
    outcome.results.emplace_back("failure", e.what());
    status = kExitNonConvergence;
  } catch (const BracketError& e) {
    err << "error: " << e.what() << '\n';
    outcome.converged = false;
    outcome.results.emplace_back("failure", e.what());
    status = kExitNonConvergence;
  } catch (const std::runtime_error& e) {
    // Eigenvalue caps and similar limits of the requested computation.
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const auto meta = metadata(config, outcome);
  std::ostream* summary = &err;
  std::ofstream file;
  std::ostream* sink = &out;
  if (!config.output.empty()) {
    file.open(config.output, std::ios::binary | std::ios::trunc);
    if (!file) {
      err << "error: cannot open " << config.output << '\n';
      return kExitUsage;
    }
    sink = &file;
    summary = &out;
  }
  if (config.format == "json")
    write_json(*sink, meta, outcome.table);
  else
    write_csv(*sink, meta, outcome.table);
  sink->flush();
  *summary << config.command << ": " << (outcome.summary.empty() ? "no result" : outcome.summary)
           << (status == kExitNonConvergence ? " [non-converged]" : "") << '\n';
  return status;
}

}  // namespace speclab::cli
