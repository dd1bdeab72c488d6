#include "lazyppl/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "lazyppl/diagnostics.hpp"
#include "lazyppl/errors.hpp"
#include "lazyppl/inference.hpp"
#include "lazyppl/models.hpp"

namespace lazyppl::cli {

namespace {

using Json = nlohmann::ordered_json;

// A table of doubles, the in-memory form of a samples file.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(std::size_t j) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[j]);
    return out;
  }
};

KernelSpec make_kernel(const RunConfig& c) {
  if (c.kernel == "all-sites") return KernelSpec::all_sites(c.p);
  if (c.kernel == "single-site") return KernelSpec::single_site();
  if (c.kernel == "mix") return irreducible_mix(c.mix_r, c.p);
  throw ConfigError("unknown kernel '" + c.kernel +
                    "' (expected all-sites, single-site or mix)");
}

void write_table(const Table& t, const std::string& path,
                 const std::string& format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  if (format == "json") {
    Json j;
    j["columns"] = t.columns;
    j["rows"] = t.rows;
    out << j.dump() << '\n';
    return;
  }
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i > 0) out << ',';
    out << t.columns[i];
  }
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t end = line.find(',', pos);
    out.push_back(line.substr(pos, end == std::string::npos ? end : end - pos));
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return out;
}

Table read_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lazyppl::ParseError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  Table t;

  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      Json j = Json::parse(text);
      t.columns = j.at("columns").get<std::vector<std::string>>();
      for (const auto& row : j.at("rows")) {
        std::vector<double> r;
        for (const auto& v : row) r.push_back(v.is_null() ? std::nan("") : v.get<double>());
        t.rows.push_back(std::move(r));
      }
    } catch (const nlohmann::json::exception& e) {
      throw lazyppl::ParseError("malformed samples JSON: " + std::string(e.what()));
    }
  } else {
    std::istringstream lines(text);
    std::string line;
    if (!std::getline(lines, line) || line.empty()) {
      throw lazyppl::ParseError("samples file has no header");
    }
    if (line.back() == '\r') line.pop_back();
    t.columns = split_csv_line(line);
    std::size_t lineno = 1;
    while (std::getline(lines, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      auto fields = split_csv_line(line);
      if (fields.size() != t.columns.size()) {
        throw lazyppl::ParseError("line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(t.columns.size()) + " fields");
      }
      std::vector<double> r;
      for (const auto& f : fields) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size()) {
          throw lazyppl::ParseError("line " + std::to_string(lineno) +
                                    ": bad number '" + f + "'");
        }
        r.push_back(v);
      }
      t.rows.push_back(std::move(r));
    }
  }
  for (const auto& r : t.rows) {
    if (r.size() != t.columns.size()) {
      throw lazyppl::ParseError("samples row width does not match header");
    }
  }
  return t;
}

Json mean_sd(std::span<const double> xs) {
  Json j;
  j["mean"] = diag::mean(xs);
  j["sd"] = diag::sd(xs);
  return j;
}

std::vector<double> grid_points(const RunConfig& c) {
  std::vector<double> xs(c.grid_points);
  for (std::size_t i = 0; i < c.grid_points; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(c.grid_points - 1);
    xs[i] = i + 1 == c.grid_points ? c.grid_max : c.grid_min + t * (c.grid_max - c.grid_min);
  }
  return xs;
}

// Evenly spaced picks from n emitted samples.
std::vector<std::size_t> draw_indices(std::size_t n, std::size_t draws) {
  std::vector<std::size_t> out(draws);
  for (std::size_t i = 0; i < draws; ++i) out[i] = i * n / draws;
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void validate(const RunConfig& c) {
  if (c.model.empty()) throw ConfigError("no model given");
  if (c.steps == 0) throw ConfigError("--steps must be >= 1");
  if (c.burn_in >= c.steps) throw ConfigError("--burn-in must be < --steps");
  if (c.thin == 0) throw ConfigError("--thin must be >= 1");
  if (c.chains == 0) throw ConfigError("--chains must be >= 1");
  if (c.format != "csv" && c.format != "json") {
    throw ConfigError("--format must be csv or json");
  }
  if (!(c.p >= 0.0 && c.p <= 1.0)) throw ConfigError("--p must lie in [0,1]");
  if (c.kernel == "mix" && !(c.mix_r > 0.0 && c.mix_r < 1.0)) {
    throw ConfigError("--mix-r must lie in (0,1)");
  }
  const ModelSpec* spec = find_model(c.model);
  if (spec == nullptr) throw ConfigError("unknown model '" + c.model + "'");
  if (spec->functional) {
    if (c.grid_points < 2) throw ConfigError("--grid-points must be >= 2");
    if (!(c.grid_max > c.grid_min)) throw ConfigError("--grid-max must exceed --grid-min");
    std::size_t emitted = (c.steps - c.burn_in) / c.thin;
    if (c.draws == 0 || c.draws > emitted) {
      throw ConfigError("--draws must lie in [1, " + std::to_string(emitted) + "]");
    }
  }
}

std::string samples_path(const RunConfig& c, std::size_t chain) {
  if (c.chains == 1) return c.output;
  std::filesystem::path p(c.output);
  std::string ext = p.extension().string();
  p.replace_extension();
  return p.string() + ".chain" + std::to_string(chain) + ext;
}

std::string summary_path(const RunConfig& c) {
  std::filesystem::path p(c.output);
  p.replace_extension();
  return p.string() + ".summary.json";
}

Json run(const RunConfig& c) {
  validate(c);
  const ModelSpec& spec = *find_model(c.model);

  ModelOptions options;
  if (!c.dataset.empty()) {
    try {
      options.dataset = read_dataset_csv(c.dataset);
    } catch (const lazyppl::ParseError& e) {
      throw ConfigError(e.what());
    }
  }
  options.sigma = c.sigma;
  options.rate = c.rate;
  options.alpha = c.alpha;

  MeasComp<ModelOutput> model;
  KernelSpec kernel;
  std::vector<std::string> columns;
  try {
    model = spec.build(options);
    kernel = make_kernel(c);
    columns = spec.columns(options);
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }

  MhConfig mhc{c.steps, c.burn_in, c.thin, c.seed};
  auto start = std::chrono::steady_clock::now();
  std::vector<MhResult<ModelOutput>> chains = run_chains(model, kernel, mhc, c.chains);

  const std::vector<double> grid = spec.functional ? grid_points(c) : std::vector<double>{};
  std::vector<Table> tables;
  for (const auto& chain : chains) {
    Table t;
    if (spec.functional) {
      t.columns.push_back("x");
      for (std::size_t d = 0; d < c.draws; ++d) t.columns.push_back("draw_" + std::to_string(d));
      auto picks = draw_indices(chain.samples.size(), c.draws);
      t.rows.assign(grid.size(), {});
      for (std::size_t i = 0; i < grid.size(); ++i) t.rows[i].push_back(grid[i]);
      for (std::size_t pick : picks) {
        const RealFn& f = chain.samples[pick].value.fn;
        for (std::size_t i = 0; i < grid.size(); ++i) t.rows[i].push_back(f(grid[i]));
      }
    } else {
      t.columns = {"index", "log_weight", "accepted", "sites"};
      t.columns.insert(t.columns.end(), columns.begin(), columns.end());
      for (std::size_t i = 0; i < chain.samples.size(); ++i) {
        const auto& s = chain.samples[i];
        std::vector<double> row{static_cast<double>(i), s.log_weight,
                                s.accepted ? 1.0 : 0.0, static_cast<double>(s.sites)};
        row.insert(row.end(), s.value.scalars.begin(), s.value.scalars.end());
        t.rows.push_back(std::move(row));
      }
    }
    tables.push_back(std::move(t));
  }
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);

  for (std::size_t i = 0; i < tables.size(); ++i) {
    write_table(tables[i], samples_path(c, i), c.format);
  }

  std::size_t proposals = 0, accepted = 0, errors = 0, n_samples = 0, psd = 0;
  std::size_t min_sites = std::numeric_limits<std::size_t>::max(), max_sites = 0;
  double site_total = 0.0;
  for (const auto& chain : chains) {
    proposals += chain.stats.proposals;
    accepted += chain.stats.accepted;
    errors += chain.stats.errors;
    psd += chain.stats.psd_warnings;
    n_samples += chain.samples.size();
    min_sites = std::min(min_sites, chain.stats.min_sites);
    max_sites = std::max(max_sites, chain.stats.max_sites);
    site_total += chain.stats.mean_sites * static_cast<double>(chain.samples.size());
  }

  Json summary;
  summary["model"] = c.model;
  summary["kernel"] = kernel.describe();
  summary["chains"] = c.chains;
  summary["steps"] = c.steps;
  summary["burn_in"] = c.burn_in;
  summary["thin"] = c.thin;
  summary["seed"] = c.seed;
  summary["acceptance_rate"] =
      proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
  summary["n_samples"] = n_samples;
  summary["error_count"] = errors;
  summary["psd_warnings"] = psd;
  summary["wall_time_ms"] = elapsed.count();
  summary["distinct_sites_stats"] = {
      {"min", n_samples == 0 ? 0 : min_sites},
      {"max", max_sites},
      {"mean", n_samples == 0 ? 0.0 : site_total / static_cast<double>(n_samples)}};

  Json cols = Json::object();
  if (spec.functional) {
    // Per draw column across the grid, then per grid point across draws.
    for (std::size_t j = 1; j < tables[0].columns.size(); ++j) {
      std::vector<double> xs;
      for (const auto& t : tables) {
        auto col = t.column(j);
        xs.insert(xs.end(), col.begin(), col.end());
      }
      cols[tables[0].columns[j]] = mean_sd(xs);
    }
    Json g = Json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<double> ys;
      for (const auto& t : tables) ys.insert(ys.end(), t.rows[i].begin() + 1, t.rows[i].end());
      Json entry = mean_sd(ys);
      entry["x"] = grid[i];
      g.push_back(std::move(entry));
    }
    summary["columns"] = std::move(cols);
    summary["grid"] = std::move(g);
  } else {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      std::vector<double> xs;
      for (const auto& t : tables) {
        auto col = t.column(4 + j);
        xs.insert(xs.end(), col.begin(), col.end());
      }
      cols[columns[j]] = mean_sd(xs);
    }
    summary["columns"] = std::move(cols);
  }

  std::ofstream out(summary_path(c), std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + summary_path(c) + "'");
  out << summary.dump(2) << '\n';
  return summary;
}

void list(std::ostream& out) {
  for (const auto& m : model_catalog()) {
    out << m.id << '\t' << m.description << '\t' << m.inputs << '\n';
  }
}

Json diagnose(const std::string& path) {
  Table t = read_table(path);
  Json out;
  out["file"] = path;
  out["n"] = t.rows.size();
  Json cols = Json::object();
  for (std::size_t j = 0; j < t.columns.size(); ++j) {
    auto xs = t.column(j);
    diag::ColumnSummary s = diag::summarize(xs);
    Json c;
    c["mean"] = s.mean;
    c["sd"] = s.sd;
    Json q;
    for (std::size_t i = 0; i < diag::kQuantileLevels.size(); ++i) {
      q[format_double(diag::kQuantileLevels[i] * 100.0) + "%"] = s.quantiles[i];
    }
    c["quantiles"] = std::move(q);
    c["autocorrelation"] = s.autocorrelation;
    c["ess"] = s.ess;
    cols[t.columns[j]] = std::move(c);
  }
  out["columns"] = std::move(cols);
  return out;
}

int main_entry(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Lazy probabilistic programs: prior simulation and MHG inference"};
  app.require_subcommand(1);

  CLI::App* list_cmd = app.add_subcommand("list", "List bundled models");

  RunConfig c;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a bundled model under MHG");
  run_cmd->add_option("model", c.model, "Model id (see `list`)")
      ->required()
      ->envname("LAZYPPL_MODEL");
  run_cmd->add_option("--kernel", c.kernel, "all-sites | single-site | mix")
      ->envname("LAZYPPL_KERNEL");
  run_cmd->add_option("--p", c.p, "All-sites resample probability")->envname("LAZYPPL_P");
  run_cmd->add_option("--mix-r", c.mix_r, "Weight of all-sites(1) in mix")
      ->envname("LAZYPPL_MIX_R");
  run_cmd->add_option("--steps", c.steps)->envname("LAZYPPL_STEPS");
  run_cmd->add_option("--burn-in", c.burn_in)->envname("LAZYPPL_BURN_IN");
  run_cmd->add_option("--thin", c.thin)->envname("LAZYPPL_THIN");
  run_cmd->add_option("--seed", c.seed)->envname("LAZYPPL_SEED");
  run_cmd->add_option("--dataset", c.dataset, "CSV file with header x,y")
      ->envname("LAZYPPL_DATASET");
  run_cmd->add_option("--grid-min", c.grid_min)->envname("LAZYPPL_GRID_MIN");
  run_cmd->add_option("--grid-max", c.grid_max)->envname("LAZYPPL_GRID_MAX");
  run_cmd->add_option("--grid-points", c.grid_points)->envname("LAZYPPL_GRID_POINTS");
  run_cmd->add_option("--draws", c.draws, "Posterior function draws on the grid")
      ->envname("LAZYPPL_DRAWS");
  run_cmd->add_option("--output", c.output, "Samples file")->envname("LAZYPPL_OUTPUT");
  run_cmd->add_option("--format", c.format, "csv | json")->envname("LAZYPPL_FORMAT");
  run_cmd->add_option("--chains", c.chains, "Independent chains run in parallel")
      ->envname("LAZYPPL_CHAINS");
  double sigma = 0.0;
  CLI::Option* sigma_opt =
      run_cmd->add_option("--sigma", sigma, "Observation noise for regression models")
          ->envname("LAZYPPL_SIGMA");
  run_cmd->add_option("--rate", c.rate, "Change-point rate (piecewise-regression)")
      ->envname("LAZYPPL_RATE");
  run_cmd->add_option("--alpha", c.alpha, "Concentration (dp-cluster)")
      ->envname("LAZYPPL_ALPHA");

  std::string diag_file;
  CLI::App* diag_cmd = app.add_subcommand("diag", "Diagnostics of a samples file");
  diag_cmd->add_option("file", diag_file)->required()->envname("LAZYPPL_FILE");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*list_cmd) {
      list(out);
    } else if (*run_cmd) {
      if (*sigma_opt) c.sigma = sigma;
      Json summary = run(c);
      out << summary.dump(2) << '\n';
    } else if (*diag_cmd) {
      out << diagnose(diag_file).dump(2) << '\n';
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const lazyppl::ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace lazyppl::cli
