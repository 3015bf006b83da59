// vlcq command-line front end: simulate, sweep, codebook, verify, toy.

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vlcq/analysis.hpp"
#include "vlcq/codebook.hpp"
#include "vlcq/quantizer.hpp"
#include "vlcq/simulate.hpp"
#include "vlcq/toy_sources.hpp"

#ifndef VLCQ_VERSION
#define VLCQ_VERSION "0.0.0"
#endif

namespace {

using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Flat "key = value" file; keys are flag names without the leading dashes.
std::vector<std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    if (key.empty() || value.empty() || key == "config")
      throw UsageError(path + ":" + std::to_string(lineno) + ": malformed entry");
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

// Moves config-file entries in front of the command-line flags so that, with
// TakeLast semantics, flags override the file.
std::vector<std::string> expand_config(const std::vector<std::string>& argv) {
  if (argv.empty()) return argv;
  std::vector<std::string> file_args, rest;
  for (std::size_t i = 1; i < argv.size(); ++i) {
    const std::string& a = argv[i];
    if (a == "--config") {
      if (i + 1 >= argv.size()) throw UsageError("--config needs a path");
      const auto f = read_config_file(argv[++i]);
      file_args.insert(file_args.end(), f.begin(), f.end());
    } else if (a.rfind("--config=", 0) == 0) {
      const auto f = read_config_file(a.substr(9));
      file_args.insert(file_args.end(), f.begin(), f.end());
    } else {
      rest.push_back(a);
    }
  }
  std::vector<std::string> out{argv[0]};
  if (!rest.empty() && rest.front().rfind("-", 0) != 0) {
    out.push_back(rest.front());
    rest.erase(rest.begin());
  }
  out.insert(out.end(), file_args.begin(), file_args.end());
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) throw UsageError("bad number '" + item + "' in list '" + s + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double json_number(double v) { return v; }

json number_or_null(double v) {
  if (std::isfinite(v)) return json_number(v);
  return nullptr;
}

struct Output {
  std::string path;  // empty: stdout
  std::string format = "csv";
};

void emit(const Output& o, const std::string& body) {
  if (o.path.empty()) {
    std::cout << body;
    std::cout.flush();
    return;
  }
  std::ofstream f(o.path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write output file '" + o.path + "'");
  f << body;
  if (!f) throw std::runtime_error("write failed for '" + o.path + "'");
}

void write_manifest(const Output& o, const std::string& command, const std::vector<std::string>& argv,
                    const json& effective, std::uint64_t seed, const std::string& started) {
  if (o.path.empty()) return;
  json m;
  m["artifact"] = "vlcq";
  m["version"] = VLCQ_VERSION;
  m["command"] = command;
  m["argv"] = argv;
  m["config"] = effective;
  m["seed"] = seed;
  m["started_utc"] = started;
  m["finished_utc"] = utc_now();
  m["outputs"] = json::array({std::filesystem::absolute(o.path).string()});
  const std::string path = o.path + ".manifest.json";
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write manifest '" + path + "'");
  f << m.dump(2) << '\n';
}

struct SimArgs {
  int t = 2;
  double rho = 1.0;
  std::string p_grid = "10";
  int ell_max = 4;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  unsigned shards = std::max(1u, std::thread::hardware_concurrency());
  std::string mode = "vlq";
  bool verify_cells = false;
};

json sim_config_json(const SimArgs& a) {
  json j;
  j["t"] = a.t;
  j["rho"] = a.rho;
  j["p_grid"] = a.p_grid;
  j["ell_max"] = a.ell_max;
  j["samples"] = a.samples;
  j["seed"] = a.seed;
  j["shards"] = a.shards;
  j["mode"] = a.mode;
  j["verify_cells"] = a.verify_cells;
  return j;
}

std::vector<vlcq::SimConfig> build_configs(const SimArgs& a) {
  std::vector<vlcq::SimConfig> out;
  const auto modes = split_commas(a.mode);
  for (const auto& m : modes) {
    for (double p : parse_grid(a.p_grid)) {
      vlcq::SimConfig c;
      try {
        c.params = vlcq::SystemParams::make(a.t, a.rho, p);
      } catch (const std::exception& e) {
        throw UsageError(e.what());
      }
      c.mode = vlcq::parse_mode(m, c.flq_size);
      c.ell_max = a.ell_max;
      c.n_samples = a.samples;
      c.seed = a.seed;
      c.shards = a.shards;
      c.verify_cells = a.verify_cells;
      try {
        c.validate();
      } catch (const std::exception& e) {
        throw UsageError(e.what());
      }
      out.push_back(c);
    }
  }
  return out;
}

std::string render_rows(const std::vector<vlcq::SweepRow>& rows, const std::string& format) {
  if (format == "csv") {
    std::ostringstream os;
    vlcq::write_csv(os, rows);
    return os.str();
  }
  json arr = json::array();
  for (const auto& row : rows) {
    const auto& c = row.config;
    const auto& r = row.result;
    const double nan = std::nan("");
    const auto v = [&](double x) { return number_or_null(row.ok ? x : nan); };
    json j;
    j["mode"] = c.mode_name();
    j["t"] = c.params.t;
    j["rho"] = c.params.rho;
    j["P"] = c.params.power;
    j["alpha"] = c.params.alpha;
    j["ell_max"] = c.ell_max;
    j["n_samples"] = c.n_samples;
    j["out_hat"] = v(r.out_hat);
    j["out_se"] = v(r.out_se);
    j["closed_full"] = v(r.closed_full);
    j["closed_open"] = v(r.closed_open);
    j["rate_bstar_hat"] = v(r.rate_bstar_hat);
    j["rate_prefix_hat"] = v(r.rate_prefix_hat);
    j["rate_se"] = v(r.rate_se);
    j["truncation_frac"] = v(r.truncation_frac);
    j["mean_index"] = v(r.mean_index);
    j["seed"] = c.seed;
    if (!row.ok) j["error"] = row.error;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

void add_sim_flags(CLI::App* cmd, SimArgs& a, Output& o, bool grid) {
  cmd->add_option("--t", a.t, "transmit antennas")->required()->check(CLI::Range(1, 64));
  cmd->add_option("--rho", a.rho, "target rate in bits")->capture_default_str();
  if (grid) {
    cmd->add_option("--p-grid", a.p_grid, "comma-separated SNR values")->required();
  } else {
    cmd->add_option("--p,--p-grid", a.p_grid, "SNR value (or comma-separated list)")->capture_default_str();
  }
  cmd->add_option("--ell-max", a.ell_max, "deepest codebook layer")->capture_default_str();
  cmd->add_option("--samples", a.samples, "channel samples per row")->capture_default_str();
  cmd->add_option("--seed", a.seed, "master seed")->capture_default_str();
  cmd->add_option("--shards", a.shards, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--mode", a.mode, "vlq, flq:N, precoding, open, full (comma list allowed)")->capture_default_str();
  cmd->add_option("--out", o.path, "output file (default stdout)");
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  cmd->add_flag("--verify-cells", a.verify_cells, "re-check every cell decision");
}

int run_sim(const SimArgs& a, const Output& o, const std::string& command, const std::vector<std::string>& argv) {
  const std::string started = utc_now();
  const auto configs = build_configs(a);
  const auto rows = vlcq::sweep(configs);
  emit(o, render_rows(rows, o.format));
  json eff = sim_config_json(a);
  eff["format"] = o.format;
  write_manifest(o, command, argv, eff, a.seed, started);
  int status = 0;
  for (const auto& r : rows) {
    if (!r.ok) {
      std::cerr << "vlcq: " << r.config.mode_name() << " P=" << r.config.params.power << ": " << r.error << '\n';
      status = 1;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> raw(argv, argv + argc);
  std::vector<std::string> args;
  try {
    args = expand_config(raw);
  } catch (const UsageError& e) {
    std::cerr << "vlcq: " << e.what() << '\n';
    return 2;
  }

  CLI::App app{"Variable-length channel quantization for outage-limited MISO beamforming"};
  app.require_subcommand(1);
  app.set_version_flag("--version", VLCQ_VERSION);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_unused;
  app.add_option("--config", config_unused, "flat key = value file; flags win");

  SimArgs sim_args;
  Output sim_out;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo outage and feedback rate");
  add_sim_flags(simulate, sim_args, sim_out, false);

  SimArgs sweep_args;
  Output sweep_out;
  auto* sweep = app.add_subcommand("sweep", "simulate over an SNR grid");
  add_sim_flags(sweep, sweep_args, sweep_out, true);

  int cb_t = 2, cb_ell = 2;
  Output cb_out;
  std::string cb_import;
  auto* codebook = app.add_subcommand("codebook", "export or validate a layered codebook");
  codebook->add_option("--t", cb_t, "transmit antennas")->required()->check(CLI::Range(1, 64));
  codebook->add_option("--ell-max", cb_ell, "deepest layer")->capture_default_str();
  codebook->add_option("--out", cb_out.path, "output CSV (default stdout)");
  codebook->add_option("--import", cb_import, "validate an existing codebook CSV instead");

  vlcq::VerifyConfig vc;
  vc.shards = std::max(1u, std::thread::hardware_concurrency());
  Output v_out;
  auto* verify = app.add_subcommand("verify", "run the invariant battery, JSON report");
  verify->add_option("--t", vc.t, "transmit antennas")->required()->check(CLI::Range(1, 64));
  verify->add_option("--rho", vc.rho)->capture_default_str();
  verify->add_option("--p", vc.power, "SNR")->capture_default_str();
  verify->add_option("--ell-max", vc.ell_max)->capture_default_str();
  verify->add_option("--samples", vc.samples)->capture_default_str();
  verify->add_option("--seed", vc.seed)->capture_default_str();
  verify->add_option("--shards", vc.shards)->check(CLI::PositiveNumber);
  verify->add_option("--out", v_out.path, "output JSON (default stdout)");

  std::uint64_t n_trunc = 1000000;
  Output toy_out;
  auto* toy = app.add_subcommand("toy", "toy-source rate brackets, Kraft sums, FLQ distortion");
  toy->add_option("--n-trunc", n_trunc, "exact terms in the rate bracket")->capture_default_str();
  toy->add_option("--out", toy_out.path, "output CSV (default stdout)");

  for (auto* sub : {simulate, sweep, codebook, verify, toy})
    for (auto* opt : sub->get_options()) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(std::move(rev));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const std::vector<std::string> echo(raw.begin() + 1, raw.end());
  try {
    if (*simulate) return run_sim(sim_args, sim_out, "simulate", echo);
    if (*sweep) return run_sim(sweep_args, sweep_out, "sweep", echo);

    if (*codebook) {
      const std::string started = utc_now();
      if (!cb_import.empty()) {
        std::ifstream in(cb_import);
        if (!in) throw UsageError("cannot read '" + cb_import + "'");
        const auto keys = vlcq::import_codebook_csv(in);
        std::cout << "valid codebook: " << keys.size() << " directions\n";
        return 0;
      }
      if (cb_ell < 0 || cb_ell > vlcq::kMaxLayer) throw UsageError("--ell-max out of range");
      const vlcq::CodebookStream stream(cb_t, cb_ell);
      std::ostringstream os;
      vlcq::export_codebook_csv(os, stream);
      emit(cb_out, os.str());
      json eff;
      eff["t"] = cb_t;
      eff["ell_max"] = cb_ell;
      eff["layer_sizes"] = stream.layer_sizes();
      write_manifest(cb_out, "codebook", echo, eff, 0, started);
      return 0;
    }

    if (*verify) {
      const std::string started = utc_now();
      const auto report = vlcq::run_verification(vc);
      json j;
      j["t"] = vc.t;
      j["rho"] = vc.rho;
      j["P"] = vc.power;
      j["ell_max"] = vc.ell_max;
      j["samples"] = vc.samples;
      j["seed"] = vc.seed;
      j["all_passed"] = report.all_passed();
      j["checks"] = json::array();
      for (const auto& c : report.checks)
        j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"margin", number_or_null(c.margin)},
                               {"detail", c.detail}});
      v_out.format = "json";
      emit(v_out, j.dump(2) + "\n");
      json eff = j;
      eff.erase("checks");
      eff.erase("all_passed");
      write_manifest(v_out, "verify", echo, eff, vc.seed, started);
      return report.all_passed() ? 0 : 1;
    }

    if (*toy) {
      const std::string started = utc_now();
      std::ostringstream os;
      os << "quantity,n,value\n";
      const auto row = [&](const char* q, std::uint64_t n, double v) {
        os << q << ',' << n << ',' << vlcq::format_double(v) << '\n';
      };
      const auto br = vlcq::toy_vlq_rate(n_trunc);
      row("vlq_rate_lower", n_trunc, br.lower);
      row("vlq_rate_upper", n_trunc, br.upper);
      const auto pf = vlcq::kraft_sum(vlcq::LengthScheme::kPrefixFree, n_trunc);
      row("kraft_prefix_partial", n_trunc, pf.partial);
      row("kraft_prefix_tail_bound", n_trunc, pf.tail_bound);
      for (std::uint64_t n : {1, 2, 4, 8, 16, 32, 64})
        row("kraft_bstar_partial", n, vlcq::kraft_sum(vlcq::LengthScheme::kBstar, n).partial);
      for (std::uint64_t n = 1; n <= 1000000; n *= 10) row("flq_distortion", n, vlcq::toy_flq_distortion(n));
      emit(toy_out, os.str());
      json eff;
      eff["n_trunc"] = n_trunc;
      write_manifest(toy_out, "toy", echo, eff, 0, started);
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "vlcq: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "vlcq: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "vlcq: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
