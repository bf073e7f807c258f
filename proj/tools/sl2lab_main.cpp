#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sl2lab/io.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ordered_json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config: " + path);
  try {
    return ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
}

const ordered_json& need(const ordered_json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("config field missing: ") + key);
  return j[key];
}

double need_num(const ordered_json& j, const char* key) {
  const auto& v = need(j, key);
  if (!v.is_number()) throw ConfigError(std::string("config field must be a number: ") + key);
  return v.get<double>();
}

int need_int(const ordered_json& j, const char* key) {
  const auto& v = need(j, key);
  if (!v.is_number_integer()) throw ConfigError(std::string("config field must be an integer: ") + key);
  return v.get<int>();
}

std::uint64_t need_seed(const ordered_json& j) {
  const auto& v = need(j, "seed");
  if (!v.is_number_unsigned() && !v.is_number_integer())
    throw ConfigError("config field must be a nonnegative integer: seed");
  auto s = v.get<long long>();
  if (s < 0) throw ConfigError("config field must be a nonnegative integer: seed");
  return std::uint64_t(s);
}

std::vector<double> num_list(const ordered_json& v, const char* key) {
  if (!v.is_array()) throw ConfigError(std::string("config field must be an array: ") + key);
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(std::string("config field must hold numbers: ") + key);
    out.push_back(x.get<double>());
  }
  return out;
}

sl2lab::EnergyFamily parse_family(const ordered_json& j, ordered_json& echo) {
  const auto& f = need(j, "family");
  if (!f.is_object()) throw ConfigError("config field must be an object: family");
  std::string type = f.value("type", "");
  echo["family"] = f;

  if (type == "embedded") {
    const auto& atoms = need(f, "atoms");
    if (!atoms.is_array() || atoms.empty())
      throw ConfigError("config field must be a nonempty array: family.atoms");
    sl2lab::FiniteMeasure mu;
    for (const auto& row : atoms) {
      auto e = num_list(row, "family.atoms");
      if (e.size() != 4) throw ConfigError("family.atoms rows must be 2x2 row-major [a,b,c,d]");
      mu.atoms.push_back({e[0], e[1], e[2], e[3]});
    }
    mu.probs = num_list(need(f, "probs"), "family.probs");
    return sl2lab::make_family(mu);
  }
  if (type == "direct") {
    return sl2lab::direct_family(num_list(need(f, "potentials"), "family.potentials"),
                                 num_list(need(f, "probs"), "family.probs"));
  }
  if (type == "halperin") {
    return sl2lab::halperin_family(need_num(f, "a"), need_num(f, "b"));
  }
  if (type == "zero") {
    return sl2lab::zero_potential_family();
  }
  throw ConfigError("family.type must be one of: embedded, direct, halperin, zero");
}

std::vector<double> parse_energies(const ordered_json& j) {
  const auto& e = need(j, "energies");
  if (e.is_array()) return num_list(e, "energies");
  if (e.is_object()) {
    double lo = need_num(e, "lo"), hi = need_num(e, "hi");
    int count = need_int(e, "count");
    if (count < 2 || !(hi > lo)) throw ConfigError("energies range needs lo < hi and count >= 2");
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) out[i] = lo + (hi - lo) * double(i) / (count - 1);
    return out;
  }
  throw ConfigError("energies must be an array or {lo, hi, count}");
}

sl2lab::Exec parse_exec(const ordered_json& j, ordered_json& echo) {
  std::string ex = j.value("exec", "parallel");
  echo["exec"] = ex;
  if (ex == "serial") return sl2lab::Exec::serial;
  if (ex == "parallel") return sl2lab::Exec::parallel;
  throw ConfigError("exec must be serial or parallel");
}

void write_echo(const fs::path& out_dir, const ordered_json& echo) {
  sl2lab::write_text((out_dir / "config_echo.json").string(), echo.dump(2) + "\n");
}

int run_command(const std::string& cmd, const std::string& config_path,
                const std::string& out_override) {
  ordered_json cfg = load_config(config_path);
  fs::path out_dir = out_override.empty() ? fs::path(cfg.value("out_dir", ".")) : fs::path(out_override);
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  ordered_json echo;
  echo["command"] = cmd;

  if (cmd == "lyapunov") {
    sl2lab::EnergyFamily fam = parse_family(cfg, echo);
    auto energies = parse_energies(cfg);
    int n = need_int(cfg, "n"), samples = need_int(cfg, "samples");
    std::uint64_t seed = need_seed(cfg);
    sl2lab::Exec ex = parse_exec(cfg, echo);
    echo["energies"] = energies;
    echo["n"] = n;
    echo["samples"] = samples;
    echo["seed"] = seed;
    write_echo(out_dir, echo);
    sl2lab::EnergyCurve curve = sl2lab::lyapunov_curve(fam, energies, n, samples, seed, ex);
    sl2lab::write_energy_curve_csv((out_dir / "lyapunov.csv").string(), curve);
    return 0;
  }

  if (cmd == "ids") {
    sl2lab::EnergyFamily fam = parse_family(cfg, echo);
    auto energies = parse_energies(cfg);
    int n = need_int(cfg, "n"), samples = need_int(cfg, "samples");
    std::uint64_t seed = need_seed(cfg);
    sl2lab::Exec ex = parse_exec(cfg, echo);
    echo["energies"] = energies;
    echo["n"] = n;
    echo["samples"] = samples;
    echo["seed"] = seed;
    write_echo(out_dir, echo);
    sl2lab::IdsCurve curve = sl2lab::finite_ids(fam, n, energies, samples, seed, ex);
    sl2lab::write_ids_csv((out_dir / "ids.csv").string(), curve);
    return 0;
  }

  if (cmd == "thouless") {
    sl2lab::EnergyFamily fam = parse_family(cfg, echo);
    double E = need_num(cfg, "E");
    int n = need_int(cfg, "n"), samples = need_int(cfg, "samples");
    std::uint64_t seed = need_seed(cfg);
    double clip = cfg.value("clip", 1e-12);
    sl2lab::Exec ex = parse_exec(cfg, echo);
    echo["E"] = E;
    echo["n"] = n;
    echo["samples"] = samples;
    echo["seed"] = seed;
    echo["clip"] = clip;
    write_echo(out_dir, echo);
    sl2lab::ThoulessReport rep = sl2lab::thouless_gap(fam, E, n, samples, seed, clip, ex);
    sl2lab::write_thouless_csv((out_dir / "thouless.csv").string(), rep, E, n, samples, seed);
    return 0;
  }

  if (cmd == "matchings") {
    sl2lab::EnergyFamily fam = parse_family(cfg, echo);
    int k = need_int(cfg, "k");
    double delta = need_num(cfg, "delta");
    auto interval = num_list(need(cfg, "interval"), "interval");
    if (interval.size() != 2) throw ConfigError("interval must be [lo, hi]");
    int samples = need_int(cfg, "samples");
    std::uint64_t seed = need_seed(cfg);
    sl2lab::Exec ex = parse_exec(cfg, echo);
    echo["k"] = k;
    echo["delta"] = delta;
    echo["interval"] = interval;
    echo["samples"] = samples;
    echo["seed"] = seed;
    write_echo(out_dir, echo);
    sl2lab::MatchingSearch s =
        sl2lab::find_matchings(fam, k, delta, interval[0], interval[1], samples, seed, ex);
    sl2lab::write_matching_records((out_dir / "records.jsonl").string(), s);
    sl2lab::write_matching_summary((out_dir / "summary.json").string(), s, k, delta, interval[0],
                                   interval[1]);
    return 0;
  }

  if (cmd == "tangency") {
    sl2lab::EnergyFamily fam = parse_family(cfg, echo);
    double E0 = need_num(cfg, "E0");
    int max_len = need_int(cfg, "max_len");
    double radius = need_num(cfg, "radius");
    double min_lambda = cfg.value("min_lambda", 1.5);
    long long cap = cfg.value("cap", 1000000LL);
    std::uint64_t seed = need_seed(cfg);
    echo["E0"] = E0;
    echo["max_len"] = max_len;
    echo["radius"] = radius;
    echo["min_lambda"] = min_lambda;
    echo["cap"] = cap;
    echo["seed"] = seed;
    write_echo(out_dir, echo);
    sl2lab::TangencyRecord rec = sl2lab::find_tangency(fam, E0, max_len, radius, min_lambda, cap);
    sl2lab::write_tangency_json((out_dir / "tangency.json").string(), rec);
    return 0;
  }

  if (cmd == "holder") {
    if (cfg.contains("curve_file")) {
      std::string curve_file = need(cfg, "curve_file").get<std::string>();
      double E0 = need_num(cfg, "E0");
      auto scales = num_list(need(cfg, "scales"), "scales");
      std::uint64_t seed = need_seed(cfg);
      echo["curve_file"] = curve_file;
      echo["E0"] = E0;
      echo["scales"] = scales;
      echo["seed"] = seed;
      write_echo(out_dir, echo);
      sl2lab::EnergyCurve curve = sl2lab::read_curve_csv(curve_file);
      sl2lab::HolderEstimate est = sl2lab::holder_scan(curve, E0, scales);
      sl2lab::write_holder_json((out_dir / "holder.json").string(), est);
      return 0;
    }
    sl2lab::EnergyFamily fam = parse_family(cfg, echo);
    double E0 = need_num(cfg, "E0");
    int n = need_int(cfg, "n"), samples = need_int(cfg, "samples");
    std::uint64_t seed = need_seed(cfg);
    std::vector<double> scales =
        cfg.contains("scales") ? num_list(cfg["scales"], "scales") : sl2lab::default_holder_scales();
    sl2lab::Exec ex = parse_exec(cfg, echo);
    echo["E0"] = E0;
    echo["n"] = n;
    echo["samples"] = samples;
    echo["seed"] = seed;
    echo["scales"] = scales;
    write_echo(out_dir, echo);
    sl2lab::BoundReport rep = sl2lab::bound_report(fam, E0, n, samples, seed, ex, scales);
    sl2lab::write_bound_report_json((out_dir / "holder.json").string(), rep);
    return 0;
  }

  if (cmd == "embed") {
    sl2lab::EnergyFamily fam = parse_family(cfg, echo);
    std::uint64_t seed = need_seed(cfg);
    echo["seed"] = seed;
    write_echo(out_dir, echo);
    sl2lab::write_decomposition_csv((out_dir / "decomposition.csv").string(), fam.base);
    return 0;
  }

  throw ConfigError("unknown command: " + cmd);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for random SL2 cocycles"};
  app.require_subcommand(1);

  const char* names[] = {"lyapunov", "ids", "thouless", "matchings", "tangency", "holder", "embed"};
  const char* descs[] = {"Lyapunov exponent curve over energy",
                         "finite-volume integrated density of states",
                         "both sides of the Thouless identity",
                         "delta-matching detector over sampled windows",
                         "heteroclinic tangency search",
                         "Holder exponent scan / regularity bound report",
                         "four-factor Schrodinger decompositions of the atoms"};
  std::string config_path, out_override;
  for (int i = 0; i < 7; ++i) {
    auto* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_override, "output directory (overrides config out_dir)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::string cmd = app.get_subcommands().front()->get_name();
  try {
    return run_command(cmd, config_path, out_override);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const sl2lab::CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 4;
  } catch (const sl2lab::PreconditionFailed& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const sl2lab::InvalidMeasure& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const sl2lab::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
