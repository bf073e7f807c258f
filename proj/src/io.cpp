#include "sl2lab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sl2lab {

using ordered_json = nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << body;
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

ordered_json json_number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(trim(tok));
  return out;
}

}  // namespace

void write_energy_curve_csv(const std::string& path, const EnergyCurve& c) {
  std::string body = "energy, " + c.kind + ", stderr, n, samples, seed\n";
  for (std::size_t i = 0; i < c.energies.size(); ++i) {
    double se = i < c.value_stderr.size() ? c.value_stderr[i] : 0.0;
    body += fmt17(c.energies[i]) + ", " + fmt17(c.values[i]) + ", " + fmt17(se) + ", " +
            std::to_string(c.n) + ", " + std::to_string(c.samples) + ", " +
            std::to_string(c.seed) + "\n";
  }
  write_text(path, body);
}

void write_ids_csv(const std::string& path, const IdsCurve& c) {
  std::string body = "energy, ids, n, samples, seed\n";
  for (std::size_t i = 0; i < c.energies.size(); ++i) {
    body += fmt17(c.energies[i]) + ", " + fmt17(c.values[i]) + ", " + std::to_string(c.n) + ", " +
            std::to_string(c.samples) + ", " + std::to_string(c.seed) + "\n";
  }
  write_text(path, body);
}

EnergyCurve read_curve_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open curve file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty curve file: " + path);
  auto header = split_csv(line);
  if (header.size() < 2 || header[0] != "energy")
    throw std::runtime_error("unrecognized curve header in " + path);

  EnergyCurve c;
  c.kind = header[1];
  int se_col = -1, n_col = -1, samples_col = -1, seed_col = -1;
  for (std::size_t i = 2; i < header.size(); ++i) {
    if (header[i] == "stderr") se_col = int(i);
    else if (header[i] == "n") n_col = int(i);
    else if (header[i] == "samples") samples_col = int(i);
    else if (header[i] == "seed") seed_col = int(i);
  }

  bool first = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto tok = split_csv(line);
    if (tok.size() < 2) throw std::runtime_error("short row in " + path);
    c.energies.push_back(std::stod(tok[0]));
    c.values.push_back(std::stod(tok[1]));
    if (se_col >= 0 && se_col < int(tok.size())) c.value_stderr.push_back(std::stod(tok[se_col]));
    if (first) {
      if (n_col >= 0 && n_col < int(tok.size())) c.n = std::stoi(tok[n_col]);
      if (samples_col >= 0 && samples_col < int(tok.size())) c.samples = std::stoi(tok[samples_col]);
      if (seed_col >= 0 && seed_col < int(tok.size())) c.seed = std::stoull(tok[seed_col]);
      first = false;
    }
  }
  if (c.energies.empty()) throw std::runtime_error("curve file has no rows: " + path);
  return c;
}

void write_thouless_csv(const std::string& path, const ThoulessReport& r, double E, int n,
                        int samples, std::uint64_t seed) {
  std::string body =
      "E, L_transfer, L_thouless, gap, transfer_stderr, thouless_stderr, n, samples, seed\n";
  body += fmt17(E) + ", " + fmt17(r.L_transfer) + ", " + fmt17(r.L_thouless) + ", " +
          fmt17(r.gap) + ", " + fmt17(r.transfer_stderr) + ", " + fmt17(r.thouless_stderr) + ", " +
          std::to_string(n) + ", " + std::to_string(samples) + ", " + std::to_string(seed) + "\n";
  write_text(path, body);
}

void write_decomposition_csv(const std::string& path, const FiniteMeasure& mu) {
  std::string body = "atom_index, t0, t1, t2, t3, residual\n";
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
    SchrodingerDecomposition d = decompose(mu.atoms[i]);
    body += std::to_string(i) + ", " + fmt17(d.t[0]) + ", " + fmt17(d.t[1]) + ", " +
            fmt17(d.t[2]) + ", " + fmt17(d.t[3]) + ", " + fmt17(d.residual) + "\n";
  }
  write_text(path, body);
}

void write_matching_records(const std::string& path, const MatchingSearch& s) {
  std::string body;
  for (const auto& r : s.records) {
    ordered_json j;
    j["v"] = 1;
    j["word"] = r.word;
    j["phi"] = r.phi;
    j["E"] = r.E;
    j["tau"] = r.tau;
    body += j.dump() + "\n";
  }
  write_text(path, body);
}

void write_matching_summary(const std::string& path, const MatchingSearch& s, int k, double delta,
                            double I_lo, double I_hi) {
  ordered_json j;
  j["v"] = 1;
  j["k"] = k;
  j["delta"] = delta;
  j["interval"] = {I_lo, I_hi};
  j["samples"] = s.samples;
  j["hits"] = s.hits;
  j["measure_estimate"] = s.measure_estimate;
  j["stderr"] = s.stderr_;
  j["records"] = s.records.size();
  write_text(path, j.dump(2) + "\n");
}

void write_tangency_json(const std::string& path, const TangencyRecord& rec) {
  ordered_json j;
  j["v"] = 1;
  j["E"] = rec.E;
  j["residual"] = rec.residual;
  j["gamma"] = rec.gamma;
  j["rho"] = rec.rho;
  j["t"] = json_number(rec.t);
  j["source_word"] = rec.source_word;
  j["transition_word"] = rec.transition_word;
  j["target_word"] = rec.target_word;
  write_text(path, j.dump(2) + "\n");
}

void write_holder_json(const std::string& path, const HolderEstimate& est) {
  ordered_json j;
  j["v"] = 1;
  j["E0"] = est.E0;
  j["scales"] = est.scales;
  j["oscillations"] = est.oscillations;
  j["alpha_hat"] = json_number(est.alpha_hat);
  j["fit_r2"] = json_number(est.fit_r2);
  write_text(path, j.dump(2) + "\n");
}

void write_bound_report_json(const std::string& path, const BoundReport& rep) {
  ordered_json j;
  j["v"] = 1;
  j["H"] = rep.H;
  j["L"] = rep.L;
  j["L_stderr"] = rep.L_stderr;
  j["ratio"] = rep.ratio;
  j["alpha_hat"] = json_number(rep.alpha_hat);
  j["fit_r2"] = json_number(rep.fit_r2);
  j["insufficient_signal"] = rep.insufficient_signal;
  j["verdict"] = rep.verdict;
  write_text(path, j.dump(2) + "\n");
}

}  // namespace sl2lab
