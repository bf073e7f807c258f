#pragma once

#include <string>

#include "sl2lab/matching.hpp"
#include "sl2lab/regularity.hpp"

namespace sl2lab {

// 17 significant digits, '.' decimal, locale-independent
std::string fmt17(double v);

void write_text(const std::string& path, const std::string& body);

void write_energy_curve_csv(const std::string& path, const EnergyCurve& c);
void write_ids_csv(const std::string& path, const IdsCurve& c);
EnergyCurve read_curve_csv(const std::string& path);

void write_thouless_csv(const std::string& path, const ThoulessReport& r, double E, int n,
                        int samples, std::uint64_t seed);

// one row per atom: atom_index, t0, t1, t2, t3, residual
void write_decomposition_csv(const std::string& path, const FiniteMeasure& mu);

// JSON lines, one record per line, schema versioned with "v"
void write_matching_records(const std::string& path, const MatchingSearch& s);
void write_matching_summary(const std::string& path, const MatchingSearch& s, int k, double delta,
                            double I_lo, double I_hi);

void write_tangency_json(const std::string& path, const TangencyRecord& rec);
void write_holder_json(const std::string& path, const HolderEstimate& est);
void write_bound_report_json(const std::string& path, const BoundReport& rep);

}  // namespace sl2lab
