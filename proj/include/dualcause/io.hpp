#pragma once

// CSV data files and JSON documents for models, estimates and regions.
//
// Data CSV: one observation per row, d numeric columns, comma separated,
// optional header row. Numbers are written with 17 significant digits so that
// they round-trip exactly.

#include "dualcause/confidence.hpp"
#include "dualcause/dualml.hpp"
#include "dualcause/matrix.hpp"
#include "dualcause/scm.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

namespace dualcause {

std::string format_double(double v);

SampleMatrix read_csv(std::istream& in);
SampleMatrix read_csv_file(const std::filesystem::path& path);
void write_csv(std::ostream& out, const SampleMatrix& data, bool header = true);

nlohmann::json to_json(const RegimeTag& r);
RegimeTag regime_from_json(const nlohmann::json& j);

nlohmann::json to_json(const HypothesisClass& c);

// {d, order, weights, variances, regime}
nlohmann::json to_json(const LinearScm& scm);
LinearScm scm_from_json(const nlohmann::json& j);

// {regime, i, j, n, values, classes, optimum}
nlohmann::json to_json(const EffectEstimate& e);

// {alpha, n, regime, intervals, zero_atom}
nlohmann::json to_json(const ConfidenceRegion& r);

}  // namespace dualcause
