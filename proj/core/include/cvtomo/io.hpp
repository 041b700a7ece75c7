#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "cvtomo/estimator.hpp"
#include "cvtomo/experiments.hpp"
#include "cvtomo/padua.hpp"
#include "cvtomo/polar.hpp"
#include "cvtomo/states.hpp"

namespace cvtomo::io {

using json = nlohmann::json;

/// Malformed or inconsistent file content.
class SchemaError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Unreadable or unwritable file.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& doc);

// State specs: {"type":"pure","amplitudes":[[re,im],...]} or
// {"type":"mixed","matrix":[[[re,im],...],...]}.
DensityMatrix state_from_json(const json& doc);
json state_to_json(const FockState& state);
json state_to_json(const DensityMatrix& rho);
DensityMatrix read_state(const std::filesystem::path& path);

json grid_to_json(const PhaseGrid& grid);
json record_to_json(const MeasurementRecord& record);
/// Rebuilds the grid from the stored points, checking them against the
/// declared kind.
MeasurementRecord record_from_json(const json& doc);

/// .csv paths write `x,y,value` plus a `<path>.json` metadata sidecar;
/// anything else is a single JSON document.
void write_record(const std::filesystem::path& path, const MeasurementRecord& record);
MeasurementRecord read_record(const std::filesystem::path& path);

json cheb_to_json(const ChebCoeffs& coeffs);
ChebCoeffs cheb_from_json(const json& doc);
std::string dense_grid_csv(const DenseGrid& grid);

/// Lists entries with |c| > 1e-14.
json polar_to_json(const PolarPoly& poly);

json estimates_to_json(const EstimateTable& table);

StudyConfig config_from_json(const json& doc);
json config_to_json(const StudyConfig& config);
json study_to_json(const StudyResult& result);
/// `n,N,epsilon,j,k,mean_re,mean_im,sigma,delta_rel` rows of one series.
std::string study_csv(const StudyResult& result, const std::string& series = "padua");

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace cvtomo::io
