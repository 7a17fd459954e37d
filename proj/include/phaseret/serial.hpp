#pragma once

#include <string>

#include "phaseret/design.hpp"
#include "phaseret/harness.hpp"
#include "phaseret/types.hpp"

namespace phaseret {

// Shortest round-trip decimal form (std::to_chars); the byte-determinism of
// every emitted file rests on this.
std::string format_double(double value);

// Layout: {"m","n","budget","label","entries":[[re,im],...]} row-major;
// doubles survive the round trip bit-exactly.
std::string matrix_to_json(const MeasurementMatrix& matrix);
MeasurementMatrix matrix_from_json(const std::string& text);
void save_matrix(const MeasurementMatrix& matrix, const std::string& path);
MeasurementMatrix load_matrix(const std::string& path);

ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig config_from_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace phaseret
