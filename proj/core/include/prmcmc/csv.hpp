/*
 * Copyright 2026 The prmcmc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <string>
#include <vector>

#include "prmcmc/engine.hpp"
#include "prmcmc/state_space.hpp"

namespace prmcmc {

// Shortest round-trip text for a double ("%.17g"; nan, inf, -inf).
std::string format_double(double x);
double parse_double(const std::string& text);

// A header plus rows of raw cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws if missing
  bool has_column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);
std::string to_csv_text(const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);

// Data files: t,y1[,y2][,alpha_true].
struct DataSet {
  ObservationSeries observations;
  std::vector<double> alpha_true;  // empty when the file has no such column
};

CsvTable data_table(const SimulatedData& data);
DataSet read_data(const std::string& path, std::size_t obs_dim);

CsvTable diagnostics_table(const std::vector<StepDiagnostics>& steps);
CsvTable timings_table(const std::vector<StepDiagnostics>& steps);

}  // namespace prmcmc
