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

#include "prmcmc/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "prmcmc/errors.hpp"

namespace prmcmc {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  std::size_t used = 0;
  const double x = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("not a number: '" + text + "'");
  return x;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::invalid_argument("CSV has no column '" + name + "'");
}

bool CsvTable::has_column(const std::string& name) const {
  for (const auto& h : header) {
    if (h == name) return true;
  }
  return false;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::stringstream ss(text);
  std::string line;
  bool first = true;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != table.header.size()) {
        throw std::invalid_argument("CSV row has " + std::to_string(cells.size()) +
                                    " cells, header has " + std::to_string(table.header.size()));
      }
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

std::string to_csv_text(const CsvTable& table) {
  std::string out;
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  emit(table.header);
  for (const auto& row : table.rows) emit(row);
  return out;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_csv_text(table);
  if (!out) throw std::runtime_error("write failed for " + path);
}

CsvTable data_table(const SimulatedData& data) {
  const ObservationSeries& y = data.observations;
  CsvTable table;
  table.header = {"t", "y1"};
  if (y.dim() == 2) table.header.push_back("y2");
  table.header.push_back("alpha_true");
  for (TimeIndex t = 1; t <= y.length(); ++t) {
    std::vector<std::string> row{std::to_string(t)};
    for (double v : y.at(t)) row.push_back(format_double(v));
    row.push_back(format_double(data.states.at(t)[0]));
    table.rows.push_back(std::move(row));
  }
  return table;
}

DataSet read_data(const std::string& path, std::size_t obs_dim) {
  const CsvTable table = read_csv(path);
  std::vector<std::size_t> cols{table.column("y1")};
  if (obs_dim == 2) cols.push_back(table.column("y2"));
  if (obs_dim > 2) throw ConfigError("unsupported observation dimension");
  DataSet data;
  std::vector<double> values;
  values.reserve(table.rows.size() * obs_dim);
  const bool has_alpha = table.has_column("alpha_true");
  const std::size_t alpha_col = has_alpha ? table.column("alpha_true") : 0;
  for (const auto& row : table.rows) {
    for (std::size_t c : cols) values.push_back(parse_double(row[c]));
    if (has_alpha) data.alpha_true.push_back(parse_double(row[alpha_col]));
  }
  data.observations = ObservationSeries(obs_dim, std::move(values));
  return data;
}

CsvTable diagnostics_table(const std::vector<StepDiagnostics>& steps) {
  CsvTable table;
  table.header = {"stage",      "s",          "t",          "block",           "ess_start",
                  "ess_add",    "ess_remove", "r1",         "r2",              "resampled_add",
                  "resampled_remove", "log_ml_add", "log_ml_remove", "log_ml", "zero_add",
                  "zero_remove"};
  for (const StepDiagnostics& d : steps) {
    table.rows.push_back({d.stage, std::to_string(d.s), std::to_string(d.t), std::to_string(d.block),
                          format_double(d.ess_start), format_double(d.ess_add),
                          format_double(d.ess_remove), format_double(d.r1), format_double(d.r2),
                          d.resampled_add ? "1" : "0", d.resampled_remove ? "1" : "0",
                          format_double(d.log_ml_add), format_double(d.log_ml_remove),
                          format_double(d.log_ml), std::to_string(d.zero_add),
                          std::to_string(d.zero_remove)});
  }
  return table;
}

CsvTable timings_table(const std::vector<StepDiagnostics>& steps) {
  CsvTable table;
  table.header = {"stage", "s", "t", "seconds"};
  for (const StepDiagnostics& d : steps) {
    table.rows.push_back({d.stage, std::to_string(d.s), std::to_string(d.t), format_double(d.seconds)});
  }
  return table;
}

}  // namespace prmcmc
