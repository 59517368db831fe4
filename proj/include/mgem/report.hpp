#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "mgem/oracle.hpp"

namespace mgem {

/// Header row then data rows; numbers use 9 significant digits.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  CsvWriter& header(const std::vector<std::string>& names);
  CsvWriter& cell(const std::string& v);
  CsvWriter& cell(double v);
  CsvWriter& cell(int v);
  CsvWriter& end_row();

 private:
  std::ostream& out_;
  bool first_ = true;
};

std::string format_number(double v);

void write_schedule_csv(std::ostream& out, const Scenario& s, const Schedule& x,
                        const Vector& worst_total);
void write_storage_csv(std::ostream& out, const Scenario& s, const Schedule& x);
void write_class2_csv(std::ostream& out, const Scenario& s, const Schedule& x);

struct LabeledCost {
  std::string label;
  CostBreakdown cost;
};
void write_costs_csv(std::ostream& out, const std::vector<LabeledCost>& rows);
void write_iterations_csv(std::ostream& out, const std::vector<IterationRecord>& log);

struct SweepRow {
  double ratio = 0.0;
  CostBreakdown cost;
};
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_vertices_csv(std::ostream& out, const UncertaintySet& set);
void write_certify_csv(std::ostream& out, const CertifyReport& rep);

/// Opens `dir / name` for writing, creating `dir` when needed.
std::ofstream open_output(const std::filesystem::path& dir, const std::string& name);

}  // namespace mgem
