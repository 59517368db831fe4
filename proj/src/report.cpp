#include "mgem/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace mgem {

std::string format_number(double v) {
  std::ostringstream s;
  s << std::setprecision(9) << v;
  return s.str();
}

CsvWriter& CsvWriter::header(const std::vector<std::string>& names) {
  for (const auto& n : names) cell(n);
  return end_row();
}

CsvWriter& CsvWriter::cell(const std::string& v) {
  if (!first_) out_ << ',';
  out_ << v;
  first_ = false;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_number(v)); }
CsvWriter& CsvWriter::cell(int v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
  return *this;
}

namespace {

std::string label(const Scenario& s, int t) {
  return t < static_cast<int>(s.horizon.labels.size()) ? s.horizon.labels[t]
                                                      : std::to_string(t + 1);
}

double column_sum(const Matrix& m, int t) { return m.rows() ? m.col(t).sum() : 0.0; }

}  // namespace

void write_schedule_csv(std::ostream& out, const Scenario& s, const Schedule& x,
                        const Vector& worst_total) {
  CsvWriter csv(out);
  std::vector<std::string> cols{"slot", "label", "P_G"};
  for (std::size_t m = 0; m < s.generators.size(); ++m) cols.push_back("P_G" + std::to_string(m + 1));
  for (const char* c : {"P_D", "P_E", "P_B", "B", "P_R", "P_tilde_R", "W_worst"}) cols.push_back(c);
  csv.header(cols);
  for (int t = 0; t < s.slots(); ++t) {
    csv.cell(t + 1).cell(label(s, t)).cell(column_sum(x.p_g, t));
    for (Index m = 0; m < x.p_g.rows(); ++m) csv.cell(x.p_g(m, t));
    csv.cell(column_sum(x.p_d, t)).cell(column_sum(x.p_e, t)).cell(column_sum(x.p_b, t))
        .cell(column_sum(x.b, t)).cell(x.p_r[t]).cell(x.p_tilde_r[t]).cell(worst_total[t]);
    csv.end_row();
  }
}

void write_storage_csv(std::ostream& out, const Scenario& s, const Schedule& x) {
  CsvWriter csv(out);
  std::vector<std::string> cols{"slot", "label"};
  for (std::size_t j = 0; j < s.storage.size(); ++j) {
    cols.push_back("P_B" + std::to_string(j + 1));
    cols.push_back("B" + std::to_string(j + 1));
  }
  csv.header(cols);
  for (int t = 0; t < s.slots(); ++t) {
    csv.cell(t + 1).cell(label(s, t));
    for (Index j = 0; j < x.p_b.rows(); ++j) csv.cell(x.p_b(j, t)).cell(x.b(j, t));
    csv.end_row();
  }
}

void write_class2_csv(std::ostream& out, const Scenario& s, const Schedule& x) {
  CsvWriter csv(out);
  std::vector<std::string> cols{"slot", "label"};
  for (std::size_t q = 0; q < s.class2.size(); ++q) cols.push_back("P_E" + std::to_string(q + 1));
  csv.header(cols);
  for (int t = 0; t < s.slots(); ++t) {
    csv.cell(t + 1).cell(label(s, t));
    for (Index q = 0; q < x.p_e.rows(); ++q) csv.cell(x.p_e(q, t));
    csv.end_row();
  }
}

void write_costs_csv(std::ostream& out, const std::vector<LabeledCost>& rows) {
  CsvWriter csv(out);
  csv.header({"schedule", "generation", "class1_utility", "class2_utility", "holding",
              "transaction", "net_cost"});
  for (const auto& r : rows) {
    csv.cell(r.label).cell(r.cost.generation).cell(r.cost.class1_utility)
        .cell(r.cost.class2_utility).cell(r.cost.holding).cell(r.cost.transaction)
        .cell(r.cost.total).end_row();
  }
}

void write_iterations_csv(std::ostream& out, const std::vector<IterationRecord>& log) {
  CsvWriter csv(out);
  csv.header({"k", "residual_balance", "residual_transform", "residual_reserve", "dual_value",
              "best_dual", "recovered_cost", "gap"});
  for (const auto& r : log) {
    csv.cell(r.k).cell(r.residual_balance).cell(r.residual_transform).cell(r.residual_reserve)
        .cell(r.dual_value).cell(r.best_dual).cell(r.recovered_cost).cell(r.gap).end_row();
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  CsvWriter csv(out);
  csv.header({"ratio", "net_cost", "generation", "class1_utility", "class2_utility", "holding",
              "transaction"});
  for (const auto& r : rows) {
    csv.cell(r.ratio).cell(r.cost.total).cell(r.cost.generation).cell(r.cost.class1_utility)
        .cell(r.cost.class2_utility).cell(r.cost.holding).cell(r.cost.transaction).end_row();
  }
}

void write_vertices_csv(std::ostream& out, const UncertaintySet& set) {
  CsvWriter csv(out);
  Index width = 0;
  for (const auto& b : set.blocks) width = std::max(width, b.vertices.dimension);
  std::vector<std::string> cols{"block", "first_slot", "last_slot"};
  for (Index i = 0; i < width; ++i) cols.push_back("w" + std::to_string(i + 1));
  csv.header(cols);
  for (std::size_t b = 0; b < set.blocks.size(); ++b) {
    const auto& blk = set.blocks[b];
    for (Index k = 0; k < blk.vertices.size(); ++k) {
      csv.cell(static_cast<int>(b + 1)).cell(blk.first_slot + 1).cell(blk.last_slot + 1);
      for (Index i = 0; i < blk.vertices.dimension; ++i) csv.cell(blk.vertices.points(k, i));
      csv.end_row();
    }
  }
}

void write_certify_csv(std::ostream& out, const CertifyReport& rep) {
  CsvWriter csv(out);
  csv.header({"distributed_objective", "oracle_objective", "relative_gap", "dev_P_G", "dev_P_D",
              "dev_P_E", "dev_P_B", "dev_P_R", "dev_P_tilde_R", "passed"});
  csv.cell(rep.distributed_objective).cell(rep.oracle_objective).cell(rep.relative_gap)
      .cell(rep.dev_p_g).cell(rep.dev_p_d).cell(rep.dev_p_e).cell(rep.dev_p_b).cell(rep.dev_p_r)
      .cell(rep.dev_p_tilde_r).cell(std::string(rep.passed ? "true" : "false")).end_row();
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  return out;
}

}  // namespace mgem
