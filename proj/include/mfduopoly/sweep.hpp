#pragma once

// Grid runs over (c, u0_mean), the NE vs MLF-NE comparison, and their CSV forms.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mfduopoly/model.hpp"
#include "mfduopoly/ne_solver.hpp"

namespace mfd {

struct SweepSpec {
  std::vector<double> c_values;
  std::vector<double> u0_means;
  std::vector<EquilibriumKind> kinds{EquilibriumKind::NE, EquilibriumKind::MLFNE};
  double tol = kDefaultSolveTol;
  bool include_costs = true;
  double alpha = 0.0;

  /// Throws InputError on empty lists, out-of-range values or duplicate kinds.
  void validate() const;
};

struct SweepRow {
  EquilibriumKind kind = EquilibriumKind::NE;
  double c = 0.0;
  double u0_mean = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
  double mu_bar = 0.0;
  double cost1 = 0.0;
  double cost2 = 0.0;
  double residual = 0.0;
  std::string error;  // nonempty when the solve failed; numeric fields are NaN

  bool ok() const { return error.empty(); }
};

struct ComparisonRow {
  double c = 0.0;
  double u0_mean = 0.0;
  double du1 = 0.0;  // NE minus MLF-NE
  double du2 = 0.0;
  double dcost1 = 0.0;
  double dcost2 = 0.0;
  double dmu = 0.0;
  bool leader_flip = false;
};

using ComparisonSummary = std::vector<ComparisonRow>;

/// Log grid 10^(k/10) from 0.01 to 10 (31 values; contains 0.01, 0.1, 1, 10).
std::vector<double> default_c_grid();
/// 0, 0.1, ..., 1.
std::vector<double> default_u0_grid();

/// Parses "a,b,c" or a range "lo:hi:n" (n evenly spaced values) or
/// "log:lo:hi:n" (n log-spaced values). Throws InputError.
std::vector<double> parse_value_list(std::string_view text);
/// Parses "ne,mlfne" (case-insensitive).
std::vector<EquilibriumKind> parse_kind_list(std::string_view text);

/// One row per (kind, c, u0_mean), ordered by kind, then c, then u0_mean.
/// A failed solve is recorded in its row and the run continues.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// Pairs NE and MLF-NE rows by (c, u0_mean). Throws InputError on unpaired or
/// duplicated rows. Output ordered by (c, u0_mean).
ComparisonSummary compare_report(const std::vector<SweepRow>& rows);

std::string rows_to_csv(const std::vector<SweepRow>& rows);
std::string summary_to_csv(const ComparisonSummary& summary);
std::vector<SweepRow> parse_rows_csv(std::string_view text);
ComparisonSummary parse_summary_csv(std::string_view text);

void write_rows_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);
void write_summary_csv(const ComparisonSummary& summary, const std::filesystem::path& path);
std::vector<SweepRow> read_rows_csv(const std::filesystem::path& path);

}  // namespace mfd
