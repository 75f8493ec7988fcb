#include "mfduopoly/sweep.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "mfduopoly/errors.hpp"
#include "mfduopoly/mlfne_solver.hpp"

namespace mfd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kRowsHeader = "kind,c,u0_mean,u1,u2,mu_bar,cost1,cost2,residual";
constexpr const char* kSummaryHeader = "c,u0_mean,du1,du2,dcost1,dcost2,dmu,leader_flip";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// strtod rather than from_chars so "nan" and "-nan" written by printf read back.
double parse_double(std::string_view s, const char* what) {
  const std::string buf(trim(s));
  if (buf.empty()) throw InputError(std::string("empty value for ") + what);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || errno == ERANGE) {
    throw InputError(std::string("cannot parse ") + what + " from '" + buf + "'");
  }
  return v;
}

int parse_count(std::string_view s) {
  const double v = parse_double(s, "count");
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e6) {
    throw InputError("range count must be a positive integer");
  }
  return static_cast<int>(v);
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

EquilibriumKind kind_from(std::string_view s) {
  const auto k = parse_kind(lower(trim(s)));
  if (!k) throw InputError("unknown equilibrium kind '" + std::string(s) + "'");
  return *k;
}

std::vector<std::string_view> csv_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::string_view line : split(text, '\n')) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

void expect_header(const std::vector<std::string_view>& lines, const char* header) {
  if (lines.empty() || lines.front() != header) {
    throw InputError(std::string("expected CSV header '") + header + "'");
  }
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

SweepRow solve_row(EquilibriumKind kind, double c, double u0, const SweepSpec& spec) {
  SweepRow row;
  row.kind = kind;
  row.c = c;
  row.u0_mean = u0;
  try {
    const ModelParams p = ModelParams::with_cost(c, spec.alpha);
    const InitialDistribution dist = InitialDistribution::mean_only(u0);
    const Equilibrium eq = kind == EquilibriumKind::NE ? solve_ne(p, dist, spec.tol)
                                                       : solve_mlfne(p, dist, spec.tol);
    row.u1 = eq.u1;
    row.u2 = eq.u2;
    row.mu_bar = eq.mu_bar;
    row.residual = eq.max_residual();
    if (spec.include_costs) {
      row.cost1 = major_cost(Firm::One, eq.u1, eq.u2, eq.mu_bar, p);
      row.cost2 = major_cost(Firm::Two, eq.u2, eq.u1, eq.mu_bar, p);
    } else {
      row.cost1 = row.cost2 = kNaN;
    }
  } catch (const Error& e) {
    row.u1 = row.u2 = row.mu_bar = row.cost1 = row.cost2 = row.residual = kNaN;
    row.error = e.what();
    if (row.error.empty()) row.error = "solve failed";
  }
  return row;
}

}  // namespace

void SweepSpec::validate() const {
  if (c_values.empty()) throw InputError("sweep needs at least one c value");
  if (u0_means.empty()) throw InputError("sweep needs at least one u0_mean value");
  if (kinds.empty()) throw InputError("sweep needs at least one kind");
  for (double c : c_values) {
    if (!std::isfinite(c) || !(c >= kMinCost)) {
      throw InputError("c = " + format_real(c) + " must be finite and >= " +
                       format_real(kMinCost));
    }
  }
  for (double u : u0_means) {
    if (!std::isfinite(u) || u < 0.0 || u > 1.0) {
      throw InputError("u0_mean = " + format_real(u) + " outside [0,1]");
    }
  }
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    for (std::size_t j = i + 1; j < kinds.size(); ++j) {
      if (kinds[i] == kinds[j]) throw InputError("duplicate kind in sweep");
    }
  }
  if (!std::isfinite(tol) || !(tol > 0.0)) throw InputError("tol must be positive");
  if (!std::isfinite(alpha)) throw InputError("alpha must be finite");
}

std::vector<double> default_c_grid() {
  std::vector<double> out;
  for (int k = -20; k <= 10; ++k) out.push_back(std::pow(10.0, k / 10.0));
  return out;
}

std::vector<double> default_u0_grid() {
  std::vector<double> out;
  for (int k = 0; k <= 10; ++k) out.push_back(k / 10.0);
  return out;
}

std::vector<double> parse_value_list(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw InputError("empty value list");
  if (text.find(':') == std::string_view::npos) {
    std::vector<double> out;
    for (std::string_view item : split(text, ',')) out.push_back(parse_double(item, "value"));
    return out;
  }

  auto parts = split(text, ':');
  bool log_scale = false;
  if (!parts.empty() && lower(parts.front()) == "log") {
    log_scale = true;
    parts.erase(parts.begin());
  }
  if (parts.size() != 3) throw InputError("range must be lo:hi:n or log:lo:hi:n");
  const double lo = parse_double(parts[0], "range start");
  const double hi = parse_double(parts[1], "range end");
  const int n = parse_count(parts[2]);
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw InputError("range ends must be finite");
  if (log_scale && !(lo > 0.0 && hi > 0.0)) throw InputError("log range needs positive ends");

  std::vector<double> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (n == 1) {
      out.push_back(lo);
    } else if (i == n - 1) {
      out.push_back(hi);
    } else {
      const double t = static_cast<double>(i) / (n - 1);
      out.push_back(log_scale ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                              : lo + t * (hi - lo));
    }
  }
  return out;
}

std::vector<EquilibriumKind> parse_kind_list(std::string_view text) {
  std::vector<EquilibriumKind> out;
  for (std::string_view item : split(trim(text), ',')) {
    const EquilibriumKind k = kind_from(item);
    if (std::find(out.begin(), out.end(), k) != out.end()) {
      throw InputError("duplicate kind '" + std::string(item) + "'");
    }
    out.push_back(k);
  }
  return out;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<EquilibriumKind> kinds = spec.kinds;
  std::sort(kinds.begin(), kinds.end());
  std::vector<double> cs = spec.c_values;
  std::vector<double> us = spec.u0_means;
  std::sort(cs.begin(), cs.end());
  std::sort(us.begin(), us.end());

  std::vector<SweepRow> rows;
  rows.reserve(kinds.size() * cs.size() * us.size());
  for (EquilibriumKind k : kinds) {
    for (double c : cs) {
      for (double u : us) rows.push_back(solve_row(k, c, u, spec));
    }
  }
  return rows;
}

ComparisonSummary compare_report(const std::vector<SweepRow>& rows) {
  std::map<std::pair<double, double>, std::pair<const SweepRow*, const SweepRow*>> pairs;
  for (const SweepRow& r : rows) {
    auto& slot = pairs[{r.c, r.u0_mean}];
    const SweepRow*& target = r.kind == EquilibriumKind::NE ? slot.first : slot.second;
    if (target) {
      throw InputError("duplicate " + std::string(to_string(r.kind)) + " row at c=" +
                       format_real(r.c) + ", u0_mean=" + format_real(r.u0_mean));
    }
    target = &r;
  }

  ComparisonSummary out;
  out.reserve(pairs.size());
  for (const auto& [key, pr] : pairs) {
    if (!pr.first || !pr.second) {
      throw InputError(std::string("unpaired row at c=") + format_real(key.first) +
                       ", u0_mean=" + format_real(key.second) + " (missing " +
                       (pr.first ? "MLFNE" : "NE") + ")");
    }
    const SweepRow& ne = *pr.first;
    const SweepRow& ml = *pr.second;
    ComparisonRow cr;
    cr.c = key.first;
    cr.u0_mean = key.second;
    cr.du1 = ne.u1 - ml.u1;
    cr.du2 = ne.u2 - ml.u2;
    cr.dcost1 = ne.cost1 - ml.cost1;
    cr.dcost2 = ne.cost2 - ml.cost2;
    cr.dmu = ne.mu_bar - ml.mu_bar;
    cr.leader_flip = (cr.u0_mean < 0.5 && ml.mu_bar > 0.5) ||
                     (cr.u0_mean > 0.5 && ml.mu_bar < 0.5);
    out.push_back(cr);
  }
  return out;
}

std::string rows_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = kRowsHeader;
  out += '\n';
  for (const SweepRow& r : rows) {
    out += to_string(r.kind);
    for (double v : {r.c, r.u0_mean, r.u1, r.u2, r.mu_bar, r.cost1, r.cost2, r.residual}) {
      out += ',';
      out += format_real(v);
    }
    out += '\n';
  }
  return out;
}

std::string summary_to_csv(const ComparisonSummary& summary) {
  std::string out = kSummaryHeader;
  out += '\n';
  for (const ComparisonRow& r : summary) {
    for (double v : {r.c, r.u0_mean, r.du1, r.du2, r.dcost1, r.dcost2, r.dmu}) {
      out += format_real(v);
      out += ',';
    }
    out += r.leader_flip ? "true" : "false";
    out += '\n';
  }
  return out;
}

std::vector<SweepRow> parse_rows_csv(std::string_view text) {
  const auto lines = csv_lines(text);
  expect_header(lines, kRowsHeader);
  std::vector<SweepRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != 9) {
      throw InputError("line " + std::to_string(i + 1) + ": expected 9 fields, got " +
                       std::to_string(f.size()));
    }
    SweepRow r;
    r.kind = kind_from(f[0]);
    double* slots[] = {&r.c, &r.u0_mean, &r.u1, &r.u2, &r.mu_bar,
                       &r.cost1, &r.cost2, &r.residual};
    for (std::size_t k = 0; k < 8; ++k) *slots[k] = parse_double(f[k + 1], "field");
    if (!std::isfinite(r.c) || !std::isfinite(r.u0_mean)) {
      throw InputError("line " + std::to_string(i + 1) + ": c and u0_mean must be finite");
    }
    if (std::isnan(r.u1)) r.error = "solve failed";
    rows.push_back(std::move(r));
  }
  return rows;
}

ComparisonSummary parse_summary_csv(std::string_view text) {
  const auto lines = csv_lines(text);
  expect_header(lines, kSummaryHeader);
  ComparisonSummary out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != 8) {
      throw InputError("line " + std::to_string(i + 1) + ": expected 8 fields");
    }
    ComparisonRow r;
    double* slots[] = {&r.c, &r.u0_mean, &r.du1, &r.du2, &r.dcost1, &r.dcost2, &r.dmu};
    for (std::size_t k = 0; k < 7; ++k) *slots[k] = parse_double(f[k], "field");
    if (f[7] == "true") {
      r.leader_flip = true;
    } else if (f[7] != "false") {
      throw InputError("line " + std::to_string(i + 1) + ": leader_flip must be true/false");
    }
    out.push_back(r);
  }
  return out;
}

void write_rows_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  write_text(rows_to_csv(rows), path);
}

void write_summary_csv(const ComparisonSummary& summary, const std::filesystem::path& path) {
  write_text(summary_to_csv(summary), path);
}

std::vector<SweepRow> read_rows_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_rows_csv(ss.str());
}

}  // namespace mfd
