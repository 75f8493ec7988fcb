#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "mfduopoly/errors.hpp"
#include "mfduopoly/model.hpp"
#include "numeric.hpp"

namespace mfd {

namespace {

constexpr double kWeightSumTol = 1e-12;
constexpr double kCsvWeightSumTol = 1e-6;

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

void validate_atoms(const std::vector<Atom>& atoms) {
  if (atoms.empty()) throw InputError("atomic distribution needs at least one atom");
  for (const Atom& a : atoms) {
    detail::require_unit(a.value, "atom value");
    detail::require_positive(a.weight, "atom weight");
  }
}

double weight_sum(const std::vector<Atom>& atoms) {
  double s = 0.0;
  for (const Atom& a : atoms) s += a.weight;
  return s;
}

}  // namespace

InitialDistribution InitialDistribution::mean_only(double mean) {
  detail::require_unit(mean, "initial mean");
  return InitialDistribution(MeanOnly{mean});
}

InitialDistribution InitialDistribution::atoms(std::vector<Atom> atoms) {
  validate_atoms(atoms);
  const double s = weight_sum(atoms);
  if (std::abs(s - 1.0) > kWeightSumTol) {
    std::ostringstream os;
    os.precision(17);
    os << "atom weights sum to " << s << ", expected 1";
    throw InputError(os.str());
  }
  return InitialDistribution(std::move(atoms));
}

InitialDistribution InitialDistribution::point_mass(double value) {
  return atoms({Atom{value, 1.0}});
}

InitialDistribution InitialDistribution::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open distribution file");

  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": empty file");
  if (trim(line) != "value,weight") {
    throw InputError(path.string() + ": expected header `value,weight`");
  }

  std::vector<Atom> atoms;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    Atom a;
    if (comma == std::string_view::npos || !parse_double(row.substr(0, comma), a.value) ||
        !parse_double(row.substr(comma + 1), a.weight)) {
      throw InputError(path.string() + ":" + std::to_string(lineno) +
                       ": expected `value,weight`");
    }
    atoms.push_back(a);
  }
  validate_atoms(atoms);

  const double s = weight_sum(atoms);
  if (std::abs(s - 1.0) > kCsvWeightSumTol) {
    std::ostringstream os;
    os << path.string() << ": weights sum to " << s << ", not within "
       << kCsvWeightSumTol << " of 1";
    throw InputError(os.str());
  }
  for (Atom& a : atoms) a.weight /= s;
  return InitialDistribution(std::move(atoms));
}

bool InitialDistribution::is_mean_only() const {
  return std::holds_alternative<MeanOnly>(data_);
}

double InitialDistribution::mean() const {
  if (const auto* m = std::get_if<MeanOnly>(&data_)) return m->mean;
  double acc = 0.0;
  for (const Atom& a : std::get<std::vector<Atom>>(data_)) acc += a.weight * a.value;
  return detail::clip01(acc);
}

std::span<const Atom> InitialDistribution::atoms() const {
  if (is_mean_only()) {
    throw UnsupportedDistributionError("distribution only specifies its mean");
  }
  return std::get<std::vector<Atom>>(data_);
}

std::vector<Atom> InitialDistribution::support() const {
  if (const auto* m = std::get_if<MeanOnly>(&data_)) return {Atom{m->mean, 1.0}};
  return std::get<std::vector<Atom>>(data_);
}

InitialDistribution InitialDistribution::reflected() const {
  if (const auto* m = std::get_if<MeanOnly>(&data_)) {
    return InitialDistribution(MeanOnly{1.0 - m->mean});
  }
  std::vector<Atom> out = std::get<std::vector<Atom>>(data_);
  for (Atom& a : out) a.value = 1.0 - a.value;
  return InitialDistribution(std::move(out));
}

}  // namespace mfd
