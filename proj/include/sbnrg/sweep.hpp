#pragma once

#include "sbnrg/solver.hpp"

#include <json.hpp>

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sbnrg {

inline constexpr const char *kSolverVersion = "1.0.0";

inline constexpr const char *kCsvHeader =
    "alpha,eps_over_delta,delta_ratio,lambda,n_keep,n_m,converged,sx,sz,entropy,"
    "p_plus,p_minus,delta_r";

enum class Format { Csv, Json };

Format parse_format(const std::string &tag);

struct SweepSpec {
  std::vector<double> alphas;
  std::vector<double> epsilons; // eps / Delta
  std::vector<double> delta_ratios;
  std::string output = "-";
  Format format = Format::Csv;

  /// Throws DomainError for an empty axis or a point outside the supported domain.
  void validate() const;
};

/// "0.1,0.2,0.5" or an inclusive range "start:stop:step".
std::vector<double> parse_axis(const std::string &text);

/// Figure presets: fig1, fig2, fig3.
SweepSpec preset(const std::string &name);

struct SweepRow {
  SpinBosonPoint point;
  std::optional<ObservableRecord> record;
  std::string error; // set when the point failed
};

/// Evaluates every grid point on up to `jobs` threads. Rows come back sorted
/// by (delta_ratio, eps/Delta, alpha).
std::vector<SweepRow> run_sweep(const SweepSpec &spec, const NRGConfig &cfg, unsigned jobs = 1);

std::string format_number(double x);

void write_csv(std::ostream &os, const std::vector<SweepRow> &rows);
nlohmann::json to_json(const std::vector<SweepRow> &rows, const NRGConfig &cfg);
std::vector<SweepRow> rows_from_json(const nlohmann::json &doc);

/// Writes to `path`, or stdout for "-". Throws IoError when the file cannot be written.
void write_output(const std::vector<SweepRow> &rows, const NRGConfig &cfg, Format format,
                  const std::string &path);

nlohmann::json config_to_json(const NRGConfig &cfg);

/// Parses `key = value` lines ('#' starts a comment).
std::map<std::string, std::string> read_config_file(const std::string &path);
/// Applies recognised keys to `cfg`; throws DomainError on an unknown key or bad value.
void apply_config(const std::map<std::string, std::string> &entries, NRGConfig &cfg);

} // namespace sbnrg
