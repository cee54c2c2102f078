#include "sbnrg/sweep.hpp"

#include "sbnrg/errors.hpp"
#include "sbnrg/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <tuple>

namespace sbnrg {

using nlohmann::json;

Format parse_format(const std::string &tag) {
  if (tag == "csv") return Format::Csv;
  if (tag == "json") return Format::Json;
  throw DomainError("unknown output format '" + tag + "' (expected csv or json)");
}

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string &text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception &) {
    throw DomainError("not a number: '" + t + "'");
  }
  if (used != t.size()) throw DomainError("not a number: '" + t + "'");
  return v;
}

// Grid values are rounded to 12 decimals so that 0.1 + 2 * 0.05 prints as 0.2.
double snap(double x) { return std::round(x * 1e12) / 1e12; }

std::vector<double> range(double start, double stop, double step) {
  if (!(step > 0.0) || stop < start)
    throw DomainError("range needs step > 0 and stop >= start");
  const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (long i = 0; i < count; ++i) out.push_back(snap(start + i * step));
  return out;
}

} // namespace

std::vector<double> parse_axis(const std::string &text) {
  const std::string t = trim(text);
  if (t.empty()) throw DomainError("empty axis");
  if (t.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(parse_double(item));
    if (parts.size() != 3) throw DomainError("range axis must be start:stop:step, got '" + t + "'");
    return range(parts[0], parts[1], parts[2]);
  }
  std::vector<double> out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  return out;
}

void SweepSpec::validate() const {
  if (alphas.empty() || epsilons.empty() || delta_ratios.empty())
    throw DomainError("sweep axes must be non-empty");
  for (double a : alphas)
    for (double e : epsilons)
      for (double d : delta_ratios) sbnrg::validate(SpinBosonPoint{a, e, d});
}

SweepSpec preset(const std::string &name) {
  SweepSpec s;
  s.alphas = range(0.05, 0.95, 0.05);
  if (name == "fig1") {
    s.epsilons = {0.0};
    s.delta_ratios = {0.01, 0.04, 0.1};
  } else if (name == "fig2") {
    s.epsilons = {0.02, 0.1, 0.5};
    s.delta_ratios = {0.04};
  } else if (name == "fig3") {
    s.epsilons = {0.0, 0.1, 0.5, 1.0};
    s.delta_ratios = {0.04};
  } else {
    throw DomainError("unknown preset '" + name + "' (expected fig1, fig2 or fig3)");
  }
  return s;
}

std::vector<SweepRow> run_sweep(const SweepSpec &spec, const NRGConfig &cfg, unsigned jobs) {
  spec.validate();
  cfg.validate();

  std::vector<SpinBosonPoint> points;
  for (double d : spec.delta_ratios)
    for (double e : spec.epsilons)
      for (double a : spec.alphas) points.push_back(SpinBosonPoint{a, e, d});

  auto rows = parallel_map<SweepRow>(points.size(), jobs, [&](std::size_t i) {
    SweepRow row;
    row.point = points[i];
    try {
      row.record = run_point(points[i], cfg);
    } catch (const std::exception &ex) {
      row.error = ex.what();
    }
    return row;
  });

  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow &a, const SweepRow &b) {
    return std::tie(a.point.delta_ratio, a.point.epsilon, a.point.alpha) <
           std::tie(b.point.delta_ratio, b.point.epsilon, b.point.alpha);
  });
  return rows;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_csv(std::ostream &os, const std::vector<SweepRow> &rows) {
  os << kCsvHeader << '\n';
  for (const auto &row : rows) {
    const auto &p = row.point;
    os << format_number(p.alpha) << ',' << format_number(p.epsilon) << ','
       << format_number(p.delta_ratio) << ',';
    if (!row.record) {
      os << "nan,nan,nan,false,nan,nan,nan,nan,nan,nan\n";
      continue;
    }
    const auto &r = *row.record;
    os << format_number(r.lambda) << ',' << r.n_keep << ',' << r.n_m << ','
       << (r.converged ? "true" : "false") << ',' << format_number(r.sx) << ','
       << format_number(r.sz) << ',' << format_number(r.entropy) << ','
       << format_number(r.p_plus) << ',' << format_number(r.p_minus) << ','
       << format_number(r.delta_r) << '\n';
  }
}

json config_to_json(const NRGConfig &cfg) {
  return json{{"lambda", cfg.lambda},
              {"n_keep", cfg.n_keep},
              {"n_max", cfg.n_max},
              {"eta", cfg.eta},
              {"plateau_tol", cfg.plateau_tol},
              {"degeneracy_tol", cfg.degeneracy_tol},
              {"plateau_window", cfg.plateau_window},
              {"calibrate_jpar", cfg.calibrate_jpar}};
}

namespace {

json record_to_json(const ObservableRecord &r) {
  return json{{"alpha", r.alpha},
              {"eps_over_delta", r.epsilon_over_delta},
              {"delta_ratio", r.delta_ratio},
              {"lambda", r.lambda},
              {"n_keep", r.n_keep},
              {"n_m", r.n_m},
              {"converged", r.converged},
              {"sx", r.sx},
              {"sy", r.sy},
              {"sz", r.sz},
              {"norm", r.norm},
              {"entropy", r.entropy},
              {"p_plus", r.p_plus},
              {"p_minus", r.p_minus},
              {"delta_r", r.delta_r},
              {"e0", r.e0},
              {"drift", r.drift},
              {"even_odd_averaged", r.even_odd_averaged},
              {"delta_r_underflow", r.delta_r_underflow},
              {"transverse_warning", r.transverse_warning}};
}

ObservableRecord record_from_json(const json &j) {
  ObservableRecord r;
  j.at("alpha").get_to(r.alpha);
  j.at("eps_over_delta").get_to(r.epsilon_over_delta);
  j.at("delta_ratio").get_to(r.delta_ratio);
  j.at("lambda").get_to(r.lambda);
  j.at("n_keep").get_to(r.n_keep);
  j.at("n_m").get_to(r.n_m);
  j.at("converged").get_to(r.converged);
  j.at("sx").get_to(r.sx);
  j.at("sy").get_to(r.sy);
  j.at("sz").get_to(r.sz);
  j.at("norm").get_to(r.norm);
  j.at("entropy").get_to(r.entropy);
  j.at("p_plus").get_to(r.p_plus);
  j.at("p_minus").get_to(r.p_minus);
  j.at("delta_r").get_to(r.delta_r);
  j.at("e0").get_to(r.e0);
  j.at("drift").get_to(r.drift);
  j.at("even_odd_averaged").get_to(r.even_odd_averaged);
  j.at("delta_r_underflow").get_to(r.delta_r_underflow);
  j.at("transverse_warning").get_to(r.transverse_warning);
  return r;
}

} // namespace

json to_json(const std::vector<SweepRow> &rows, const NRGConfig &cfg) {
  json records = json::array();
  for (const auto &row : rows) {
    if (row.record) {
      records.push_back(record_to_json(*row.record));
    } else {
      records.push_back(json{{"alpha", row.point.alpha},
                             {"eps_over_delta", row.point.epsilon},
                             {"delta_ratio", row.point.delta_ratio},
                             {"error", row.error}});
    }
  }
  return json{{"metadata",
               {{"solver", "sbnrg"},
                {"version", kSolverVersion},
                {"units", "energies in D0 = 1, wc = 2 D0, eps given as eps/Delta"},
                {"sign_convention", kSignConventionNote},
                {"config", config_to_json(cfg)}}},
              {"records", records}};
}

std::vector<SweepRow> rows_from_json(const json &doc) {
  std::vector<SweepRow> rows;
  for (const auto &j : doc.at("records")) {
    SweepRow row;
    j.at("alpha").get_to(row.point.alpha);
    j.at("eps_over_delta").get_to(row.point.epsilon);
    j.at("delta_ratio").get_to(row.point.delta_ratio);
    if (j.contains("error"))
      j.at("error").get_to(row.error);
    else
      row.record = record_from_json(j);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_output(const std::vector<SweepRow> &rows, const NRGConfig &cfg, Format format,
                  const std::string &path) {
  auto emit = [&](std::ostream &os) {
    if (format == Format::Csv)
      write_csv(os, rows);
    else
      os << to_json(rows, cfg).dump(2) << '\n';
  };
  if (path.empty() || path == "-") {
    emit(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  emit(out);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::map<std::string, std::string> read_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError(path + ":" + std::to_string(lineno) + ": expected key = value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

namespace {

bool parse_bool(const std::string &key, const std::string &v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw DomainError(key + " must be true or false");
}

} // namespace

void apply_config(const std::map<std::string, std::string> &entries, NRGConfig &cfg) {
  auto as_int = [](const std::string &key, const std::string &v) {
    const double d = parse_double(v);
    if (d != std::floor(d) || d < 0) throw DomainError(key + " must be a non-negative integer");
    return static_cast<long>(d);
  };
  // paper_fidelity first, so explicit keys in the same file override it.
  if (auto it = entries.find("paper_fidelity"); it != entries.end()) {
    if (parse_bool(it->first, it->second)) {
      const auto pf = NRGConfig::paper_fidelity();
      cfg.lambda = pf.lambda;
      cfg.n_keep = pf.n_keep;
    }
  }
  for (const auto &[key, value] : entries) {
    if (key == "paper_fidelity") continue;
    if (key == "lambda") cfg.lambda = parse_double(value);
    else if (key == "n_keep") cfg.n_keep = static_cast<std::size_t>(as_int(key, value));
    else if (key == "n_max") cfg.n_max = static_cast<int>(as_int(key, value));
    else if (key == "eta") cfg.eta = parse_double(value);
    else if (key == "plateau_tol") cfg.plateau_tol = parse_double(value);
    else if (key == "degeneracy_tol") cfg.degeneracy_tol = parse_double(value);
    else if (key == "plateau_window") cfg.plateau_window = static_cast<int>(as_int(key, value));
    else if (key == "calibrate_jpar") cfg.calibrate_jpar = parse_bool(key, value);
    else throw DomainError("unknown config key '" + key + "'");
  }
}

} // namespace sbnrg
