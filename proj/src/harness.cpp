#include "kle/harness.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "kle/parallel.h"
#include "kle/random.h"
#include "kle/stats.h"

namespace kle {

namespace {

using nlohmann::json;

double number(const json& spec, const char* key, double fallback) {
  if (!spec.contains(key)) return fallback;
  if (!spec.at(key).is_number()) throw ConfigError(std::string("config: '") + key + "' must be a number");
  return spec.at(key).get<double>();
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::string path_name(std::size_t p, std::size_t d) {
  return "path" + std::to_string(p) + "_d" + std::to_string(d) + ".csv";
}

// Samples at d_list.front() with the record kept, then extends through d_list.
std::vector<CoefficientSample> nested_samples(const SplitModel& model, const ExperimentConfig& cfg,
                                              std::uint64_t seed) {
  ShotConfig shot = cfg.shot();
  shot.seed = seed;
  shot.keep_record = true;
  std::vector<CoefficientSample> out;
  out.push_back(sample_coeffs(model, KleBasis(cfg.T, cfg.d_list.front(), model.alpha()), shot));
  for (std::size_t i = 1; i < cfg.d_list.size(); ++i) {
    out.push_back(extend_dimension(out.back(), model, KleBasis(cfg.T, cfg.d_list[i], model.alpha()), shot));
  }
  return out;
}

constexpr char kTableMagic[8] = {'K', 'L', 'E', 'E', '1', 'T', 'B', '1'};

}  // namespace

ShotConfig ExperimentConfig::shot() const {
  ShotConfig s;
  s.seed = seed;
  s.gamma_cutoff = gamma_cutoff;
  s.max_terms = max_terms;
  return s;
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  ExperimentConfig cfg;
  try {
    if (doc.contains("model")) {
      if (doc.at("model").is_string()) {
        cfg.model = doc;  // flat form: model name with parameters alongside
      } else if (doc.at("model").is_object()) {
        cfg.model = doc.at("model");
      } else {
        throw ConfigError("config: 'model' must be a name or an object");
      }
    }
    if (doc.contains("T")) cfg.T = doc.at("T").get<double>();
    if (doc.contains("d_list")) cfg.d_list = doc.at("d_list").get<std::vector<std::size_t>>();
    if (doc.contains("n_paths")) cfg.n_paths = doc.at("n_paths").get<std::size_t>();
    if (doc.contains("grid_n")) cfg.grid_n = doc.at("grid_n").get<std::size_t>();
    if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("mode")) {
      const auto m = doc.at("mode").get<std::string>();
      if (m == "partial") {
        cfg.mode = SumMode::partial;
      } else if (m == "cesaro") {
        cfg.mode = SumMode::cesaro;
      } else {
        throw ConfigError("config: mode must be 'partial' or 'cesaro'");
      }
    }
    if (doc.contains("output")) cfg.output = doc.at("output").get<std::string>();
    if (doc.contains("threads")) cfg.threads = doc.at("threads").get<unsigned>();
    if (doc.contains("gamma_cutoff")) cfg.gamma_cutoff = doc.at("gamma_cutoff").get<double>();
    if (doc.contains("max_terms")) cfg.max_terms = doc.at("max_terms").get<std::size_t>();
    if (doc.contains("ks_d")) cfg.ks_d = doc.at("ks_d").get<std::size_t>();
    if (doc.contains("ks_samples")) cfg.ks_samples = doc.at("ks_samples").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_config(doc);
}

void validate_config(const ExperimentConfig& cfg) {
  if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) throw ConfigError("config: T must be positive");
  if (cfg.d_list.empty()) throw ConfigError("config: d_list must be nonempty");
  if (cfg.d_list.front() == 0) throw ConfigError("config: d values must be positive");
  for (std::size_t i = 1; i < cfg.d_list.size(); ++i) {
    if (cfg.d_list[i] <= cfg.d_list[i - 1]) throw ConfigError("config: d_list must be strictly ascending");
  }
  if (cfg.n_paths < 1) throw ConfigError("config: n_paths must be at least 1");
  if (cfg.grid_n < 2) throw ConfigError("config: grid_n must be at least 2");
  if (!(cfg.gamma_cutoff > 0.0)) throw ConfigError("config: gamma_cutoff must be positive");
  if (cfg.max_terms < 1) throw ConfigError("config: max_terms must be at least 1");
  if (cfg.threads < 1) throw ConfigError("config: threads must be at least 1");
  build_model(cfg.model);
}

SplitModel build_model(const json& spec) {
  if (!spec.is_object() || !spec.contains("model") || !spec.at("model").is_string()) {
    throw ConfigError("config: model name missing");
  }
  const auto name = spec.at("model").get<std::string>();
  try {
    if (name == "variance_gamma") {
      return make_variance_gamma(number(spec, "c_pos", 1.0), number(spec, "rho_pos", 1.0), number(spec, "c_neg", 1.0),
                                 number(spec, "rho_neg", 2.0), number(spec, "sigma2", 0.0));
    }
    if (name == "gamma") return make_split(make_gamma(number(spec, "c", 1.0), number(spec, "rho", 1.0)));
    if (name == "cp_exponential") {
      return make_split(make_cp_exponential(number(spec, "rate", 1.0), number(spec, "rho", 1.0)));
    }
    if (name == "brownian") return make_split(make_brownian(number(spec, "sigma2", 1.0)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  throw ConfigError("config: unknown model '" + name + "'");
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::filesystem::path> cmd_simulate_paths(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const SplitModel model = build_model(cfg.model);
  const std::vector<double> grid = uniform_grid(cfg.T, cfg.grid_n);
  const double mean_rate = model.mean_rate();
  std::filesystem::create_directories(cfg.output);

  // One entry per path: the nested samples and their rendered files.
  struct PathOutput {
    std::vector<CoefficientSample> samples;
    std::vector<std::string> csv;
  };
  auto chunks = parallel_chunks(cfg.n_paths, 1, cfg.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<PathOutput> out;
    for (std::size_t p = begin; p < end; ++p) {
      PathOutput po;
      po.samples = nested_samples(model, cfg, sample_seed(cfg.seed, p));
      for (const auto& s : po.samples) {
        const KleBasis basis(cfg.T, s.d, model.alpha());
        const PathApproximation path = reconstruct(s, basis, grid, cfg.mode, mean_rate);
        std::string text = "t,value\n";
        for (std::size_t i = 0; i < grid.size(); ++i) {
          text += format_double(path.grid[i]) + ',' + format_double(path.values[i]) + '\n';
        }
        po.csv.push_back(std::move(text));
      }
      out.push_back(std::move(po));
    }
    return out;
  });

  std::vector<std::filesystem::path> written;
  std::vector<std::ofstream> coeffs;
  for (std::size_t j = 0; j < cfg.d_list.size(); ++j) {
    const auto path = cfg.output / ("coeffs_d" + std::to_string(cfg.d_list[j]) + ".csv");
    coeffs.push_back(open_output(path));
    coeffs.back() << "sample_id,k,z_k,n_terms_pos,n_terms_neg,seed\n";
    written.push_back(path);
  }
  std::size_t p = 0;
  for (const auto& chunk : chunks) {
    for (const auto& po : chunk) {
      for (std::size_t j = 0; j < cfg.d_list.size(); ++j) {
        const auto path = cfg.output / path_name(p, cfg.d_list[j]);
        open_output(path) << po.csv[j];
        written.push_back(path);
        const CoefficientSample& s = po.samples[j];
        for (std::size_t k = 0; k < s.d; ++k) {
          coeffs[j] << p << ',' << (k + 1) << ',' << format_double(s.z[k]) << ',' << s.n_terms_pos << ','
                    << s.n_terms_neg << ',' << s.seed << '\n';
        }
      }
      ++p;
    }
  }
  for (auto& f : coeffs) {
    f.flush();
    if (!f) throw std::runtime_error("write failed for coefficient dump");
  }
  return written;
}

std::vector<McMeanCurve> run_mc_mean(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const SplitModel model = build_model(cfg.model);
  const std::vector<double> grid = uniform_grid(cfg.T, cfg.grid_n);
  const std::size_t n_d = cfg.d_list.size();

  using Accumulators = std::vector<std::vector<ScalarMoments>>;  // [d][grid point]
  auto chunks = parallel_chunks(cfg.n_paths, 256, cfg.threads, [&](std::size_t begin, std::size_t end) {
    Accumulators acc(n_d, std::vector<ScalarMoments>(grid.size()));
    for (std::size_t i = begin; i < end; ++i) {
      const auto samples = nested_samples(model, cfg, sample_seed(cfg.seed, i));
      for (std::size_t j = 0; j < n_d; ++j) {
        const KleBasis basis(cfg.T, samples[j].d, model.alpha());
        const PathApproximation path = reconstruct(samples[j], basis, grid, cfg.mode, model.mean_rate());
        for (std::size_t g = 0; g < grid.size(); ++g) acc[j][g].add(path.values[g]);
      }
    }
    return acc;
  });
  Accumulators total(n_d, std::vector<ScalarMoments>(grid.size()));
  for (const auto& c : chunks) {
    for (std::size_t j = 0; j < n_d; ++j) {
      for (std::size_t g = 0; g < grid.size(); ++g) total[j][g].merge(c[j][g]);
    }
  }

  std::vector<McMeanCurve> curves;
  for (std::size_t j = 0; j < n_d; ++j) {
    McMeanCurve c;
    c.d = cfg.d_list[j];
    c.t = grid;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const MeanEstimate e = total[j][g].estimate();
      c.mean.push_back(e.mean);
      c.stderr_.push_back(e.se);
      c.expected.push_back(model.mean_rate() * grid[g]);
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

std::vector<std::filesystem::path> cmd_mc_mean(const ExperimentConfig& cfg) {
  const auto curves = run_mc_mean(cfg);
  std::filesystem::create_directories(cfg.output);
  std::vector<std::filesystem::path> written;
  for (const auto& c : curves) {
    const auto path = cfg.output / ("mc_mean_d" + std::to_string(c.d) + ".csv");
    auto out = open_output(path);
    out << "t,mc_mean,expected,abs_err,stderr\n";
    for (std::size_t g = 0; g < c.t.size(); ++g) {
      out << format_double(c.t[g]) << ',' << format_double(c.mean[g]) << ',' << format_double(c.expected[g]) << ','
          << format_double(std::abs(c.mean[g] - c.expected[g])) << ',' << format_double(c.stderr_[g]) << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
    written.push_back(path);
  }
  return written;
}

json cmd_validate(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const SplitModel model = build_model(cfg.model);
  ValidationPlan plan;
  plan.T = cfg.T;
  plan.d = std::max<std::size_t>(cfg.d_list.front(), 2);
  plan.mc.seed = cfg.seed;
  plan.mc.n_samples = cfg.n_paths;
  plan.mc.threads = cfg.threads;
  plan.mc.shot = cfg.shot();
  plan.ks_d = cfg.ks_d;
  plan.ks_samples = std::max<std::size_t>(cfg.ks_samples, 100);
  json report = report_json(run_validation_suites(model, plan));
  report["model"] = cfg.model;
  report["n_samples"] = cfg.n_paths;
  report["seed"] = cfg.seed;
  std::filesystem::create_directories(cfg.output);
  open_output(cfg.output / "validation.json") << report.dump(2) << '\n';
  return report;
}

std::string cmd_variance_capture(const std::vector<std::size_t>& d_list) {
  if (d_list.empty()) throw ConfigError("variance-capture: d list must be nonempty");
  std::string out = "d,capture\n";
  for (std::size_t d : d_list) {
    if (d == 0) throw ConfigError("variance-capture: d must be positive");
    out += std::to_string(d) + ',' + format_double(variance_capture(d)) + '\n';
  }
  return out;
}

void save_e1_table(const MonotoneInverseTable& table, const std::filesystem::path& path, TableFormat format) {
  const auto& x = table.breakpoints();
  const auto& y = table.values();
  auto out = open_output(path);
  if (format == TableFormat::csv) {
    out << "y,x\n";
    for (std::size_t i = 0; i < x.size(); ++i) out << format_double(y[i]) << ',' << format_double(x[i]) << '\n';
  } else {
    const std::uint64_t n = x.size();
    out.write(kTableMagic, sizeof kTableMagic);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(x.data()), static_cast<std::streamsize>(n * sizeof(double)));
    out.write(reinterpret_cast<const char*>(y.data()), static_cast<std::streamsize>(n * sizeof(double)));
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

MonotoneInverseTable load_e1_table(const std::filesystem::path& path, TableFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<double> x;
  std::vector<double> y;
  if (format == TableFormat::csv) {
    std::string line;
    std::getline(in, line);
    if (line != "y,x") throw std::runtime_error("e1 table: unexpected header");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw std::runtime_error("e1 table: malformed row");
      double yv = 0.0;
      double xv = 0.0;
      const auto r1 = std::from_chars(line.data(), line.data() + comma, yv);
      const auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), xv);
      if (r1.ec != std::errc{} || r2.ec != std::errc{}) throw std::runtime_error("e1 table: malformed number");
      y.push_back(yv);
      x.push_back(xv);
    }
  } else {
    char magic[sizeof kTableMagic];
    std::uint64_t n = 0;
    in.read(magic, sizeof magic);
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    if (!in || std::memcmp(magic, kTableMagic, sizeof magic) != 0) throw std::runtime_error("e1 table: bad header");
    x.resize(n);
    y.resize(n);
    in.read(reinterpret_cast<char*>(x.data()), static_cast<std::streamsize>(n * sizeof(double)));
    in.read(reinterpret_cast<char*>(y.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw std::runtime_error("e1 table: truncated file");
  }
  return MonotoneInverseTable::from_pairs(std::move(x), std::move(y), [](double v) { return exp_integral_e1(v); },
                                          [](double v) { return -std::exp(-v) / v; });
}

}  // namespace kle
