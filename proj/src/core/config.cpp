#include "core/config.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "core/error.hpp"
#include "core/io.hpp"

namespace owma {

int ExperimentConfig::set_length() const {
  if (training.window > 0) return training.window;
  return *std::max_element(monitor.windows.begin(), monitor.windows.end());
}

int ExperimentConfig::gap() const { return training.gap > 0 ? training.gap : 10 * set_length(); }

namespace {

using Setter = std::function<void(const std::string& value, const std::string& where)>;

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::config, where + ": " + what);
}

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double as_double(const std::string& v, const std::string& where) {
  try {
    return io::parse_double(v, where);
  } catch (const Error& e) {
    config_error(where, e.what());
  }
}

long long as_int(const std::string& v, const std::string& where) {
  try {
    return io::parse_int(v, where);
  } catch (const Error& e) {
    config_error(where, e.what());
  }
}

int as_positive_int(const std::string& v, const std::string& where) {
  const long long x = as_int(v, where);
  if (x < 1 || x > 100000000) config_error(where, "expected a positive integer");
  return static_cast<int>(x);
}

std::vector<double> as_doubles(const std::string& v, const std::string& where) {
  std::vector<double> out;
  for (auto part : io::split(v, ',')) out.push_back(as_double(std::string(part), where));
  return out;
}

std::vector<int> as_ints(const std::string& v, const std::string& where) {
  std::vector<int> out;
  for (auto part : io::split(v, ',')) out.push_back(as_positive_int(std::string(part), where));
  return out;
}

std::vector<std::string> as_words(const std::string& v) {
  std::vector<std::string> out;
  for (auto part : io::split(v, ',')) {
    std::string w = trimmed(std::string(part));
    if (!w.empty()) out.push_back(w);
  }
  return out;
}

bool as_bool(const std::string& v, const std::string& where) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  config_error(where, "expected true or false");
}

Eigen::Matrix2d as_matrix2(const std::string& v, const std::string& where) {
  const auto d = as_doubles(v, where);
  if (d.size() != 4) config_error(where, "expected four values (row-major 2x2)");
  Eigen::Matrix2d m;
  m << d[0], d[1], d[2], d[3];
  return m;
}

template <std::size_t K>
std::array<double, K> as_array(const std::string& v, const std::string& where) {
  const auto d = as_doubles(v, where);
  if (d.size() != K) config_error(where, "expected " + std::to_string(K) + " values");
  std::array<double, K> out{};
  std::copy(d.begin(), d.end(), out.begin());
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  boost::property_tree::ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    config_error(source + ":" + std::to_string(e.line()), e.message());
  }

  ExperimentConfig cfg;
  std::string kind = "ar1";
  NoiseKind noise = NoiseKind::gaussian;
  int burn_in = 1000;
  AR1Config ar1 = AR1Config::benchmark();
  CSTRConfig cstr;

  std::map<std::string, std::map<std::string, Setter>> sections;
  auto& process = sections["process"];
  process["kind"] = [&](const std::string& v, const std::string& w) {
    if (v != "ar1" && v != "cstr") config_error(w, "process kind must be ar1 or cstr");
    kind = v;
  };
  process["noise"] = [&](const std::string& v, const std::string& w) {
    try {
      noise = parse_noise_kind(v);
    } catch (const Error& e) {
      config_error(w, e.what());
    }
  };
  process["burn_in"] = [&](const std::string& v, const std::string& w) {
    burn_in = static_cast<int>(as_int(v, w));
    if (burn_in < 0) config_error(w, "burn_in must be non-negative");
  };
  process["name"] = [&](const std::string& v, const std::string&) { cfg.name = v; };

  auto& a = sections["ar1"];
  a["A"] = [&](const std::string& v, const std::string& w) { ar1.A = as_matrix2(v, w); };
  a["B"] = [&](const std::string& v, const std::string& w) { ar1.B = as_matrix2(v, w); };
  a["C"] = [&](const std::string& v, const std::string& w) { ar1.C = as_matrix2(v, w); };
  a["D"] = [&](const std::string& v, const std::string& w) { ar1.D = as_matrix2(v, w); };
  a["w_scale"] = [&](const std::string& v, const std::string& w) { ar1.w_scale = as_double(v, w); };
  a["v_scale"] = [&](const std::string& v, const std::string& w) { ar1.v_scale = as_double(v, w); };

  auto& c = sections["cstr"];
  const std::vector<std::pair<std::string, double*>> cstr_fields = {
      {"q0", &cstr.q0},       {"V", &cstr.V},         {"CAf", &cstr.CAf},           {"Tf", &cstr.Tf},
      {"k0", &cstr.k0},       {"E_over_R", &cstr.E_over_R}, {"dH", &cstr.dH},       {"rho", &cstr.rho},
      {"Cp", &cstr.Cp},       {"UA", &cstr.UA},       {"CA_sp", &cstr.CA_sp},       {"T_sp", &cstr.T_sp},
      {"Tc0", &cstr.Tc0},     {"Kc_T", &cstr.Kc_T},   {"tau_i_T", &cstr.tau_i_T},   {"Kc_C", &cstr.Kc_C},
      {"tau_i_C", &cstr.tau_i_C}, {"sample_time", &cstr.sample_time}};
  for (const auto& [key, ptr] : cstr_fields) {
    double* target = ptr;
    c[key] = [target](const std::string& v, const std::string& w) { *target = as_double(v, w); };
  }
  c["substeps"] = [&](const std::string& v, const std::string& w) { cstr.substeps = as_positive_int(v, w); };
  c["process_noise"] = [&](const std::string& v, const std::string& w) { cstr.process_noise = as_array<2>(v, w); };
  c["measurement_noise"] = [&](const std::string& v, const std::string& w) {
    cstr.measurement_noise = as_array<4>(v, w);
  };

  auto& t = sections["training"];
  t["sets"] = [&](const std::string& v, const std::string& w) { cfg.training.sets = as_positive_int(v, w); };
  t["window"] = [&](const std::string& v, const std::string& w) { cfg.training.window = as_positive_int(v, w); };
  t["gap"] = [&](const std::string& v, const std::string& w) { cfg.training.gap = as_positive_int(v, w); };
  t["baseline_samples"] = [&](const std::string& v, const std::string& w) {
    cfg.training.baseline_samples = static_cast<int>(as_int(v, w));
    if (cfg.training.baseline_samples < 0) config_error(w, "baseline_samples must be non-negative");
  };

  auto& ts = sections["test"];
  ts["samples"] = [&](const std::string& v, const std::string& w) { cfg.test.samples = as_positive_int(v, w); };
  ts["fault_start"] = [&](const std::string& v, const std::string& w) { cfg.test.fault_start = as_positive_int(v, w); };
  ts["fault_free_end"] = [&](const std::string& v, const std::string& w) {
    cfg.test.fault_free_end = as_int(v, w);
  };

  auto& f = sections["fault"];
  f["xi"] = [&](const std::string& v, const std::string& w) {
    const auto d = as_doubles(v, w);
    cfg.fault.xi = Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
  };
  f["f_lb"] = [&](const std::string& v, const std::string& w) { cfg.fault.f_lb = as_double(v, w); };
  f["tau_o_lb"] = [&](const std::string& v, const std::string& w) { cfg.fault.tau_o_lb = as_positive_int(v, w); };
  f["tau_r_lb"] = [&](const std::string& v, const std::string& w) { cfg.fault.tau_r_lb = as_positive_int(v, w); };
  f["tau_r_prev_lb"] = [&](const std::string& v, const std::string& w) {
    cfg.fault.tau_r_prev_lb = as_positive_int(v, w);
  };
  f["excess_mean"] = [&](const std::string& v, const std::string& w) { cfg.fault.excess_mean = as_double(v, w); };

  auto& m = sections["monitor"];
  m["methods"] = [&](const std::string& v, const std::string& w) {
    cfg.monitor.methods = as_words(v);
    for (const auto& name : cfg.monitor.methods) {
      if (name != "owma" && name != "ma" && name != "pca" && name != "ma-pca" && name != "dpca") {
        config_error(w, "unknown method '" + name + "' (expected owma, ma, pca, ma-pca, dpca)");
      }
    }
  };
  m["windows"] = [&](const std::string& v, const std::string& w) { cfg.monitor.windows = as_ints(v, w); };
  m["alpha"] = [&](const std::string& v, const std::string& w) { cfg.monitor.alpha = as_double(v, w); };
  m["limit"] = [&](const std::string& v, const std::string& w) {
    try {
      cfg.monitor.limit = parse_limit_kind(v);
    } catch (const Error& e) {
      config_error(w, e.what());
    }
  };
  m["dpca_lags"] = [&](const std::string& v, const std::string& w) { cfg.monitor.dpca_lags = as_ints(v, w); };
  m["pca_cpv"] = [&](const std::string& v, const std::string& w) { cfg.monitor.pca_cpv = as_double(v, w); };
  m["dpca_cpv"] = [&](const std::string& v, const std::string& w) { cfg.monitor.dpca_cpv = as_double(v, w); };
  m["ma_pca_order"] = [&](const std::string& v, const std::string& w) {
    try {
      cfg.monitor.ma_pca_order = parse_ma_pca_order(v);
    } catch (const Error& e) {
      config_error(w, e.what());
    }
  };
  m["multi_start"] = [&](const std::string& v, const std::string& w) { cfg.monitor.multi_start = as_bool(v, w); };
  m["select_window"] = [&](const std::string& v, const std::string& w) {
    cfg.monitor.select_window = as_bool(v, w);
  };

  auto& r = sections["replication"];
  r["seed"] = [&](const std::string& v, const std::string& w) {
    const long long s = as_int(v, w);
    if (s < 0) config_error(w, "seed must be non-negative");
    cfg.replication.seed = static_cast<std::uint64_t>(s);
  };
  r["count"] = [&](const std::string& v, const std::string& w) { cfg.replication.count = as_positive_int(v, w); };
  r["threads"] = [&](const std::string& v, const std::string& w) {
    cfg.replication.threads = static_cast<int>(as_int(v, w));
  };

  for (const auto& [section, body] : tree) {
    auto sit = sections.find(section);
    if (sit == sections.end()) config_error(source, "unknown section [" + section + "]");
    if (!body.data().empty()) config_error(source, "value outside a section: " + section);
    for (const auto& [key, node] : body) {
      const std::string where = source + ": [" + section + "] " + key;
      auto kit = sit->second.find(key);
      if (kit == sit->second.end()) config_error(where, "unknown key");
      kit->second(trimmed(node.data()), where);
    }
  }

  if (kind == "ar1") {
    ar1.noise = noise;
    ar1.burn_in = burn_in;
    cfg.process = ar1;
  } else {
    cstr.noise = noise;
    cstr.burn_in = burn_in;
    cfg.process = cstr;
  }

  // Cross-field checks.
  if (cfg.fault.xi.size() == 0) config_error(source, "[fault] xi is required");
  if (cfg.fault.xi.size() != 4) config_error(source, "[fault] xi must have 4 entries for the built-in processes");
  if (!(cfg.fault.xi.norm() > 0.0)) config_error(source, "[fault] xi must be non-zero");
  if (!(cfg.fault.f_lb > 0.0)) config_error(source, "[fault] f_lb must be positive");
  if (!(cfg.fault.excess_mean > 0.0)) config_error(source, "[fault] excess_mean must be positive");
  if (!(cfg.monitor.alpha > 0.0 && cfg.monitor.alpha < 1.0)) config_error(source, "[monitor] alpha must lie in (0, 1)");
  if (cfg.monitor.methods.empty()) config_error(source, "[monitor] methods is empty");
  if (cfg.monitor.windows.empty()) config_error(source, "[monitor] windows is empty");
  if (cfg.training.window > 0 && cfg.training.window < *std::max_element(cfg.monitor.windows.begin(),
                                                                          cfg.monitor.windows.end())) {
    config_error(source, "[training] window is shorter than the largest monitor window");
  }
  if (cfg.training.sets <= 4) config_error(source, "[training] sets must exceed the number of variables");
  if (cfg.test.fault_start < 1 || cfg.test.fault_start > cfg.test.samples) {
    config_error(source, "[test] fault_start must lie within the test series");
  }
  if (!(cfg.monitor.pca_cpv > 0.0 && cfg.monitor.pca_cpv <= 1.0) ||
      !(cfg.monitor.dpca_cpv > 0.0 && cfg.monitor.dpca_cpv <= 1.0)) {
    config_error(source, "[monitor] cpv values must lie in (0, 1]");
  }
  const bool needs_baseline = std::any_of(cfg.monitor.methods.begin(), cfg.monitor.methods.end(), [](const auto& s) {
    return s == "pca" || s == "ma-pca" || s == "dpca";
  });
  if (needs_baseline && cfg.training.baseline_samples < 100) {
    config_error(source, "[training] baseline_samples is too small for the PCA baselines");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_text(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::config, e.what());
  }
  return parse_config(text, path.string());
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, body] : embedded_presets()) names.push_back(name);
  return names;
}

const std::string& preset_text(const std::string& name) {
  for (const auto& [n, body] : embedded_presets()) {
    if (n == name) return body;
  }
  std::string list;
  for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
  throw Error(ErrorCode::unknown_preset, "unknown preset '" + name + "'; available: " + list);
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg = parse_config(preset_text(name), "preset " + name);
  cfg.name = name;
  return cfg;
}

}  // namespace owma
