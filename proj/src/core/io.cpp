#include "core/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "core/error.hpp"

namespace owma::io {

namespace {

[[noreturn]] void parse_error(std::string_view where, const std::string& what) {
  throw Error(ErrorCode::parse, std::string(where) + ": " + what);
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

// Non-empty, non-comment lines with their 1-based line numbers.
struct Line {
  std::size_t number;
  std::string text;
};

std::vector<Line> read_lines(std::istream& is, bool skip_comments) {
  std::vector<Line> out;
  std::string raw;
  std::size_t n = 0;
  while (std::getline(is, raw)) {
    ++n;
    std::string t = trim(raw);
    if (t.empty()) continue;
    if (skip_comments && t.front() == '#') continue;
    out.push_back({n, std::move(t)});
  }
  return out;
}

std::string where(const std::string& name, std::size_t line) { return name + ":" + std::to_string(line); }

void expect_header(const std::vector<Line>& lines, const std::string& name, const std::vector<std::string>& fixed,
                   const std::string& tail_prefix, std::size_t& tail_count) {
  if (lines.empty()) parse_error(name, "file is empty");
  const auto cols = split(lines[0].text, ',');
  if (cols.size() <= fixed.size()) parse_error(where(name, lines[0].number), "header has too few columns");
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (trim(cols[i]) != fixed[i]) parse_error(where(name, lines[0].number), "expected column '" + fixed[i] + "'");
  }
  tail_count = cols.size() - fixed.size();
  for (std::size_t i = 0; i < tail_count; ++i) {
    const std::string expected = tail_prefix + std::to_string(i + 1);
    if (trim(cols[fixed.size() + i]) != expected) {
      parse_error(where(name, lines[0].number), "expected column '" + expected + "'");
    }
  }
}

std::vector<std::string_view> fields(const Line& line, std::size_t expected, const std::string& name) {
  auto f = split(line.text, ',');
  if (f.size() != expected) {
    parse_error(where(name, line.number),
                "expected " + std::to_string(expected) + " columns, found " + std::to_string(f.size()));
  }
  return f;
}

std::string join(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

Eigen::VectorXd parse_vector(std::string_view text, std::string_view where_) {
  const auto parts = split(text, ',');
  Eigen::VectorXd v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_double(parts[i], where_);
  return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::string_view where_) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* b = t.data();
  const char* e = t.data() + t.size();
  if (!t.empty() && *b == '+') ++b;
  const auto res = std::from_chars(b, e, v);
  if (t.empty() || res.ec != std::errc() || res.ptr != e) parse_error(where_, "invalid number '" + t + "'");
  if (!std::isfinite(v)) parse_error(where_, "non-finite number '" + t + "'");
  return v;
}

long long parse_int(std::string_view text, std::string_view where_) {
  const std::string t = trim(text);
  long long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    parse_error(where_, "invalid integer '" + t + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void write_training(std::ostream& os, const TrainingSet& training) {
  os << "set,j";
  for (int c = 1; c <= training.p(); ++c) os << ",x" << c;
  os << '\n';
  for (int i = 0; i < training.N(); ++i) {
    for (int j = training.W(); j >= 1; --j) {
      os << i + 1 << ',' << j;
      for (int c = 0; c < training.p(); ++c) os << ',' << format_double(training.set(i)(c, j - 1));
      os << '\n';
    }
  }
}

TrainingSet read_training(std::istream& is, const std::string& name) {
  const auto lines = read_lines(is, false);
  std::size_t p = 0;
  expect_header(lines, name, {"set", "j"}, "x", p);
  if (lines.size() < 2) parse_error(name, "no training rows");

  std::vector<Eigen::MatrixXd> sets;
  std::vector<Eigen::VectorXd> current;
  long long current_set = 0;
  long long expected_j = 0;
  int W = -1;
  auto close_set = [&](std::size_t line_no) {
    if (current.empty()) return;
    if (expected_j != 0) parse_error(where(name, line_no), "set " + std::to_string(current_set) + " is incomplete");
    if (W < 0) W = static_cast<int>(current.size());
    if (static_cast<int>(current.size()) != W) parse_error(where(name, line_no), "sets have different lengths");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(p), W);
    // Rows arrive as j = W..1; column j-1 holds X^j.
    for (int k = 0; k < W; ++k) m.col(W - 1 - k) = current[static_cast<std::size_t>(k)];
    sets.push_back(std::move(m));
    current.clear();
  };
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& line = lines[li];
    const std::string w = where(name, line.number);
    const auto f = fields(line, p + 2, name);
    const long long set = parse_int(f[0], w);
    const long long j = parse_int(f[1], w);
    if (set != current_set) {
      close_set(line.number);
      if (set != static_cast<long long>(sets.size()) + 1) parse_error(w, "set indices must run 1, 2, ... in order");
      current_set = set;
      if (W >= 0 && j != W) parse_error(w, "set must start at j = " + std::to_string(W));
      if (j < 1) parse_error(w, "j must be positive");
      expected_j = j;
    }
    if (expected_j < 1) parse_error(w, "set has rows beyond j = 1");
    if (j != expected_j) parse_error(w, "j must run W..1 within a set");
    Eigen::VectorXd x(static_cast<Eigen::Index>(p));
    for (std::size_t c = 0; c < p; ++c) x[static_cast<Eigen::Index>(c)] = parse_double(f[c + 2], w);
    current.push_back(std::move(x));
    --expected_j;
  }
  close_set(lines.back().number);
  return TrainingSet(std::move(sets));
}

void write_observations(std::ostream& os, const ObservationSeries& series) {
  os << 't';
  for (Eigen::Index c = 1; c <= series.dim(); ++c) os << ",x" << c;
  os << '\n';
  for (Eigen::Index r = 0; r < series.length(); ++r) {
    os << series.time_of_row(r);
    for (Eigen::Index c = 0; c < series.dim(); ++c) os << ',' << format_double(series.values(r, c));
    os << '\n';
  }
}

ObservationSeries read_observations(std::istream& is, const std::string& name) {
  const auto lines = read_lines(is, false);
  std::size_t p = 0;
  expect_header(lines, name, {"t"}, "x", p);
  if (lines.size() < 2) parse_error(name, "no observation rows");
  ObservationSeries s;
  s.values.resize(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(p));
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::string w = where(name, lines[li].number);
    const auto f = fields(lines[li], p + 1, name);
    const long long t = parse_int(f[0], w);
    if (li == 1) s.start_index = t;
    else if (t != s.start_index + static_cast<long long>(li - 1)) parse_error(w, "time indices must be consecutive");
    for (std::size_t c = 0; c < p; ++c) {
      s.values(static_cast<Eigen::Index>(li - 1), static_cast<Eigen::Index>(c)) = parse_double(f[c + 1], w);
    }
  }
  return s;
}

void write_statistics(std::ostream& os, const StatisticSeries& stats) {
  os << "t,value,limit,alarm\n";
  const std::string limit = format_double(stats.limit);
  for (std::size_t i = 0; i < stats.size(); ++i) {
    os << stats.t[i] << ',' << format_double(stats.value[i]) << ',' << limit << ',' << (stats.alarm[i] ? 1 : 0)
       << '\n';
  }
}

StatisticSeries read_statistics(std::istream& is, const std::string& name) {
  const auto lines = read_lines(is, false);
  if (lines.empty()) parse_error(name, "file is empty");
  if (lines[0].text != "t,value,limit,alarm") parse_error(where(name, lines[0].number), "expected header t,value,limit,alarm");
  StatisticSeries s;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::string w = where(name, lines[li].number);
    const auto f = fields(lines[li], 4, name);
    s.t.push_back(parse_int(f[0], w));
    s.value.push_back(parse_double(f[1], w));
    const double limit = parse_double(f[2], w);
    if (li == 1) s.limit = limit;
    else if (limit != s.limit) parse_error(w, "limit must be constant");
    const long long alarm = parse_int(f[3], w);
    if (alarm != 0 && alarm != 1) parse_error(w, "alarm must be 0 or 1");
    s.alarm.push_back(static_cast<char>(alarm));
  }
  return s;
}

void write_schedule(std::ostream& os, const FaultSchedule& schedule) {
  const Eigen::Index p = schedule.empty() ? 0 : schedule[0].xi.size();
  os << "q,mu,nu,f";
  for (Eigen::Index c = 1; c <= p; ++c) os << ",xi_" << c;
  os << '\n';
  for (std::size_t q = 0; q < schedule.size(); ++q) {
    const FaultEpisode& e = schedule[q];
    os << q + 1 << ',' << e.mu << ',' << e.nu << ',' << format_double(e.f);
    for (Eigen::Index c = 0; c < p; ++c) os << ',' << format_double(e.xi[c]);
    os << '\n';
  }
}

FaultSchedule read_schedule(std::istream& is, const std::string& name) {
  const auto lines = read_lines(is, false);
  std::size_t p = 0;
  if (!lines.empty() && lines[0].text == "q,mu,nu,f") return FaultSchedule();
  expect_header(lines, name, {"q", "mu", "nu", "f"}, "xi_", p);
  std::vector<FaultEpisode> eps;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::string w = where(name, lines[li].number);
    const auto f = fields(lines[li], p + 4, name);
    if (parse_int(f[0], w) != static_cast<long long>(li)) parse_error(w, "episode numbers must run 1, 2, ...");
    FaultEpisode e;
    e.mu = parse_int(f[1], w);
    e.nu = parse_int(f[2], w);
    e.f = parse_double(f[3], w);
    e.xi.resize(static_cast<Eigen::Index>(p));
    for (std::size_t c = 0; c < p; ++c) e.xi[static_cast<Eigen::Index>(c)] = parse_double(f[c + 4], w);
    eps.push_back(std::move(e));
  }
  return FaultSchedule(std::move(eps));
}

void write_weights(std::ostream& os, const Eigen::VectorXd& weights) {
  for (Eigen::Index i = 0; i < weights.size(); ++i) os << format_double(weights[i]) << '\n';
}

void write_weights(std::ostream& os, const SolverReport& report, double ridge) {
  os << "# optimal weights, first line multiplies the newest sample\n";
  write_weights(os, report.weight);
  os << "# W=" << report.weight.size() << " residual=" << format_double(report.residual)
     << " beta=" << format_double(report.beta) << " iterations=" << report.iterations
     << " converged=" << (report.converged ? 1 : 0) << " symmetry_defect=" << format_double(report.symmetry_defect)
     << " second_order=" << to_string(report.second_order);
  if (ridge > 0.0) os << " ridge=" << format_double(ridge);
  os << '\n';
}

Eigen::VectorXd read_weights(std::istream& is, const std::string& name) {
  const auto lines = read_lines(is, true);
  if (lines.empty()) parse_error(name, "no weights");
  Eigen::VectorXd a(static_cast<Eigen::Index>(lines.size()));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    a[static_cast<Eigen::Index>(i)] = parse_double(lines[i].text, where(name, lines[i].number));
  }
  return a;
}

void write_metrics(std::ostream& os, const DetectionMetrics& m) {
  os << "far=" << format_double(m.far) << '\n'
     << "fault_free_samples=" << m.fault_free_samples << '\n'
     << "fdr_active=" << format_double(m.active_alarm_rate) << '\n'
     << "active_samples=" << m.active_samples << '\n'
     << "episodes=" << m.episodes.size() << '\n'
     << "missed_transitions=" << m.missed_transitions << '\n'
     << "missed_alarms=" << m.missed_alarms << '\n'
     << "region_missed_alarms=" << m.region_missed_alarms << '\n'
     << "region_samples=" << m.region_samples << '\n'
     << "mean_detection_delay=" << format_double(m.mean_detection_delay) << '\n'
     << "mean_clearance_delay=" << format_double(m.mean_clearance_delay) << '\n'
     << '\n'
     << "q,appeared_at,detected_at,disappeared_at,cleared_at,appearance_detected,disappearance_detected,"
        "detection_delay,clearance_delay\n";
  for (const EpisodeOutcome& e : m.episodes) {
    os << e.q << ',' << e.appeared_at << ',';
    if (e.detected_at) os << *e.detected_at;
    os << ',' << e.disappeared_at << ',';
    if (e.cleared_at) os << *e.cleared_at;
    os << ',' << (e.appearance_detected ? 1 : 0) << ',' << (e.disappearance_detected ? 1 : 0) << ',';
    if (e.detected_at) os << *e.detected_at - e.appeared_at;
    os << ',';
    if (e.cleared_at) os << *e.cleared_at - e.disappeared_at;
    os << '\n';
  }
}

void write_chart(std::ostream& os, const ControlChart& chart) {
  os << "# weighted moving average T2 chart\n"
     << "kind=" << to_string(chart.limit_kind()) << '\n'
     << "alpha=" << format_double(chart.alpha()) << '\n'
     << "N=" << chart.N() << '\n'
     << "W=" << chart.W() << '\n'
     << "p=" << chart.p() << '\n'
     << "limit=" << format_double(chart.limit()) << '\n'
     << "weights=" << join(chart.weight().vec()) << '\n'
     << "x_tilde=" << join(chart.x_tilde()) << '\n';
  const Eigen::MatrixXd rm = chart.s_tilde().transpose();  // column-major storage of the transpose is row-major
  os << "s_tilde=" << join(Eigen::Map<const Eigen::VectorXd>(rm.data(), rm.size())) << '\n';
}

ControlChart read_chart(std::istream& is, const std::string& name) {
  const auto lines = read_lines(is, true);
  std::map<std::string, std::pair<std::string, std::size_t>> kv;
  for (const auto& line : lines) {
    const auto eq = line.text.find('=');
    if (eq == std::string::npos) parse_error(where(name, line.number), "expected key=value");
    kv[trim(std::string_view(line.text).substr(0, eq))] = {trim(std::string_view(line.text).substr(eq + 1)), line.number};
  }
  auto get = [&](const std::string& key) -> const std::pair<std::string, std::size_t>& {
    auto it = kv.find(key);
    if (it == kv.end()) parse_error(name, "missing key '" + key + "'");
    return it->second;
  };
  auto w = [&](const std::string& key) { return where(name, get(key).second); };
  const LimitKind kind = parse_limit_kind(get("kind").first);
  const double alpha = parse_double(get("alpha").first, w("alpha"));
  const auto N = static_cast<int>(parse_int(get("N").first, w("N")));
  const auto W = parse_int(get("W").first, w("W"));
  const auto p = parse_int(get("p").first, w("p"));
  const double limit = parse_double(get("limit").first, w("limit"));
  const Eigen::VectorXd a = parse_vector(get("weights").first, w("weights"));
  const Eigen::VectorXd x = parse_vector(get("x_tilde").first, w("x_tilde"));
  const Eigen::VectorXd s = parse_vector(get("s_tilde").first, w("s_tilde"));
  if (a.size() != W || x.size() != p || s.size() != p * p) parse_error(name, "chart dimensions disagree");
  Eigen::MatrixXd S = Eigen::Map<const Eigen::MatrixXd>(s.data(), p, p).transpose();
  return ControlChart(WeightVector(a), std::move(S), x, limit, kind, alpha, N);
}

std::string read_text(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error(ErrorCode::io, "failed writing '" + path.string() + "'");
}

TrainingSet load_training(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_training(in, path.string());
}

ObservationSeries load_observations(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_observations(in, path.string());
}

StatisticSeries load_statistics(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_statistics(in, path.string());
}

FaultSchedule load_schedule(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_schedule(in, path.string());
}

Eigen::VectorXd load_weights(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_weights(in, path.string());
}

ControlChart load_chart(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_chart(in, path.string());
}

}  // namespace owma::io
