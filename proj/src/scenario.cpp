#include "fcw/scenario.hpp"

#include "fcw/io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace fcw {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Samples deviating from their window median by more than threshold × scaled MAD.
std::vector<char> detect_outliers(const std::vector<double>& x, const PreprocessOptions& opts) {
  const int n = static_cast<int>(x.size());
  const int half = opts.window / 2;
  std::vector<char> flag(x.size(), 0);
  std::vector<double> win;
  for (int i = 0; i < n; ++i) {
    win.clear();
    for (int j = std::max(0, i - half); j <= std::min(n - 1, i + half); ++j) win.push_back(x[j]);
    const double med = median(win);
    for (double& w : win) w = std::abs(w - med);
    const double mad = 1.4826 * median(win);
    if (std::abs(x[i] - med) > opts.threshold * mad) flag[i] = 1;
  }
  return flag;
}

// Trusted samples kept as is; the rest interpolated linearly, edges extended along the nearest two
// trusted samples (held constant when only one is left).
std::vector<double> rebuild(const std::vector<double>& raw, const std::vector<char>& trusted) {
  const int n = static_cast<int>(raw.size());
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (trusted[i]) keep.push_back(i);
  std::vector<double> x(raw.size());
  for (int i = 0; i < n; ++i) {
    if (trusted[i]) {
      x[i] = raw[i];
      continue;
    }
    if (keep.size() == 1) {
      x[i] = raw[keep[0]];
      continue;
    }
    auto right = std::upper_bound(keep.begin(), keep.end(), i);
    if (right == keep.begin()) ++right;
    else if (right == keep.end()) --right;
    const int a = *(right - 1), b = *right;
    x[i] = raw[a] + (raw[b] - raw[a]) * (i - a) / static_cast<double>(b - a);
  }
  return x;
}

}  // namespace

void ScenarioSpec::validate() const {
  if (T < 2) throw Error("scenario: T must be at least 2");
  if (!(dt > 0)) throw Error("scenario: dt must be positive");
  if (vision_d_std < 0 || vision_v_std < 0 || radar_d_std < 0 || radar_v_std < 0)
    throw Error("scenario: noise standard deviations must be non-negative");
  if (dropout < 0 || dropout >= 1 || outlier_rate < 0 || outlier_rate > 1)
    throw Error("scenario: dropout must lie in [0,1) and outlier rate in [0,1]");
  if (ego_speed < 0 || mio_speed < 0) throw Error("scenario: speeds must be non-negative");
  if (initial_gap < 0) throw Error("scenario: initial gap must be non-negative");
  if (trailing_gap.has_value() != trailing_speed.has_value())
    throw Error("scenario: trailing_gap and trailing_speed must be given together");
  if (trailing_gap && *trailing_gap < 0) throw Error("scenario: trailing gap must be non-negative");
}

ScenarioSpec ScenarioSpec::noiseless() const {
  ScenarioSpec s = *this;
  s.vision_d_std = s.vision_v_std = s.radar_d_std = s.radar_v_std = 0.0;
  s.dropout = 0.0;
  s.outlier_rate = 0.0;
  return s;
}

ScenarioSpec mio_minus_10() { return ScenarioSpec{}; }

ScenarioSpec mio_plus_1() {
  ScenarioSpec s;
  s.name = "mio+1";
  s.mio_speed = 28.0;
  s.initial_gap = 40.0;
  s.trailing_speed = 27.0;
  s.trailing_gap = 7.0;
  return s;
}

ScenarioSpec scenario_preset(const std::string& name) {
  if (name == "mio-10") return mio_minus_10();
  if (name == "mio+1") return mio_plus_1();
  throw Error("unknown scenario '" + name + "' (expected mio-10 or mio+1)");
}

Trace synthesize_trace(const ScenarioSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  Trace tr;
  VehicleTrack ego{0.0, spec.ego_speed, 0.0};
  VehicleTrack mio{spec.initial_gap, spec.mio_speed, 0.0};
  const double vstd[4] = {spec.vision_d_std, spec.vision_v_std, spec.vision_d_std, spec.vision_v_std};
  const double rstd[4] = {spec.radar_d_std, spec.radar_v_std, spec.radar_d_std, spec.radar_v_std};
  for (int t = 1; t <= spec.T; ++t) {
    if (t > 1) {
      ego = step_kinematics(ego, spec.dt);
      mio = step_kinematics(mio, spec.dt);
    }
    GroundTruth g;
    g.ego = ego;
    g.mio = mio;
    g.d1 = mio.position - ego.position;
    g.v1 = mio.speed - ego.speed;
    g.d2 = spec.lateral_offset;
    g.v2 = 0.0;
    const double truth[4] = {g.d1, g.v1, g.d2, g.v2};

    // A fixed number of draws per step keeps traces aligned across noise settings.
    double vn[4], rn[4], ou[4], os[4];
    for (double& v : vn) v = gauss(rng);
    for (double& v : rn) v = gauss(rng);
    const double drop = u01(rng);
    for (double& v : ou) v = u01(rng);
    for (double& v : os) v = u01(rng);

    MeasurementFrame f;
    for (int k = 0; k < 4; ++k) {
      double vis = truth[k] + vstd[k] * vn[k];
      if (ou[k] < spec.outlier_rate) vis += (os[k] < 0.5 ? -1.0 : 1.0) * spec.outlier_magnitude * vstd[k];
      f.y(meas::vision_begin + k) = drop < spec.dropout ? kNaN : vis;
      f.y(meas::radar_begin + k) = truth[k] + rstd[k] * rn[k];
    }
    tr.frames.push_back(f);
    tr.truth.push_back(g);
  }
  return tr;
}

Vec4 radar_to_detection(const RadarReturn& r) {
  const double ca = std::cos(r.az) * std::cos(r.al);
  const double sa = std::sin(r.az) * std::cos(r.al);
  return Vec4(r.d * ca, r.v * ca, r.d * sa, r.v * sa);
}

std::vector<double> preprocess_column(std::vector<double> x, const PreprocessOptions& opts) {
  if (opts.window < 1 || opts.threshold < 0) throw Error("preprocess: invalid window or threshold");
  std::vector<char> trusted(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) trusted[i] = std::isfinite(x[i]);
  if (std::none_of(trusted.begin(), trusted.end(), [](char c) { return c; }))
    throw Error("preprocess: column has no finite values");
  // Distrust only ever grows, so this stops after at most n passes.
  std::vector<double> out = rebuild(x, trusted);
  for (;;) {
    const std::vector<char> flag = detect_outliers(out, opts);
    std::vector<char> next = trusted;
    for (std::size_t i = 0; i < x.size(); ++i) next[i] = trusted[i] && !flag[i];
    if (next == trusted || std::none_of(next.begin(), next.end(), [](char c) { return c; })) break;
    trusted = std::move(next);
    out = rebuild(x, trusted);
  }
  return out;
}

std::vector<MeasurementFrame> preprocess(const std::vector<MeasurementFrame>& raw, const PreprocessOptions& opts) {
  std::vector<MeasurementFrame> out = raw;
  for (std::size_t t = 0; t < raw.size(); ++t)
    if (!raw[t].radar().allFinite())
      throw Error("preprocess: radar measurements must be complete (frame " + std::to_string(t + 1) + ")");
  for (int k = 0; k < meas::block; ++k) {
    std::vector<double> col(raw.size());
    for (std::size_t t = 0; t < raw.size(); ++t) col[t] = raw[t].y(meas::vision_begin + k);
    try {
      col = preprocess_column(std::move(col), opts);
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " (vision slot " + std::to_string(k + 1) + ")");
    }
    for (std::size_t t = 0; t < raw.size(); ++t) out[t].y(meas::vision_begin + k) = col[t];
  }
  return out;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << "t,v_d1,v_v1,v_d2,v_v2,r_d1,r_v1,r_d2,r_v2,gt_d1,gt_v1\n";
  for (std::size_t t = 0; t < trace.frames.size(); ++t) {
    os << t + 1;
    for (int k = 0; k < 8; ++k) os << ',' << format_number(trace.frames[t].y(k));
    os << ',' << format_number(trace.truth[t].d1) << ',' << format_number(trace.truth[t].v1) << '\n';
  }
}

Trace read_trace_csv(std::istream& is) {
  Trace tr;
  std::string line;
  if (!std::getline(is, line)) throw Error("trace: empty file");
  const auto header = split_csv(line);
  const std::vector<std::string> expected = {"t",    "v_d1", "v_v1", "v_d2", "v_v2", "r_d1",
                                             "r_v1", "r_d2", "r_v2", "gt_d1", "gt_v1"};
  if (header != expected) throw Error("trace: unexpected header '" + line + "'");
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != expected.size()) throw Error("trace: wrong column count on line " + std::to_string(row));
    MeasurementFrame f;
    GroundTruth g;
    try {
      for (int k = 0; k < 8; ++k) f.y(k) = parse_number(cells[static_cast<std::size_t>(k + 1)]);
      g.d1 = parse_number(cells[9]);
      g.v1 = parse_number(cells[10]);
    } catch (const Error& e) {
      throw Error(std::string("trace: line ") + std::to_string(row) + ": " + e.what());
    }
    tr.frames.push_back(f);
    tr.truth.push_back(g);
  }
  if (tr.frames.empty()) throw Error("trace: no data rows");
  return tr;
}

void write_ground_truth_csv(std::ostream& os, const Trace& trace) {
  os << "t,ego_position,ego_speed,mio_position,mio_speed,gt_d1,gt_v1,gt_d2,gt_v2\n";
  for (std::size_t t = 0; t < trace.truth.size(); ++t) {
    const GroundTruth& g = trace.truth[t];
    os << t + 1 << ',' << format_number(g.ego.position) << ',' << format_number(g.ego.speed) << ','
       << format_number(g.mio.position) << ',' << format_number(g.mio.speed) << ',' << format_number(g.d1) << ','
       << format_number(g.v1) << ',' << format_number(g.d2) << ',' << format_number(g.v2) << '\n';
  }
}

}  // namespace fcw
