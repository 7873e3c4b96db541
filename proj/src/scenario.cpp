#include "mtlloop/scenario.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mtlloop/semantics.hpp"
#include "mtlloop/trace_io.hpp"

namespace mtlloop {

namespace {

using nlohmann::json;

Eigen::MatrixXd parse_matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw Error("scenario: " + what + " must be a nonempty array of rows");
  std::size_t cols = j[0].size();
  Eigen::MatrixXd m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (j[r].size() != cols) throw Error("scenario: ragged matrix in " + what);
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
  }
  return m;
}

Eigen::VectorXd parse_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw Error("scenario: " + what + " must be an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

// Bound entries may be numbers or the strings "inf"/"-inf".
Eigen::VectorXd parse_bounds(const json& j, const std::string& what) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].is_string()) {
      std::string s = j[i].get<std::string>();
      if (s == "inf") v(static_cast<Eigen::Index>(i)) = std::numeric_limits<double>::infinity();
      else if (s == "-inf") v(static_cast<Eigen::Index>(i)) = -std::numeric_limits<double>::infinity();
      else throw Error("scenario: bad bound '" + s + "' in " + what);
    } else {
      v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
  }
  return v;
}

std::string fmt_matrix(const Eigen::MatrixXd& m) {
  std::ostringstream out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << format_double(m(r, c)) << ",";
    out << ";";
  }
  return out.str();
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string canonical_fingerprint(const ScenarioConfig& s) {
  std::ostringstream out;
  out << "A=" << fmt_matrix(s.sys.a) << "B=" << fmt_matrix(s.sys.b) << "U=";
  for (const auto& u : s.sys.inputs) out << fmt_matrix(u);
  out << "period=" << s.period.to_string() << "K=" << s.horizon;
  out << "Mx=" << fmt_matrix(s.state_metric.matrix()) << "My=" << fmt_matrix(s.env_metric.matrix())
      << "Mh=" << fmt_matrix(s.feature_metric.matrix()) << "Mq=" << fmt_matrix(s.q_metric.matrix());
  for (const auto& [name, pred] : s.predicates.entries()) {
    out << "pred:" << name << ":";
    if (pred.shape == AtomicPredicate::Shape::Halfspace) out << "hs:" << fmt_matrix(pred.w) << format_double(pred.c);
    else out << "box:" << fmt_matrix(pred.lower) << fmt_matrix(pred.upper);
  }
  out << "spec=" << s.spec_text;
  out << "H=" << fmt_matrix(s.h.c) << fmt_matrix(s.h.d0) << format_double(s.h.lipschitz);
  out << "Q=" << fmt_matrix(s.qhat.c) << fmt_matrix(s.qhat.d0) << format_double(s.lx) << format_double(s.lh);
  out << "D=" << s.history_depth;
  for (const auto& w : s.grid_windows) out << "w=" << w.to_string();
  out << "depth=" << s.grid_max_depth << "eps=" << format_double(s.epsilon)
      << "tradeoff=" << s.tradeoff << format_double(s.tradeoff_ratio);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(out.str())));
  return buf;
}

}  // namespace

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error("scenario: " + std::string(e.what()));
  }

  const json& plant = j.at("plant");
  Eigen::MatrixXd a = parse_matrix(plant.at("A"), "plant.A");
  Eigen::MatrixXd b = parse_matrix(plant.at("B"), "plant.B");
  std::vector<Eigen::VectorXd> inputs;
  for (const auto& u : plant.at("inputs")) inputs.push_back(parse_vector(u, "plant.inputs"));
  LinearSystem sys(std::move(a), std::move(b), std::move(inputs));
  Rat period = Rat::parse(plant.at("period").get<std::string>());
  if (!(Rat(0) < period)) throw Error("scenario: period must be positive");
  std::size_t horizon = plant.at("horizon").get<std::size_t>();
  if (horizon < 1) throw Error("scenario: horizon must be at least 1");

  const json& metrics = j.at("metrics");
  Metric mx(parse_matrix(metrics.at("state"), "metrics.state"));
  Metric my(parse_matrix(metrics.at("env"), "metrics.env"));
  Metric mh(parse_matrix(metrics.at("feature"), "metrics.feature"));
  Metric mq(parse_matrix(metrics.at("q"), "metrics.q"));

  PredicateMap pmap(mq.dim());
  for (const auto& [name, spec] : j.at("predicates").items()) {
    std::string type = spec.at("type").get<std::string>();
    if (type == "halfspace") {
      pmap.add(AtomicPredicate::halfspace(name, parse_vector(spec.at("w"), name), spec.at("c").get<double>()));
    } else if (type == "box") {
      pmap.add(AtomicPredicate::box(name, parse_bounds(spec.at("lower"), name), parse_bounds(spec.at("upper"), name)));
    } else {
      throw Error("scenario: predicate '" + name + "' has unknown type '" + type + "'");
    }
  }

  std::string spec_text = j.at("spec").get<std::string>();
  FormulaPtr spec = parse_formula(spec_text, pmap);
  SequentialSpec seq = parse_sequential(spec);

  const json& maps = j.at("feature_maps");
  const json& hj = maps.at("h");
  FeatureMap h = FeatureMap::affine(parse_matrix(hj.at("C"), "h.C"), parse_vector(hj.at("d"), "h.d"),
                                    hj.at("lipschitz").get<double>());
  const json& qj = maps.at("qhat");
  double lx = qj.at("lx").get<double>();
  double lh = qj.at("lh").get<double>();
  FeatureMap qhat = FeatureMap::affine(parse_matrix(qj.at("C"), "qhat.C"), parse_vector(qj.at("d"), "qhat.d"),
                                       std::max(lx, lh));

  const json& inf = j.at("inference");
  std::vector<Interval> windows;
  for (const auto& w : inf.at("windows")) {
    Rat lo = Rat::parse(w[0].get<std::string>());
    Rat hi = Rat::parse(w[1].get<std::string>());
    windows.emplace_back(lo, hi);
  }
  int max_depth = inf.at("max_depth").get<int>();
  double epsilon = inf.at("epsilon").get<double>();
  std::string tradeoff = inf.value("tradeoff", std::string("equal"));
  double ratio = inf.value("tradeoff_ratio", 1.0);
  if (tradeoff != "equal" && tradeoff != "ratio") throw Error("scenario: tradeoff must be 'equal' or 'ratio'");
  if (epsilon < 0) throw Error("scenario: epsilon must be nonnegative");
  int history_depth = j.at("history_depth").get<int>();
  if (history_depth < 0) throw Error("scenario: history_depth must be nonnegative");

  ScenarioConfig cfg{std::move(sys), period,  horizon, std::move(mx), std::move(my), std::move(mh),
                     std::move(mq),  std::move(pmap), spec_text, spec, seq, std::move(h), std::move(qhat),
                     lx, lh, history_depth, std::move(windows), max_depth, epsilon, tradeoff, ratio, ""};

  // Cross validations.
  if (cfg.h.input_dim() != cfg.env_metric.dim()) throw Error("scenario: H input dimension mismatch with env metric");
  if (cfg.h.output_dim() != cfg.feature_metric.dim()) throw Error("scenario: H output dimension mismatch");
  if (cfg.qhat.input_dim() != cfg.sys.state_dim() + cfg.h.output_dim()) {
    throw Error("scenario: qhat must take the stacked (state, feature) vector");
  }
  if (cfg.qhat.output_dim() != cfg.q_metric.dim()) throw Error("scenario: qhat output dimension mismatch");
  cfg.h.validate_lipschitz(cfg.env_metric, cfg.feature_metric);
  double lx_bound = operator_norm(cfg.qhat.c.leftCols(cfg.sys.state_dim()), cfg.state_metric, cfg.q_metric);
  double lh_bound = operator_norm(cfg.qhat.c.rightCols(cfg.h.output_dim()), cfg.feature_metric, cfg.q_metric);
  if (cfg.lx + 1e-9 < lx_bound) throw Error("scenario: lx below the induced operator norm of the state block");
  if (cfg.lh + 1e-9 < lh_bound) throw Error("scenario: lh below the induced operator norm of the feature block");

  Rat max_window(0);
  for (const auto& w : cfg.grid_windows) {
    if (!w.hi) throw Error("scenario: inference windows must be bounded");
    max_window = max(max_window, *w.hi);
  }
  Rat history_span = Rat(cfg.history_depth) * cfg.period;
  if (history_span < max_window) throw Error("scenario: history_depth * period must cover the largest grid window");
  if (cfg.horizon_time() < required_horizon(*cfg.spec)) {
    throw Error("scenario: horizon shorter than the spec's required horizon");
  }

  cfg.fingerprint = canonical_fingerprint(cfg);
  return cfg;
}

void refresh_fingerprint(ScenarioConfig& cfg) { cfg.fingerprint = canonical_fingerprint(cfg); }

}  // namespace mtlloop
