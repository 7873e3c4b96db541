#include <fstream>
#include <sstream>

#include "mtlloop/inference.hpp"
#include "mtlloop/parser.hpp"
#include "mtlloop/trace_io.hpp"

namespace mtlloop {

namespace {

std::string format_vector(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v(i));
  }
  return out;
}

// Decompose a branch formula (left-assoc conjunction of possibly negated
// Once/Historically atoms, or bare true) back into its path.
void formula_to_path(const FormulaPtr& f, const PredicateMap& preds,
                     std::vector<std::pair<Primitive, bool>>& path) {
  if (f->kind() == Formula::Kind::True) return;
  if (f->kind() == Formula::Kind::And) {
    formula_to_path(f->child(0), preds, path);
    formula_to_path(f->child(1), preds, path);
    return;
  }
  bool negated = false;
  FormulaPtr node = f;
  if (node->kind() == Formula::Kind::Not) {
    negated = true;
    node = node->child(0);
  }
  if (node->kind() != Formula::Kind::Once && node->kind() != Formula::Kind::Historically) {
    throw Error("classifier file: branch formula is not a conjunction of windowed comparisons: " + f->to_string());
  }
  if (node->child(0)->kind() != Formula::Kind::Atom) {
    throw Error("classifier file: expected an atom under the temporal operator in " + f->to_string());
  }
  const AtomicPredicate& pred = preds.get(node->child(0)->atom_name());
  if (pred.shape != AtomicPredicate::Shape::Halfspace) {
    throw Error("classifier file: atom '" + pred.name + "' is not a halfspace");
  }
  int feature = -1;
  for (Eigen::Index i = 0; i < pred.w.size(); ++i) {
    if (pred.w(i) != 0.0) {
      if (feature >= 0) throw Error("classifier file: atom '" + pred.name + "' touches several features");
      feature = static_cast<int>(i);
    }
  }
  double coef = pred.w(feature);
  if (coef != 1.0 && coef != -1.0) {
    throw Error("classifier file: atom '" + pred.name + "' has a non-unit coefficient");
  }
  Primitive p;
  p.feature = feature;
  p.op = node->kind() == Formula::Kind::Once ? Primitive::Op::Once : Primitive::Op::Historically;
  p.cmp = coef > 0.0 ? Primitive::Cmp::Ge : Primitive::Cmp::Le;
  p.window = node->interval();
  p.threshold = coef > 0.0 ? pred.c : -pred.c;
  path.emplace_back(p, negated);
}

// A branch set is a structural partition when the paths form a complete
// binary tree: every node splits on one primitive with both signs present.
bool paths_form_tree(std::vector<std::vector<std::pair<Primitive, bool>>> paths) {
  if (paths.size() == 1 && paths[0].empty()) return true;
  std::vector<std::vector<std::pair<Primitive, bool>>> pos, neg;
  const Primitive* root = nullptr;
  for (auto& path : paths) {
    if (path.empty()) return false;
    if (!root) root = &path.front().first;
    else if (!(path.front().first == *root)) return false;
    auto& side = path.front().second ? neg : pos;
    side.emplace_back(path.begin() + 1, path.end());
  }
  if (pos.empty() || neg.empty()) return false;
  return paths_form_tree(std::move(pos)) && paths_form_tree(std::move(neg));
}

}  // namespace

std::string classifier_to_text(const Classifier& c) {
  std::ostringstream out;
  out << "mtlloop classifier v1\n";
  out << "fingerprint " << c.fingerprint << "\n";
  out << "spec " << c.spec_text << "\n";
  out << "epsilon " << format_double(c.epsilon) << "\n";
  out << "delta_c " << format_double(c.delta_c) << "\n";
  out << "delta_e " << format_double(c.delta_e) << "\n";
  out << "margin " << format_double(c.margin) << "\n";
  out << "rho_min " << format_double(c.rho_min) << "\n";
  out << "feature_dim " << c.feature_predicates.dim() << "\n";
  out << "atoms " << c.primitives.size() << "\n";
  for (std::size_t i = 0; i < c.primitives.size(); ++i) {
    const Primitive& p = c.primitives[i];
    out << "p" << i << " feature " << p.feature << " " << (p.cmp == Primitive::Cmp::Ge ? ">=" : "<=")
        << " " << format_double(p.threshold) << "\n";
  }
  out << "locations " << c.locations.size() << "\n";
  for (std::size_t loc = 0; loc < c.locations.size(); ++loc) {
    out << "location " << loc << " samples " << c.sample_counts[loc] << " branches "
        << c.locations[loc].size() << "\n";
    for (const Branch& b : c.locations[loc]) {
      out << "branch input " << b.input << " margin " << format_double(b.margin) << " formula "
          << b.formula->to_string() << "\n";
    }
  }
  out << "nominal " << c.nominal.size() << "\n";
  for (const NominalRun& n : c.nominal) {
    out << "x0 " << format_vector(n.x0) << "\n";
    out << "h " << n.h.size() << "\n";
    for (std::size_t k = 0; k < n.h.size(); ++k) {
      out << n.h.time(k).to_string() << " " << format_vector(n.h.state(k)) << "\n";
    }
  }
  return out.str();
}

void save_classifier(const std::string& path, const Classifier& c) {
  write_file_atomic(path, classifier_to_text(c));
}

Classifier load_classifier(const std::string& path, const ScenarioConfig& scenario) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open classifier file '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() {
    if (!std::getline(in, line)) throw Error(path + ": unexpected end of classifier file");
    ++lineno;
    return std::istringstream(line);
  };
  auto fail = [&](const std::string& msg) -> Error {
    return Error(path + ":" + std::to_string(lineno) + ": " + msg);
  };

  next();
  if (line != "mtlloop classifier v1") throw fail("not a classifier file (bad header)");

  auto field = [&](const std::string& key) {
    auto s = next();
    std::string k;
    s >> k;
    if (k != key) throw fail("expected '" + key + "', got '" + k + "'");
    std::string rest;
    std::getline(s, rest);
    if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
    return rest;
  };

  std::string fingerprint = field("fingerprint");
  if (fingerprint != scenario.fingerprint) {
    throw Error(path + ": classifier fingerprint " + fingerprint + " does not match the scenario (" +
                scenario.fingerprint + ")");
  }

  Classifier c(scenario.feature_metric.dim());
  c.fingerprint = fingerprint;
  c.spec_text = field("spec");
  if (c.spec_text != scenario.spec_text) {
    throw Error(path + ": classifier spec does not match the scenario spec");
  }
  c.epsilon = std::stod(field("epsilon"));
  c.delta_c = std::stod(field("delta_c"));
  c.delta_e = std::stod(field("delta_e"));
  c.margin = std::stod(field("margin"));
  c.rho_min = std::stod(field("rho_min"));
  int feature_dim = std::stoi(field("feature_dim"));
  if (feature_dim != scenario.feature_metric.dim()) {
    throw Error(path + ": classifier feature dimension " + std::to_string(feature_dim) +
                " does not match the scenario (" + std::to_string(scenario.feature_metric.dim()) + ")");
  }

  std::size_t n_atoms = std::stoul(field("atoms"));
  for (std::size_t i = 0; i < n_atoms; ++i) {
    auto s = next();
    std::string name, kw, cmp;
    int feature;
    double threshold;
    s >> name >> kw >> feature >> cmp >> threshold;
    if (!s || kw != "feature" || (cmp != ">=" && cmp != "<=") || name != "p" + std::to_string(i)) {
      throw fail("malformed atom line");
    }
    if (feature < 0 || feature >= feature_dim) throw fail("feature index out of range");
    Primitive p;
    p.feature = feature;
    p.op = Primitive::Op::Once;
    p.cmp = cmp == ">=" ? Primitive::Cmp::Ge : Primitive::Cmp::Le;
    p.threshold = threshold;
    if (c.atom_for(p) != name) throw fail("duplicate atom definition");
  }

  std::size_t n_locations = std::stoul(field("locations"));
  if (n_locations != scenario.seq.chain.size() + 1) {
    throw Error(path + ": classifier has " + std::to_string(n_locations) +
                " locations but the spec chain needs " + std::to_string(scenario.seq.chain.size() + 1));
  }
  c.locations.resize(n_locations);
  c.sample_counts.resize(n_locations, 0);
  c.exclusivity_structural = true;
  for (std::size_t loc = 0; loc < n_locations; ++loc) {
    auto s = next();
    std::string kw1, kw2, kw3;
    std::size_t index, samples, branches;
    s >> kw1 >> index >> kw2 >> samples >> kw3 >> branches;
    if (!s || kw1 != "location" || index != loc || kw2 != "samples" || kw3 != "branches") {
      throw fail("malformed location line");
    }
    c.sample_counts[loc] = samples;
    std::vector<std::vector<std::pair<Primitive, bool>>> paths;
    for (std::size_t b = 0; b < branches; ++b) {
      auto bs = next();
      std::string kb, ki, km, kf, margin_text;
      std::size_t input;
      bs >> kb >> ki >> input >> km >> margin_text >> kf;
      if (!bs || kb != "branch" || ki != "input" || km != "margin" || kf != "formula") {
        throw fail("malformed branch line");
      }
      double margin = std::stod(margin_text);  // handles "inf"
      if (input >= scenario.sys.inputs.size()) throw fail("branch input index out of range");
      std::string text;
      std::getline(bs, text);
      if (!text.empty() && text.front() == ' ') text.erase(0, 1);
      Branch branch;
      branch.input = input;
      branch.margin = margin;
      try {
        branch.formula = parse_formula(text, c.feature_predicates);
      } catch (const ParseError& e) {
        throw fail(std::string("branch formula: ") + e.what());
      }
      formula_to_path(branch.formula, c.feature_predicates, branch.path);
      paths.push_back(branch.path);
      c.locations[loc].push_back(std::move(branch));
    }
    if (!c.locations[loc].empty() && !paths_form_tree(std::move(paths))) {
      c.exclusivity_structural = false;
    }
    if (c.locations[loc].empty()) c.uncovered.push_back(loc);
  }

  std::size_t n_nominal = std::stoul(field("nominal"));
  int sdim = scenario.sys.state_dim();
  for (std::size_t n = 0; n < n_nominal; ++n) {
    auto xs = next();
    std::string kw;
    xs >> kw;
    if (kw != "x0") throw fail("expected 'x0'");
    Eigen::VectorXd x0(sdim);
    for (int i = 0; i < sdim; ++i) {
      if (!(xs >> x0(i))) throw fail("truncated x0 line");
    }
    std::size_t count = std::stoul(field("h"));
    std::vector<Rat> times;
    Eigen::MatrixXd hs(feature_dim, static_cast<Eigen::Index>(count));
    for (std::size_t k = 0; k < count; ++k) {
      auto hsr = next();
      std::string t;
      hsr >> t;
      times.push_back(Rat::parse(t));
      for (int i = 0; i < feature_dim; ++i) {
        if (!(hsr >> hs(i, static_cast<Eigen::Index>(k)))) throw fail("truncated feature sample");
      }
    }
    c.nominal.push_back(NominalRun{std::move(x0), TimedTrace(std::move(times), std::move(hs))});
  }
  return c;
}

}  // namespace mtlloop
