#include "mtlloop/cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mtlloop/closed_loop.hpp"
#include "mtlloop/semantics.hpp"
#include "mtlloop/trace_io.hpp"
#include "mtlloop/verifier.hpp"

namespace mtlloop::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct PmapFile {
  PredicateMap pmap;
  Metric metric;
};

Eigen::VectorXd json_vector(const json& j, bool bounds) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (bounds && j[i].is_string()) {
      std::string s = j[i].get<std::string>();
      if (s == "inf") v(static_cast<Eigen::Index>(i)) = std::numeric_limits<double>::infinity();
      else if (s == "-inf") v(static_cast<Eigen::Index>(i)) = -std::numeric_limits<double>::infinity();
      else throw Error("predicate map: bad bound '" + s + "'");
    } else {
      v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
  }
  return v;
}

/// Predicate map file: {"dim": n, "metric": [[...]] (optional, identity
/// default), "predicates": {name: {"type": "halfspace"|"box", ...}}}.
PmapFile load_pmap(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open predicate map file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error("predicate map: " + std::string(e.what()));
  }
  int dim = j.at("dim").get<int>();
  if (dim < 1) throw Error("predicate map: dim must be positive");
  Metric metric = Metric::identity(dim);
  if (j.contains("metric")) {
    const json& mj = j.at("metric");
    Eigen::MatrixXd m(mj.size(), mj.size());
    for (std::size_t r = 0; r < mj.size(); ++r) {
      if (mj[r].size() != mj.size()) throw Error("predicate map: metric must be square");
      for (std::size_t c = 0; c < mj.size(); ++c) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = mj[r][c].get<double>();
      }
    }
    metric = Metric(std::move(m));
    if (metric.dim() != dim) throw Error("predicate map: metric dimension mismatch");
  }
  PredicateMap pmap(dim);
  if (j.contains("predicates")) {
    for (const auto& [name, spec] : j.at("predicates").items()) {
      std::string type = spec.at("type").get<std::string>();
      if (type == "halfspace") {
        pmap.add(AtomicPredicate::halfspace(name, json_vector(spec.at("w"), false), spec.at("c").get<double>()));
      } else if (type == "box") {
        pmap.add(AtomicPredicate::box(name, json_vector(spec.at("lower"), true), json_vector(spec.at("upper"), true)));
      } else {
        throw Error("predicate map: predicate '" + name + "' has unknown type '" + type + "'");
      }
    }
  }
  return PmapFile{std::move(pmap), std::move(metric)};
}

const char* kind_name(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::True: return "True";
    case Formula::Kind::Atom: return "Atom";
    case Formula::Kind::Not: return "Not";
    case Formula::Kind::And: return "And";
    case Formula::Kind::Or: return "Or";
    case Formula::Kind::Until: return "Until";
    case Formula::Kind::Since: return "Since";
    case Formula::Kind::Eventually: return "Eventually";
    case Formula::Kind::Always: return "Always";
    case Formula::Kind::Once: return "Once";
    case Formula::Kind::Historically: return "Historically";
  }
  return "?";
}

void dump_ast(const Formula& f, int depth, std::ostream& out) {
  out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << kind_name(f.kind());
  if (f.kind() == Formula::Kind::Atom) out << " " << f.atom_name();
  if (f.is_temporal()) out << " " << f.interval().to_string();
  out << "\n";
  for (const auto& c : f.children()) dump_ast(*c, depth + 1, out);
}

Eigen::VectorXd parse_x0(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    double v = std::stod(item, &pos);
    while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
    if (pos != item.size()) throw Error("bad x0 entry '" + item + "'");
    values.push_back(v);
  }
  if (values.empty()) throw Error("empty x0 list");
  Eigen::VectorXd x0(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) x0(static_cast<Eigen::Index>(i)) = values[i];
  return x0;
}

std::vector<std::string> numbered(const std::string& prefix, int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int run_parse(const ParseOptions& opt) {
  return guarded([&] {
    PmapFile pf = load_pmap(opt.pmap);
    FormulaPtr f = parse_formula(opt.formula, pf.pmap);
    std::cout << "formula " << f->to_string() << "\n";
    std::cout << "ast:\n";
    dump_ast(*f, 1, std::cout);
    try {
      std::string h = required_horizon(*f).to_string();
      std::cout << "horizon " << h << "\n";
    } catch (const Error&) {
    }
    try {
      std::string l = necessary_length(*f).to_string();
      std::cout << "necessary_length " << l << "\n";
    } catch (const Error&) {
    }
    return 0;
  });
}

int run_monitor(const MonitorOptions& opt) {
  return guarded([&] {
    PmapFile pf = load_pmap(opt.pmap);
    FormulaPtr f = parse_formula(opt.formula, pf.pmap);
    NamedTrace nt = load_trace(opt.trace);
    if (nt.trace.dim() != pf.pmap.dim()) {
      throw DimensionError("trace dimension " + std::to_string(nt.trace.dim()) +
                           " does not match the predicate map dimension " + std::to_string(pf.pmap.dim()));
    }
    if (opt.at >= nt.trace.size()) throw Error("--at index beyond the end of the trace");
    try {
      Rat horizon = required_horizon(*f);
      if (nt.trace.time(nt.trace.size() - 1) - nt.trace.time(opt.at) < horizon) {
        std::cerr << "warning: trace ends before the formula horizon; finite-trace convention applies\n";
      }
    } catch (const Error&) {
    }
    bool sat = eval_boolean(*f, nt.trace, opt.at, pf.pmap, pf.metric);
    std::cout << (sat ? "satisfied" : "violated") << "\n";
    if (opt.robust) {
      std::cout << "robustness " << format_double(eval_robust(*f, nt.trace, opt.at, pf.pmap, pf.metric)) << "\n";
    }
    return sat ? 0 : 1;
  });
}

int run_infer(const InferOptions& opt) {
  return guarded([&] {
    ScenarioConfig scenario = load_scenario(opt.scenario);
    scenario.epsilon = opt.epsilon;
    if (scenario.epsilon < 0) throw Error("epsilon must be nonnegative");
    if (opt.tradeoff) {
      if (*opt.tradeoff != "equal" && *opt.tradeoff != "ratio") throw Error("tradeoff must be 'equal' or 'ratio'");
      scenario.tradeoff = *opt.tradeoff;
    }
    refresh_fingerprint(scenario);

    DemonstrationSet demos = load_demos(opt.demos, scenario);
    Classifier classifier = infer_classifier(demos, scenario);
    RadiiReport radii = compute_radii(classifier, demos, scenario);

    fs::path out_dir = opt.out ? fs::path(*opt.out) : fs::path(opt.scenario).parent_path();
    if (!out_dir.empty()) fs::create_directories(out_dir);
    save_classifier((out_dir / "classifier.txt").string(), classifier);

    std::ostringstream report;
    report << "mtlloop inference report\n";
    report << "fingerprint " << scenario.fingerprint << "\n";
    report << "demos " << demos.demos.size() << "\n";
    report << "epsilon " << format_double(scenario.epsilon) << "\n";
    report << "rho_min " << format_double(radii.rho_min) << "\n";
    report << "margin " << format_double(radii.margin) << "\n";
    report << "alpha " << format_double(radii.alpha) << "\n";
    report << "delta_c " << format_double(radii.delta_c) << "\n";
    report << "delta_e " << format_double(radii.delta_e) << "\n";
    report << "delta_c_only " << format_double(radii.delta_c_only) << "\n";
    report << "delta_e_only " << format_double(radii.delta_e_only) << "\n";
    for (std::size_t loc = 0; loc < classifier.locations.size(); ++loc) {
      report << "location " << loc << " samples " << classifier.sample_counts[loc] << " branches "
             << classifier.locations[loc].size() << "\n";
      for (const Branch& b : classifier.locations[loc]) {
        report << "  " << b.formula->to_string() << " -> input " << b.input << " margin "
               << format_double(b.margin) << "\n";
      }
    }
    if (!classifier.uncovered.empty()) {
      report << "uncovered";
      for (std::size_t loc : classifier.uncovered) report << " " << loc;
      report << "\n";
    }
    write_file_atomic((out_dir / "infer_report.txt").string(), report.str());

    std::cout << "classifier " << (out_dir / "classifier.txt").string() << "\n";
    std::cout << "delta_c " << format_double(radii.delta_c) << "\n";
    std::cout << "delta_e " << format_double(radii.delta_e) << "\n";
    return 0;
  });
}

int run_simulate(const SimulateOptions& opt) {
  return guarded([&] {
    ScenarioConfig scenario = load_scenario(opt.scenario);
    Classifier classifier = load_classifier(opt.classifier, scenario);
    NamedTrace env = load_trace(opt.env);
    if (env.trace.dim() != scenario.h.input_dim()) {
      throw DimensionError("environment trace dimension mismatch");
    }
    TimedTrace h = apply_feature_map(scenario.h, env.trace);
    Eigen::VectorXd x0 = parse_x0(opt.x0);
    if (x0.size() != scenario.sys.state_dim()) throw DimensionError("x0 dimension mismatch");

    double nearest = std::numeric_limits<double>::infinity();
    for (const NominalRun& n : classifier.nominal) {
      nearest = std::min(nearest, scenario.state_metric.dist(x0, n.x0));
    }
    if (!(nearest <= classifier.delta_c)) {
      std::cerr << "warning: x0 outside certified region (distance " << format_double(nearest)
                << " > delta_c " << format_double(classifier.delta_c) << ")\n";
    }

    SimulationResult sim = simulate_closed_loop(scenario, classifier, x0, h);

    fs::path out_dir = opt.out ? fs::path(*opt.out) : fs::path(".");
    fs::create_directories(out_dir);
    save_trace((out_dir / "agent.csv").string(), sim.agent, numbered("x", scenario.sys.state_dim()));
    save_trace((out_dir / "q.csv").string(), sim.q, numbered("q", scenario.q_metric.dim()));
    {
      std::vector<Rat> times(sim.inputs.size());
      Eigen::MatrixXd us(scenario.sys.input_dim(), static_cast<Eigen::Index>(sim.inputs.size()));
      for (std::size_t k = 0; k < sim.inputs.size(); ++k) {
        times[k] = Rat(static_cast<std::int64_t>(k)) * scenario.period;
        us.col(static_cast<Eigen::Index>(k)) = sim.inputs[k];
      }
      save_trace((out_dir / "input.csv").string(), TimedTrace(std::move(times), std::move(us)),
                 numbered("u", scenario.sys.input_dim()));
    }
    {
      // Plot data: suffix robustness and per-step margins.
      std::ostringstream rob;
      rob << "t,robustness\n";
      for (std::size_t k = 0; k < sim.q.size(); ++k) {
        rob << sim.q.time(k).to_string() << ","
            << format_double(eval_robust(*scenario.spec, sim.q, k, scenario.predicates, scenario.q_metric)) << "\n";
      }
      write_file_atomic((out_dir / "robustness.csv").string(), rob.str());
      std::ostringstream mar;
      mar << "t,decision_margin,step_margin\n";
      for (std::size_t k = 0; k < sim.decision_margins.size(); ++k) {
        mar << sim.q.time(k).to_string() << "," << format_double(sim.decision_margins[k]) << ","
            << format_double(sim.run.step_margins[k]) << "\n";
      }
      write_file_atomic((out_dir / "margins.csv").string(), mar.str());
    }

    std::ostringstream report;
    report << "mtlloop simulation report\n";
    report << "verdict " << (sim.satisfied ? "satisfied" : "violated") << "\n";
    report << "robustness " << format_double(sim.robustness) << "\n";
    report << "steps " << sim.inputs.size() << "\n";
    double min_margin = std::numeric_limits<double>::infinity();
    for (double m : sim.decision_margins) min_margin = std::min(min_margin, m);
    report << "min_decision_margin " << format_double(min_margin) << "\n";
    report << "min_transition_margin " << format_double(sim.run.min_transition_margin) << "\n";
    report << "locations";
    for (std::size_t loc : sim.locations) report << " " << loc;
    report << "\n";
    write_file_atomic((out_dir / "sim_report.txt").string(), report.str());

    std::cout << (sim.satisfied ? "satisfied" : "violated") << "\n";
    std::cout << "robustness " << format_double(sim.robustness) << "\n";
    return sim.satisfied ? 0 : 1;
  });
}

int run_verify(const VerifyOptions& opt) {
  return guarded([&] {
    ScenarioConfig scenario = load_scenario(opt.scenario);
    Classifier classifier = load_classifier(opt.classifier, scenario);
    if (opt.radius_scale > 1.0) {
      std::cerr << "warning: radius scale " << format_double(opt.radius_scale)
                << " leaves the certified region\n";
    }
    VerificationProblem problem = make_problem(scenario, classifier, opt.samples, opt.seed, opt.radius_scale);
    VerificationReport report = verify_sampling(problem, classifier, scenario);
    if (!report.counterexample) {
      if (auto cex = falsify(problem, classifier, scenario, 10, 50)) {
        report.verdict = "falsified";
        report.counterexample = std::move(cex);
      }
    }

    fs::path out_dir = opt.out ? fs::path(*opt.out) : fs::path(opt.classifier).parent_path();
    if (!out_dir.empty()) fs::create_directories(out_dir);
    write_file_atomic((out_dir / "verify_report.txt").string(), report_to_text(report, problem));
    if (report.counterexample) {
      const Counterexample& cex = *report.counterexample;
      save_trace((out_dir / "counterexample_h.csv").string(), cex.h,
                 numbered("h", scenario.feature_metric.dim()));
      SimulationResult sim = simulate_closed_loop(scenario, classifier, cex.x0, cex.h);
      save_trace((out_dir / "counterexample_agent.csv").string(), sim.agent,
                 numbered("x", scenario.sys.state_dim()));
    }

    std::cout << report.verdict << "\n";
    std::cout << "min_robustness " << format_double(report.min_robustness) << "\n";
    return report.verdict == "verified-sampled" ? 0 : 1;
  });
}

int main(int argc, char** argv) {
  CLI::App app{"MTL monitoring, classifier inference, closed-loop simulation and verification"};
  app.require_subcommand(1);

  ParseOptions popt;
  CLI::App* parse = app.add_subcommand("parse", "Parse a formula and report its horizon");
  parse->add_option("--formula", popt.formula, "MTL formula text")->required();
  parse->add_option("--pmap", popt.pmap, "predicate map file")->required();

  MonitorOptions mopt;
  CLI::App* monitor = app.add_subcommand("monitor", "Evaluate a formula on a trace");
  monitor->add_option("--formula", mopt.formula, "MTL formula text")->required();
  monitor->add_option("--trace", mopt.trace, "trace CSV file")->required();
  monitor->add_option("--pmap", mopt.pmap, "predicate map file")->required();
  monitor->add_flag("--robust", mopt.robust, "print the robustness value");
  monitor->add_option("--at", mopt.at, "sample index to evaluate at");

  InferOptions iopt;
  CLI::App* infer = app.add_subcommand("infer", "Infer a per-location classifier from demonstrations");
  infer->add_option("--scenario", iopt.scenario, "scenario file")->required();
  infer->add_option("--demos", iopt.demos, "demonstration directory")->required();
  infer->add_option("--epsilon", iopt.epsilon, "input tolerance")->required();
  std::string tradeoff;
  CLI::Option* tr = infer->add_option("--tradeoff", tradeoff, "radius trade-off: equal or ratio");
  std::string infer_out;
  CLI::Option* io = infer->add_option("--out", infer_out, "output directory");

  SimulateOptions sopt;
  CLI::App* simulate = app.add_subcommand("simulate", "Run the classifier in the loop");
  simulate->add_option("--scenario", sopt.scenario, "scenario file")->required();
  simulate->add_option("--classifier", sopt.classifier, "classifier file")->required();
  simulate->add_option("--env", sopt.env, "environment trace CSV")->required();
  simulate->add_option("--x0", sopt.x0, "initial state, comma-separated")->required();
  std::string sim_out;
  CLI::Option* so = simulate->add_option("--out", sim_out, "output directory");

  VerifyOptions vopt;
  CLI::App* verify = app.add_subcommand("verify", "Sampled verification and falsification");
  verify->add_option("--scenario", vopt.scenario, "scenario file")->required();
  verify->add_option("--classifier", vopt.classifier, "classifier file")->required();
  verify->add_option("--samples", vopt.samples, "sample budget")->required();
  verify->add_option("--seed", vopt.seed, "random seed")->required();
  verify->add_option("--radius-scale", vopt.radius_scale, "scale applied to the certified radii");
  std::string verify_out;
  CLI::Option* vo = verify->add_option("--out", verify_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*parse) return run_parse(popt);
  if (*monitor) return run_monitor(mopt);
  if (*infer) {
    if (*tr) iopt.tradeoff = tradeoff;
    if (*io) iopt.out = infer_out;
    return run_infer(iopt);
  }
  if (*simulate) {
    if (*so) sopt.out = sim_out;
    return run_simulate(sopt);
  }
  if (*verify) {
    if (*vo) vopt.out = verify_out;
    return run_verify(vopt);
  }
  return 2;
}

}  // namespace mtlloop::cli
