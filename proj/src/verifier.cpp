#include "mtlloop/verifier.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mtlloop/rng.hpp"
#include "mtlloop/trace_io.hpp"

namespace mtlloop {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd metric_sphere_direction(Rng& rng, const Metric& metric) {
  int d = metric.dim();
  Eigen::VectorXd z(d);
  for (int i = 0; i < d; ++i) z(i) = rng.gaussian();
  double n = z.norm();
  if (n == 0.0) {
    z.setZero();
    z(0) = 1.0;
    n = 1.0;
  }
  Eigen::VectorXd w = z / n;
  return metric.cholesky_factor().transpose().triangularView<Eigen::Upper>().solve(w);
}

struct PerturbedSample {
  Eigen::VectorXd x0;
  TimedTrace h;
  SimulationResult sim;
};

PerturbedSample run_perturbed(const ScenarioConfig& scenario, const Classifier& classifier,
                              const NominalRun& nominal, const Eigen::VectorXd& dx0,
                              const Eigen::MatrixXd& dh) {
  Eigen::VectorXd x0 = nominal.x0 + dx0;
  Eigen::MatrixXd hs = nominal.h.states() + dh;
  TimedTrace h(nominal.h.times(), std::move(hs));
  SimulationResult sim = simulate_closed_loop(scenario, classifier, x0, h);
  return PerturbedSample{std::move(x0), std::move(h), std::move(sim)};
}

double certificate_radius(const SimulationResult& sim, double lh) {
  double m_run = kInf;
  for (double m : sim.decision_margins) m_run = std::min(m_run, m);
  double g_run = sim.run.min_transition_margin;
  double slack = lh > 0.0 ? sim.robustness / lh : kInf;
  return std::max(0.0, std::min({m_run, g_run, slack}));
}

}  // namespace

VerificationProblem make_problem(const ScenarioConfig& scenario, const Classifier& classifier,
                                 std::size_t samples, std::uint64_t seed, double radius_scale) {
  if (samples == 0) throw Error("verification needs a positive sample budget");
  if (radius_scale < 0.0) throw Error("negative radius scale");
  VerificationProblem p;
  p.r_init = radius_scale * classifier.delta_c;
  p.r_tube = radius_scale * classifier.delta_e;
  p.horizon = scenario.horizon;
  p.samples = samples;
  p.seed = seed;
  p.certified = radius_scale <= 1.0;
  return p;
}

VerificationReport verify_sampling(const VerificationProblem& problem, const Classifier& classifier,
                                   const ScenarioConfig& scenario) {
  if (problem.samples == 0) throw Error("verification needs a positive sample budget");
  if (classifier.fingerprint != scenario.fingerprint) {
    throw Error("classifier fingerprint does not match the scenario");
  }
  if (classifier.nominal.empty()) throw Error("classifier carries no nominal runs to verify around");

  VerificationReport report;
  report.min_robustness = kInf;
  report.min_r_cert = kInf;
  double cert_sum = 0.0;
  std::size_t cert_count = 0;
  Rng base(problem.seed);
  int fdim = scenario.feature_metric.dim();

  for (std::size_t s = 0; s < problem.samples; ++s) {
    std::size_t i = s % classifier.nominal.size();
    const NominalRun& demo = classifier.nominal[i];
    Rng rng = base.fork(s);

    // Low-discrepancy radial coordinates, generator-driven directions.
    double rx = problem.r_init *
                std::pow(halton(s, 2), 1.0 / static_cast<double>(scenario.state_metric.dim()));
    double amp = problem.r_tube * halton(s, 3);
    Eigen::VectorXd dx0 = rx == 0.0 ? Eigen::VectorXd::Zero(scenario.state_metric.dim()).eval()
                                    : (rx * metric_sphere_direction(rng, scenario.state_metric)).eval();
    Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(fdim, demo.h.states().cols());
    if (amp > 0.0) {
      for (Eigen::Index col = 0; col < dh.cols(); ++col) {
        dh.col(col) = rng.in_metric_ball(scenario.feature_metric, amp);
      }
    }

    PerturbedSample ps = run_perturbed(scenario, classifier, demo, dx0, dh);
    report.min_robustness = std::min(report.min_robustness, ps.sim.robustness);
    bool violation = !ps.sim.satisfied || ps.sim.robustness < 0.0;
    SampleCertificate cert;
    cert.sample = s;
    cert.demo = i;
    cert.rho_run = ps.sim.robustness;
    cert.m_run = kInf;
    for (double m : ps.sim.decision_margins) cert.m_run = std::min(cert.m_run, m);
    cert.g_run = ps.sim.run.min_transition_margin;
    cert.r_cert = violation ? 0.0 : certificate_radius(ps.sim, scenario.lh);
    cert.satisfied = !violation;
    report.certificates.push_back(cert);

    if (violation) {
      ++report.counterexample_count;
      if (!report.counterexample) {
        report.counterexample = Counterexample{i, ps.x0, ps.h, ps.sim.robustness, "sampling"};
      }
    } else {
      report.min_r_cert = std::min(report.min_r_cert, cert.r_cert);
      cert_sum += cert.r_cert;
      ++cert_count;
    }
    ++report.samples;
  }

  if (cert_count == 0) report.min_r_cert = 0.0;
  report.mean_r_cert = cert_count ? cert_sum / static_cast<double>(cert_count) : 0.0;
  report.verdict = report.counterexample_count > 0 ? "falsified" : "verified-sampled";
  return report;
}

std::optional<Counterexample> falsify(const VerificationProblem& problem, const Classifier& classifier,
                                      const ScenarioConfig& scenario, std::size_t restarts, std::size_t iters) {
  if (problem.samples == 0) throw Error("verification needs a positive sample budget");
  if (classifier.fingerprint != scenario.fingerprint) {
    throw Error("classifier fingerprint does not match the scenario");
  }
  if (classifier.nominal.empty()) throw Error("classifier carries no nominal runs to search around");

  int sdim = scenario.state_metric.dim();
  int fdim = scenario.feature_metric.dim();
  Rng base(problem.seed ^ 0x66616c73ull);  // separate stream from verify_sampling

  for (std::size_t r = 0; r < restarts; ++r) {
    std::size_t i = r % classifier.nominal.size();
    const NominalRun& demo = classifier.nominal[i];
    Eigen::Index cols = demo.h.states().cols();
    Rng rng = base.fork(r);

    Eigen::VectorXd dx0 = Eigen::VectorXd::Zero(sdim);
    Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(fdim, cols);
    if (r > 0) {
      // Restart 0 probes the unperturbed point; later restarts start random.
      dx0 = rng.in_metric_ball(scenario.state_metric, problem.r_init);
      for (Eigen::Index col = 0; col < cols; ++col) {
        dh.col(col) = rng.in_metric_ball(scenario.feature_metric, problem.r_tube);
      }
    }

    auto project = [&](Eigen::VectorXd& x, const Metric& metric, double radius) {
      double n = metric.norm(x);
      if (n > radius) x *= radius == 0.0 ? 0.0 : radius / n;
    };
    auto objective = [&](const Eigen::VectorXd& a, const Eigen::MatrixXd& b) {
      return run_perturbed(scenario, classifier, demo, a, b).sim.robustness;
    };

    double best = objective(dx0, dh);
    double step = 0.5 * std::max(problem.r_init, problem.r_tube);
    for (std::size_t it = 0; it < iters && best >= 0.0 && step > 0.0; ++it) {
      for (int c = 0; c < sdim && best >= 0.0; ++c) {
        for (double sign : {1.0, -1.0}) {
          Eigen::VectorXd cand = dx0;
          cand(c) += sign * step;
          project(cand, scenario.state_metric, problem.r_init);
          double rho = objective(cand, dh);
          if (rho < best) {
            best = rho;
            dx0 = cand;
          }
        }
      }
      for (Eigen::Index col = 0; col < cols && best >= 0.0; ++col) {
        for (int c = 0; c < fdim; ++c) {
          for (double sign : {1.0, -1.0}) {
            Eigen::MatrixXd cand = dh;
            cand(c, col) += sign * step;
            Eigen::VectorXd column = cand.col(col);
            project(column, scenario.feature_metric, problem.r_tube);
            cand.col(col) = column;
            double rho = objective(dx0, cand);
            if (rho < best) {
              best = rho;
              dh = cand;
            }
          }
        }
      }
      step *= 0.7;
    }

    if (best < 0.0) {
      // Independent re-simulation before trusting the search.
      PerturbedSample ps = run_perturbed(scenario, classifier, demo, dx0, dh);
      if (!ps.sim.satisfied) {
        return Counterexample{i, ps.x0, ps.h, ps.sim.robustness, "falsification"};
      }
    }
  }
  return std::nullopt;
}

std::string report_to_text(const VerificationReport& report, const VerificationProblem& problem) {
  std::ostringstream out;
  out << "mtlloop verification report\n";
  out << "verdict " << report.verdict << "\n";
  out << "r_init " << format_double(problem.r_init) << "\n";
  out << "r_tube " << format_double(problem.r_tube) << "\n";
  out << "certified " << (problem.certified ? 1 : 0) << "\n";
  out << "seed " << problem.seed << "\n";
  out << "samples " << report.samples << "\n";
  out << "counterexamples " << report.counterexample_count << "\n";
  out << "min_robustness " << format_double(report.min_robustness) << "\n";
  out << "min_r_cert " << format_double(report.min_r_cert) << "\n";
  out << "mean_r_cert " << format_double(report.mean_r_cert) << "\n";
  for (const SampleCertificate& c : report.certificates) {
    out << "sample " << c.sample << " demo " << c.demo << " rho " << format_double(c.rho_run) << " m "
        << format_double(c.m_run) << " g " << format_double(c.g_run) << " r_cert " << format_double(c.r_cert)
        << " satisfied " << (c.satisfied ? 1 : 0) << "\n";
  }
  if (report.counterexample) {
    out << "counterexample demo " << report.counterexample->demo << " origin " << report.counterexample->origin
        << " rho " << format_double(report.counterexample->rho_run) << "\n";
  }
  return out.str();
}

}  // namespace mtlloop
