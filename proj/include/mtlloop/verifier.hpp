#pragma once

#include <optional>

#include "mtlloop/closed_loop.hpp"

namespace mtlloop {

/// Sampled verification domain: metric balls of radius r_init around the
/// demonstration initial states, a per-step feature tube of radius r_tube
/// around each demonstration's feature trace.
struct VerificationProblem {
  double r_init;        // <= delta_c for a certified problem
  double r_tube;        // <= delta_e for a certified problem
  std::size_t horizon;  // plant steps K
  std::size_t samples;  // budget N
  std::uint64_t seed;
  bool certified;  // radii within the classifier's certificate
};

/// Radii = scale * (delta_c, delta_e). scale > 1 leaves the certified region.
VerificationProblem make_problem(const ScenarioConfig& scenario, const Classifier& classifier,
                                 std::size_t samples, std::uint64_t seed, double radius_scale);

struct SampleCertificate {
  std::size_t sample;
  std::size_t demo;
  double rho_run;   // closed-loop robustness
  double m_run;     // min decision margin along the run
  double g_run;     // min transition margin of the automaton run
  double r_cert;    // certified environment-perturbation radius
  bool satisfied;
};

struct Counterexample {
  std::size_t demo;
  Eigen::VectorXd x0;
  TimedTrace h;     // perturbed feature trace fed to the loop
  double rho_run;
  std::string origin;  // "sampling" or "falsification"
};

struct VerificationReport {
  std::string verdict;  // verified-sampled | falsified | inconclusive
  std::size_t samples = 0;
  std::size_t counterexample_count = 0;
  double min_robustness = 0.0;
  double min_r_cert = 0.0;
  double mean_r_cert = 0.0;
  std::vector<SampleCertificate> certificates;
  std::optional<Counterexample> counterexample;  // first violation
  double wall_time_seconds = 0.0;                // never written to report files
};

/// Draw N low-discrepancy samples from ball x tube around the classifier's
/// nominal runs, run the closed loop on each, attach certificates;
/// falsified on any Boolean violation.
VerificationReport verify_sampling(const VerificationProblem& problem, const Classifier& classifier,
                                   const ScenarioConfig& scenario);

/// Coordinate descent on the perturbation parameters minimizing closed-loop
/// robustness, with random restarts. Any counterexample is re-simulated
/// before being returned.
std::optional<Counterexample> falsify(const VerificationProblem& problem, const Classifier& classifier,
                                      const ScenarioConfig& scenario, std::size_t restarts, std::size_t iters);

/// Deterministic report rendering (wall time deliberately omitted).
std::string report_to_text(const VerificationReport& report, const VerificationProblem& problem);

}  // namespace mtlloop
