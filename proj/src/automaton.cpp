#include "mtlloop/automaton.hpp"

#include <limits>
#include <set>
#include <sstream>

#include "mtlloop/errors.hpp"

namespace mtlloop {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

FormulaPtr SequentialSpec::to_formula() const {
  FormulaPtr f;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    FormulaPtr body = f ? Formula::conjunction(Formula::atom(it->predicate), f) : Formula::atom(it->predicate);
    f = Formula::eventually(it->interval, body);
  }
  for (const auto& s : safety) {
    f = Formula::conjunction(f, Formula::always(s.interval, Formula::negation(Formula::atom(s.predicate))));
  }
  return f;
}

namespace {

void flatten_and(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
  if (f->kind() == Formula::Kind::And) {
    flatten_and(f->child(0), out);
    flatten_and(f->child(1), out);
  } else {
    out.push_back(f);
  }
}

[[noreturn]] void reject(const Formula& f) {
  throw Error("formula outside sequential fragment: " + f.to_string());
}

// F_I(p)  or  F_I(p & <chain>)
void parse_chain(const FormulaPtr& f, std::vector<SequentialSpec::Stage>& out) {
  if (f->kind() != Formula::Kind::Eventually) reject(*f);
  const FormulaPtr& body = f->child(0);
  if (body->kind() == Formula::Kind::Atom) {
    out.push_back({body->atom_name(), f->interval()});
    return;
  }
  if (body->kind() != Formula::Kind::And) reject(*body);
  const FormulaPtr& lhs = body->child(0);
  const FormulaPtr& rhs = body->child(1);
  if (lhs->kind() != Formula::Kind::Atom) reject(*lhs);
  out.push_back({lhs->atom_name(), f->interval()});
  parse_chain(rhs, out);
}

}  // namespace

SequentialSpec parse_sequential(const FormulaPtr& phi) {
  std::vector<FormulaPtr> conjuncts;
  flatten_and(phi, conjuncts);
  SequentialSpec spec;
  bool have_chain = false;
  for (const auto& c : conjuncts) {
    if (c->kind() == Formula::Kind::Always) {
      const FormulaPtr& body = c->child(0);
      if (body->kind() != Formula::Kind::Not || body->child(0)->kind() != Formula::Kind::Atom) reject(*c);
      spec.safety.push_back({body->child(0)->atom_name(), c->interval()});
    } else if (c->kind() == Formula::Kind::Eventually) {
      if (have_chain) reject(*c);  // a single reach chain only
      parse_chain(c, spec.chain);
      have_chain = true;
    } else {
      reject(*c);
    }
  }
  if (!have_chain) throw Error("formula outside sequential fragment: no reach chain");
  return spec;
}

std::shared_ptr<TransitionFormula> TransitionFormula::constant(bool value) {
  auto f = std::make_shared<TransitionFormula>();
  f->kind = value ? Kind::True : Kind::False;
  return f;
}

std::shared_ptr<TransitionFormula> TransitionFormula::loc(std::string name) {
  auto f = std::make_shared<TransitionFormula>();
  f->kind = Kind::Location;
  f->location = std::move(name);
  return f;
}

std::shared_ptr<TransitionFormula> TransitionFormula::clock(std::string relation, Rat bound) {
  auto f = std::make_shared<TransitionFormula>();
  f->kind = Kind::ClockConstraint;
  f->relation = std::move(relation);
  f->bound = bound;
  return f;
}

std::shared_ptr<TransitionFormula> TransitionFormula::reset(std::shared_ptr<TransitionFormula> child) {
  auto f = std::make_shared<TransitionFormula>();
  f->kind = Kind::Reset;
  f->children = {std::move(child)};
  return f;
}

std::shared_ptr<TransitionFormula> TransitionFormula::disj(std::shared_ptr<TransitionFormula> a,
                                                           std::shared_ptr<TransitionFormula> b) {
  auto f = std::make_shared<TransitionFormula>();
  f->kind = Kind::Or;
  f->children = {std::move(a), std::move(b)};
  return f;
}

std::shared_ptr<TransitionFormula> TransitionFormula::conj(std::shared_ptr<TransitionFormula> a,
                                                           std::shared_ptr<TransitionFormula> b) {
  auto f = std::make_shared<TransitionFormula>();
  f->kind = Kind::And;
  f->children = {std::move(a), std::move(b)};
  return f;
}

std::string TransitionFormula::to_string() const {
  switch (kind) {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::Location: return location;
    case Kind::ClockConstraint: return "c " + relation + " " + bound.to_string();
    case Kind::Reset: return "c.(" + children[0]->to_string() + ")";
    case Kind::Or: return "(" + children[0]->to_string() + ") | (" + children[1]->to_string() + ")";
    case Kind::And: return "(" + children[0]->to_string() + ") & (" + children[1]->to_string() + ")";
  }
  return "?";
}

Ocata build_ocata(const SequentialSpec& spec) {
  if (spec.chain.empty()) throw Error("sequential spec with empty chain");
  Ocata aut;
  std::size_t n = spec.chain.size();
  for (std::size_t j = 0; j <= n; ++j) aut.locations.push_back("l" + std::to_string(j));
  bool safety = !spec.safety.empty();
  if (safety) aut.locations.push_back("lsafe");
  aut.initial = "l0";
  aut.accepting.push_back("l" + std::to_string(n));
  if (safety) aut.accepting.push_back("lsafe");

  std::set<std::string> atoms;
  for (const auto& s : spec.chain) atoms.insert(s.predicate);
  for (const auto& s : spec.safety) atoms.insert(s.predicate);
  aut.atoms.assign(atoms.begin(), atoms.end());

  for (std::size_t j = 0; j < n; ++j) {
    const auto& stage = spec.chain[j];
    std::string here = aut.locations[j];
    std::string next = aut.locations[j + 1];
    auto in_window = TransitionFormula::conj(
        TransitionFormula::clock(">=", stage.interval.lo),
        stage.interval.hi ? TransitionFormula::clock("<", *stage.interval.hi) : TransitionFormula::constant(true));
    auto wait = stage.interval.hi ? TransitionFormula::conj(TransitionFormula::clock("<", *stage.interval.hi),
                                                            TransitionFormula::loc(here))
                                  : TransitionFormula::loc(here);
    // predicate true: either fire (reset into the next location) or wait
    aut.transitions.push_back({here, stage.predicate, true,
                               TransitionFormula::disj(
                                   TransitionFormula::conj(in_window, TransitionFormula::reset(TransitionFormula::loc(next))),
                                   wait)});
    aut.transitions.push_back({here, stage.predicate, false, wait});
  }
  // final progress location absorbs everything
  for (const auto& atom : aut.atoms) {
    aut.transitions.push_back({aut.locations[n], atom, true, TransitionFormula::constant(true)});
    aut.transitions.push_back({aut.locations[n], atom, false, TransitionFormula::constant(true)});
  }
  if (safety) {
    for (const auto& s : spec.safety) {
      auto past_deadline = s.interval.hi ? TransitionFormula::conj(TransitionFormula::clock(">=", *s.interval.hi),
                                                                   TransitionFormula::loc("lsafe"))
                                         : TransitionFormula::constant(false);
      aut.transitions.push_back({"lsafe", s.predicate, true, past_deadline});
      aut.transitions.push_back({"lsafe", s.predicate, false, TransitionFormula::loc("lsafe")});
    }
  }
  return aut;
}

std::string Ocata::dump() const {
  std::ostringstream out;
  out << "ocata\n";
  out << "atoms:";
  for (const auto& a : atoms) out << " " << a;
  out << "\nlocations:";
  for (const auto& l : locations) out << " " << l;
  out << "\ninitial: " << initial << "\naccepting:";
  for (const auto& l : accepting) out << " " << l;
  out << "\n";
  for (const auto& e : transitions) {
    out << "delta(" << e.location << ", " << (e.atom_value ? "" : "!") << e.atom << ") = "
        << e.formula->to_string() << "\n";
  }
  return out.str();
}

RunRecord track_location(const SequentialSpec& spec, const TimedTrace& q,
                         const PredicateMap& pmap, const Metric& metric) {
  RunRecord run;
  std::size_t n = spec.chain.size();
  std::size_t n_samples = q.size();
  run.timeline.reserve(n_samples);
  run.step_margins.assign(n_samples, kInf);

  // Earliest-firing deterministic run.
  std::size_t loc = 0;
  Rat entry = q.time(0);
  double min_margin = kInf;
  for (std::size_t k = 0; k < n_samples; ++k) {
    Rat clock = q.time(k) - entry;
    bool fired = true;
    while (fired && loc < n) {
      fired = false;
      const auto& stage = spec.chain[loc];
      clock = q.time(k) - entry;
      double sd = signed_distance(q.state(k), pmap.get(stage.predicate), metric);
      run.step_margins[k] = std::min(run.step_margins[k], std::abs(sd));
      if (sd >= 0.0 && stage.interval.contains(clock)) {
        double slack = stage.interval.hi ? (*stage.interval.hi - clock).to_double() : kInf;
        TransitionEvent ev{k, loc + 1, std::abs(sd), slack, std::min(std::abs(sd), slack)};
        min_margin = std::min(min_margin, ev.margin);
        run.transitions.push_back(ev);
        loc += 1;
        entry = q.time(k);
        fired = true;
      } else if (!run.deadline_violation_step && stage.interval.hi && *stage.interval.hi <= clock) {
        run.deadline_violation_step = k;
      }
    }
    run.timeline.push_back({loc, q.time(k) - entry, entry});
  }
  for (double m : run.step_margins) min_margin = std::min(min_margin, m);
  run.min_transition_margin = min_margin;

  // Acceptance over all admissible firing schedules: per location, the set
  // of achievable entry times.
  std::vector<std::set<Rat>> entries(n + 1);
  entries[0].insert(q.time(0));
  for (std::size_t k = 0; k < n_samples && entries[n].empty(); ++k) {
    // ascending j so a chain of firings within one sample is admitted
    for (std::size_t j = 0; j < n; ++j) {
      const auto& stage = spec.chain[j];
      double sd = signed_distance(q.state(k), pmap.get(stage.predicate), metric);
      if (sd < 0.0) continue;
      for (const Rat& e : entries[j]) {
        if (stage.interval.contains(q.time(k) - e)) {
          entries[j + 1].insert(q.time(k));
          break;
        }
      }
    }
  }
  run.reached_final = !entries[n].empty();

  // Safety monitor: G_I !p conjuncts, windows anchored at t(0).
  for (std::size_t k = 0; k < n_samples; ++k) {
    for (const auto& s : spec.safety) {
      if (!s.interval.contains(q.time(k) - q.time(0))) continue;
      if (pmap.get(s.predicate).contains(q.state(k))) {
        run.safety_violation_steps.push_back(k);
        break;
      }
    }
  }
  run.accepted = run.reached_final && run.safety_violation_steps.empty();
  return run;
}

}  // namespace mtlloop
