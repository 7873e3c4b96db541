#include "mtlloop/semantics.hpp"

#include <limits>
#include <unordered_map>

namespace mtlloop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Ctx {
  const TimedTrace& trace;
  const PredicateMap& pmap;
  const Metric& metric;
};

void check_index(const Ctx& ctx, std::size_t k) {
  if (k >= ctx.trace.size()) throw Error("sample index " + std::to_string(k) + " out of range");
}

// Indices k' with t(k') - t(k) in I (future) or t(k) - t(k') in I (past),
// ascending.
std::vector<std::size_t> window(const Ctx& ctx, std::size_t k, const Interval& iv, bool future) {
  std::vector<std::size_t> out;
  const Rat& tk = ctx.trace.time(k);
  for (std::size_t j = 0; j < ctx.trace.size(); ++j) {
    Rat delta = future ? ctx.trace.time(j) - tk : tk - ctx.trace.time(j);
    if (iv.contains(delta)) out.push_back(j);
  }
  return out;
}

bool eval_bool(const Ctx& ctx, const Formula& phi, std::size_t k);

bool bool_until(const Ctx& ctx, const Formula& phi, std::size_t k, bool future) {
  const Formula& lhs = *phi.child(0);
  const Formula& rhs = *phi.child(1);
  for (std::size_t j : window(ctx, k, phi.interval(), future)) {
    if (!eval_bool(ctx, rhs, j)) continue;
    bool all = true;
    std::size_t lo = future ? k : j;
    std::size_t hi = future ? j : k;  // k'' with lo <= k'' < hi
    for (std::size_t m = lo; m < hi && all; ++m) all = eval_bool(ctx, lhs, m);
    if (all) return true;
  }
  return false;
}

bool eval_bool(const Ctx& ctx, const Formula& phi, std::size_t k) {
  switch (phi.kind()) {
    case Formula::Kind::True:
      return true;
    case Formula::Kind::Atom:
      return ctx.pmap.get(phi.atom_name()).contains(ctx.trace.state(k));
    case Formula::Kind::Not:
      return !eval_bool(ctx, *phi.child(0), k);
    case Formula::Kind::And:
      return eval_bool(ctx, *phi.child(0), k) && eval_bool(ctx, *phi.child(1), k);
    case Formula::Kind::Or:
      return eval_bool(ctx, *phi.child(0), k) || eval_bool(ctx, *phi.child(1), k);
    case Formula::Kind::Until:
      return bool_until(ctx, phi, k, true);
    case Formula::Kind::Since:
      return bool_until(ctx, phi, k, false);
    case Formula::Kind::Eventually:
    case Formula::Kind::Once: {
      for (std::size_t j : window(ctx, k, phi.interval(), phi.kind() == Formula::Kind::Eventually)) {
        if (eval_bool(ctx, *phi.child(0), j)) return true;
      }
      return false;
    }
    case Formula::Kind::Always:
    case Formula::Kind::Historically: {
      for (std::size_t j : window(ctx, k, phi.interval(), phi.kind() == Formula::Kind::Always)) {
        if (!eval_bool(ctx, *phi.child(0), j)) return false;
      }
      return true;
    }
  }
  throw Error("unreachable formula kind");
}

struct MemoKey {
  const Formula* node;
  std::size_t k;
  bool operator==(const MemoKey& o) const { return node == o.node && k == o.k; }
};

struct MemoHash {
  std::size_t operator()(const MemoKey& key) const {
    return std::hash<const Formula*>()(key.node) * 1000003u ^ std::hash<std::size_t>()(key.k);
  }
};

using Memo = std::unordered_map<MemoKey, double, MemoHash>;

double eval_rob(const Ctx& ctx, const Formula& phi, std::size_t k, Memo* memo);

double rob_until(const Ctx& ctx, const Formula& phi, std::size_t k, bool future, Memo* memo) {
  const Formula& lhs = *phi.child(0);
  const Formula& rhs = *phi.child(1);
  double best = -kInf;
  for (std::size_t j : window(ctx, k, phi.interval(), future)) {
    double v = eval_rob(ctx, rhs, j, memo);
    std::size_t lo = future ? k : j;
    std::size_t hi = future ? j : k;
    for (std::size_t m = lo; m < hi; ++m) v = std::min(v, eval_rob(ctx, lhs, m, memo));
    best = std::max(best, v);
  }
  return best;
}

double eval_rob(const Ctx& ctx, const Formula& phi, std::size_t k, Memo* memo) {
  MemoKey key{&phi, k};
  if (memo) {
    auto it = memo->find(key);
    if (it != memo->end()) return it->second;
  }
  double value;
  switch (phi.kind()) {
    case Formula::Kind::True:
      value = kInf;
      break;
    case Formula::Kind::Atom:
      value = signed_distance(ctx.trace.state(k), ctx.pmap.get(phi.atom_name()), ctx.metric);
      break;
    case Formula::Kind::Not:
      value = -eval_rob(ctx, *phi.child(0), k, memo);
      break;
    case Formula::Kind::And:
      value = std::min(eval_rob(ctx, *phi.child(0), k, memo), eval_rob(ctx, *phi.child(1), k, memo));
      break;
    case Formula::Kind::Or:
      value = std::max(eval_rob(ctx, *phi.child(0), k, memo), eval_rob(ctx, *phi.child(1), k, memo));
      break;
    case Formula::Kind::Until:
      value = rob_until(ctx, phi, k, true, memo);
      break;
    case Formula::Kind::Since:
      value = rob_until(ctx, phi, k, false, memo);
      break;
    case Formula::Kind::Eventually:
    case Formula::Kind::Once: {
      value = -kInf;
      for (std::size_t j : window(ctx, k, phi.interval(), phi.kind() == Formula::Kind::Eventually)) {
        value = std::max(value, eval_rob(ctx, *phi.child(0), j, memo));
      }
      break;
    }
    case Formula::Kind::Always:
    case Formula::Kind::Historically: {
      value = kInf;
      for (std::size_t j : window(ctx, k, phi.interval(), phi.kind() == Formula::Kind::Always)) {
        value = std::min(value, eval_rob(ctx, *phi.child(0), j, memo));
      }
      break;
    }
    default:
      throw Error("unreachable formula kind");
  }
  if (memo) memo->emplace(key, value);
  return value;
}

// Naive transliteration of the robust semantics; derived operators go
// through their Until/Since expansions.
double oracle(const Ctx& ctx, const Formula& phi, std::size_t k) {
  switch (phi.kind()) {
    case Formula::Kind::True:
      return kInf;
    case Formula::Kind::Atom:
      return signed_distance(ctx.trace.state(k), ctx.pmap.get(phi.atom_name()), ctx.metric);
    case Formula::Kind::Not:
      return -oracle(ctx, *phi.child(0), k);
    case Formula::Kind::And:
      return std::min(oracle(ctx, *phi.child(0), k), oracle(ctx, *phi.child(1), k));
    case Formula::Kind::Or:
      return std::max(oracle(ctx, *phi.child(0), k), oracle(ctx, *phi.child(1), k));
    case Formula::Kind::Until:
    case Formula::Kind::Since: {
      bool future = phi.kind() == Formula::Kind::Until;
      double best = -kInf;
      for (std::size_t j : window(ctx, k, phi.interval(), future)) {
        double v = oracle(ctx, *phi.child(1), j);
        std::size_t lo = future ? k : j;
        std::size_t hi = future ? j : k;
        for (std::size_t m = lo; m < hi; ++m) v = std::min(v, oracle(ctx, *phi.child(0), m));
        best = std::max(best, v);
      }
      return best;
    }
    case Formula::Kind::Eventually:
      return oracle(ctx, *Formula::until(phi.interval(), Formula::make_true(), phi.child(0)), k);
    case Formula::Kind::Once:
      return oracle(ctx, *Formula::since(phi.interval(), Formula::make_true(), phi.child(0)), k);
    case Formula::Kind::Always:
      return -oracle(ctx, *Formula::until(phi.interval(), Formula::make_true(), Formula::negation(phi.child(0))), k);
    case Formula::Kind::Historically:
      return -oracle(ctx, *Formula::since(phi.interval(), Formula::make_true(), Formula::negation(phi.child(0))), k);
  }
  throw Error("unreachable formula kind");
}

}  // namespace

bool eval_boolean(const Formula& phi, const TimedTrace& trace, std::size_t k,
                  const PredicateMap& pmap, const Metric& metric) {
  Ctx ctx{trace, pmap, metric};
  check_index(ctx, k);
  return eval_bool(ctx, phi, k);
}

double eval_robust(const Formula& phi, const TimedTrace& trace, std::size_t k,
                   const PredicateMap& pmap, const Metric& metric) {
  Ctx ctx{trace, pmap, metric};
  check_index(ctx, k);
  Memo memo;
  return eval_rob(ctx, phi, k, &memo);
}

double eval_robust_oracle(const Formula& phi, const TimedTrace& trace, std::size_t k,
                          const PredicateMap& pmap, const Metric& metric) {
  Ctx ctx{trace, pmap, metric};
  check_index(ctx, k);
  return oracle(ctx, phi, k);
}

namespace {

Rat length_rec(const Formula& phi, bool past) {
  switch (phi.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::Atom:
      return Rat(0);
    case Formula::Kind::Not:
      return length_rec(*phi.child(0), past);
    case Formula::Kind::And:
    case Formula::Kind::Or:
      return max(length_rec(*phi.child(0), past), length_rec(*phi.child(1), past));
    default:
      break;
  }
  if (past != phi.is_past()) {
    throw Error(std::string(past ? "future" : "past") + " operator not allowed in " +
                (past ? "necessary_length" : "required_horizon") + ": " + phi.to_string());
  }
  if (!phi.interval().bounded()) throw Error("unbounded interval in " + phi.to_string());
  Rat bound = *phi.interval().hi;
  if (phi.kind() == Formula::Kind::Until || phi.kind() == Formula::Kind::Since) {
    return max(length_rec(*phi.child(0), past), length_rec(*phi.child(1), past)) + bound;
  }
  return length_rec(*phi.child(0), past) + bound;
}

}  // namespace

Rat necessary_length(const Formula& psi) { return length_rec(psi, true); }

Rat required_horizon(const Formula& phi) { return length_rec(phi, false); }

}  // namespace mtlloop
