#include "banditlc/oracle.hpp"

#include "banditlc/codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

#include <boost/math/quadrature/exp_sinh.hpp>

namespace banditlc {

namespace {
constexpr double kLn2 = 0.6931471805599453;
constexpr double kDistortionPinTol = 1e-9;
}  // namespace

namespace {

// P[J > k] = (1-p)^k, evaluated in log space so huge k stays exact.
inline double geometric_survivor(double k, double log1mp) { return std::exp(k * log1mp); }

// Tail majorant: for j >= J*, log2 j <= log2 J* + (j - J*)/(J* ln 2), so
//   sum_{j > J*} (1-p)^{j-1} p log2 j
//     <= (1-p)^{J*} (log2 J* + 1/(p J* ln 2)).
inline double series_tail_majorant(double j, double p, double log1mp) {
  return geometric_survivor(j, log1mp) * (std::log2(j) + 1.0 / (p * j * kLn2));
}

}  // namespace

namespace {

// Certified evaluation of sum_{j=1}^{cap} (1-p)^{j-1} p log2 j to within
// `tol` (reported via bound_out). cap = 0 means the full series; the range
// beyond the chosen endpoint then enters the bound through the majorant.
double geometric_log2_partial(double p, double cap, double tol,
                              std::uint64_t* truncation_index, double* bound_out) {
  const double q = 1.0 - p;
  const double log1mp = std::log1p(-p);

  // exact head: term-by-term up to a work cap
  constexpr double kHeadCap = 100000.0;
  double weight = p;  // (1-p)^{j-1} p
  double sum = 0.0;   // j = 1 contributes zero
  double j = 1.0;
  while (true) {
    if (cap > 0.0 && j >= cap) {
      if (truncation_index) *truncation_index = static_cast<std::uint64_t>(j);
      if (bound_out) *bound_out = 0.0;
      return sum;
    }
    if (cap == 0.0) {
      const double tail = series_tail_majorant(j, p, log1mp);
      if (tail <= tol) {
        if (truncation_index) *truncation_index = static_cast<std::uint64_t>(j);
        if (bound_out) *bound_out = tail;
        return sum;
      }
    }
    if (j >= kHeadCap) break;
    ++j;
    weight *= q;
    sum += weight * std::log2(j);
  }

  // Bracket the remaining sum over (j, M] with certified bounds per index
  // interval. Both use exact closed-form range moments of the geometric
  // law; log2 concavity gives
  //   chord through the endpoints  <=  log2  <=  tangent (Jensen at the
  //   conditional mean),
  // so each interval contributes exact lower/upper values and the bracket
  // tightens second-order under splitting.
  double m_end;
  double beyond = 0.0;
  if (cap > 0.0) {
    m_end = cap;
  } else {
    m_end = j + 2.0;
    while (series_tail_majorant(m_end, p, log1mp) > tol * 0.5) m_end *= 2.0;
    beyond = series_tail_majorant(m_end, p, log1mp);
  }

  struct Interval {
    double lo, hi;       // indices (lo, hi]
    double mass, mean;   // P[lo < J <= hi], E[J | lo < J <= hi]
    double lower, upper; // certified contribution bounds
    double gap() const { return upper - lower; }
  };
  // Survivor-difference forms via expm1 so small-p intervals do not cancel:
  //   mass      = q^lo (1 - q^(hi-lo))
  //   E[J; >n]  = q^n (n + 1/p)  =>  mean = hi + 1/p - (lo - hi)/expm1(...)
  auto make_interval = [&](double lo, double hi) {
    Interval iv;
    iv.lo = lo;
    iv.hi = hi;
    const double em = std::expm1((hi - lo) * log1mp);  // q^(hi-lo) - 1 < 0
    iv.mass = geometric_survivor(lo, log1mp) * -em;
    if (iv.mass <= 0.0) {
      iv.mean = hi;
      iv.lower = iv.upper = 0.0;
      return iv;
    }
    iv.mean = std::min(std::max(hi + 1.0 / p - (lo - hi) / em, lo + 1.0), hi);
    const double a = lo + 1.0;
    if (hi <= a) {
      iv.lower = iv.upper = iv.mass * std::log2(hi);
      return iv;
    }
    const double slope = (std::log2(hi) - std::log2(a)) / (hi - a);
    iv.lower = iv.mass * (std::log2(a) + (iv.mean - a) * slope);
    iv.upper = iv.mass * std::log2(iv.mean);
    return iv;
  };

  auto by_gap = [](const Interval& a, const Interval& b) { return a.gap() < b.gap(); };
  std::priority_queue<Interval, std::vector<Interval>, decltype(by_gap)> heap(by_gap);
  heap.push(make_interval(j, m_end));
  double total_gap = heap.top().gap();
  const double budget = tol * 0.5;
  constexpr std::size_t kIntervalCap = 4'000'000;
  while (total_gap > budget && heap.size() < kIntervalCap) {
    const Interval top = heap.top();
    if (top.hi - top.lo < 2.0 || top.gap() <= 0.0) break;
    heap.pop();
    total_gap -= top.gap();
    // split at the geometric midpoint to keep interval ratios balanced
    double mid = std::floor(std::sqrt((top.lo + 1.0) * top.hi));
    mid = std::min(std::max(mid, top.lo + 1.0), top.hi - 1.0);
    for (const Interval& part : {make_interval(top.lo, mid), make_interval(mid, top.hi)}) {
      heap.push(part);
      total_gap += part.gap();
    }
  }
  double lower = 0.0, upper = 0.0;
  while (!heap.empty()) {
    lower += heap.top().lower;
    upper += heap.top().upper;
    heap.pop();
  }
  sum += 0.5 * (lower + upper);
  if (truncation_index) {
    *truncation_index =
        static_cast<std::uint64_t>(std::min(m_end, static_cast<double>(UINT64_MAX)));
  }
  if (bound_out) *bound_out = 0.5 * (upper - lower) + beyond;
  return sum;
}

}  // namespace

double expected_bits_given_x(double p, double tol, std::uint64_t* truncation_index,
                             double* tail_bound) {
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("expected_bits_given_x: p not in (0,1]");
  if (p == 1.0) {
    if (truncation_index) *truncation_index = 1;
    if (tail_bound) *tail_bound = 0.0;
    return 0.0;
  }
  return geometric_log2_partial(p, 0.0, tol, truncation_index, tail_bound);
}

double expected_bits_given_x_truncated(double p, std::uint64_t j_max, double escape_cost,
                                       double tol) {
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("expected_bits_given_x_truncated: p not in [0,1]");
  }
  if (j_max < 1) throw std::invalid_argument("expected_bits_given_x_truncated: j_max < 1");
  if (p == 0.0) return escape_cost;
  if (p == 1.0) return 0.0;
  const double cap = static_cast<double>(j_max);
  const double survivor = geometric_survivor(cap, std::log1p(-p));
  return geometric_log2_partial(p, cap, tol, nullptr, nullptr) + survivor * escape_cost;
}

double expected_log_given_x_integral(double p) {
  if (!(p > 0.0) || p > 1.0) {
    throw std::invalid_argument("expected_log_given_x_integral: p not in (0,1]");
  }
  if (p == 1.0) return 0.0;
  const double q = 1.0 - p;
  auto f = [q](double t) {
    const double et = std::exp(-t);
    const double one_m_et = -std::expm1(-t);  // 1 - e^-t without cancellation
    const double val = et * q * one_m_et / (1.0 - q * et);
    return t > 0.0 ? val / t : q / (1.0 - q);  // removable singularity at 0
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(f, 1e-12);
}

namespace {

// Visits (weight, p(x,Q)) for every x; huge product alphabets reduce to
// x-types (weight = iid type weight) when the shape allows it.
template <typename Fn>
void for_each_source_match(const ReconDistribution& q, const SourceModel& source,
                           const DistortionSpec& spec, Fn&& fn) {
  if (source.enumerable()) {
    if (source.alphabet_size() != spec.x_size()) {
      throw std::invalid_argument("expected_bits: X alphabet mismatch");
    }
    for (Symbol x = 0; x < source.alphabet_size(); ++x) {
      fn(source.pmf(x), match_probability(q, x, spec));
    }
    return;
  }
  const auto& ps = source.product_structure();
  if (!ps || !spec.additive_form() || !q.is_memoryless()) {
    throw std::length_error("expected_bits: X too large without a type reduction");
  }
  TypeEnumeration types(spec.length(), spec.u_size());
  for (std::size_t j = 0; j < types.count(); ++j) {
    std::vector<int> digits;
    for (int u = 0; u < spec.u_size(); ++u) {
      digits.insert(digits.end(), types.at(j).counts[u], u);
    }
    const Symbol x = symbol_from_digits(digits, spec.u_size());
    fn(iid_type_weight(ps->per_symbol_pmf, types.at(j)), match_probability(q, x, spec));
  }
}

}  // namespace

namespace {

// Per-x series tolerance: tol / (N w) keeps sum_x w_x tol_x = tol exactly,
// so light-weight symbols get cheap loose brackets without costing the
// certified aggregate bound anything.
double weighted_tolerance(double tol, std::size_t n_positive, double weight) {
  return std::min(tol / (static_cast<double>(n_positive) * weight), 1e6);
}

}  // namespace

CostReport expected_bits(const ReconDistribution& q, const SourceModel& source,
                         const DistortionSpec& spec, double tol) {
  std::vector<std::pair<double, double>> weights_probs;
  for_each_source_match(q, source, spec,
                        [&](double w, double p) { weights_probs.emplace_back(w, p); });
  std::size_t n_positive = 0;
  for (const auto& [w, p] : weights_probs) n_positive += w > 0.0 ? 1 : 0;

  CostReport report;
  report.per_x.reserve(weights_probs.size());
  double avg = 0.0, tail_sum = 0.0;
  std::uint64_t trunc_max = 0;
  for (const auto& [weight, p] : weights_probs) {
    if (p <= 0.0) {
      if (weight > 0.0) {
        throw std::domain_error("expected_bits: zero match probability for a supported x");
      }
      report.per_x.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    if (weight == 0.0) {
      report.per_x.push_back(expected_bits_given_x(p, 1e-6));
      continue;
    }
    std::uint64_t trunc = 0;
    double tail = 0.0;
    const double b =
        expected_bits_given_x(p, weighted_tolerance(tol, n_positive, weight), &trunc, &tail);
    report.per_x.push_back(b);
    avg += weight * b;
    tail_sum += weight * tail;
    trunc_max = std::max(trunc_max, trunc);
  }
  report.average = avg;
  report.tail_bound = tail_sum;
  report.truncation_index = trunc_max;
  return report;
}

CostReport expected_bits_truncated(const ReconDistribution& q, const SourceModel& source,
                                   const DistortionSpec& spec, std::uint64_t j_max, double tol) {
  const double escape = escape_cost_bits(j_max, raw_symbol_bits(spec));
  std::vector<std::pair<double, double>> weights_probs;
  for_each_source_match(q, source, spec,
                        [&](double w, double p) { weights_probs.emplace_back(w, p); });
  std::size_t n_positive = 0;
  for (const auto& [w, p] : weights_probs) n_positive += w > 0.0 ? 1 : 0;

  CostReport report;
  report.truncation_index = j_max;
  report.per_x.reserve(weights_probs.size());
  double avg = 0.0;
  for (const auto& [weight, p] : weights_probs) {
    const double tol_x =
        weight > 0.0 ? weighted_tolerance(tol, n_positive, weight) : 1e-6;
    const double b = expected_bits_given_x_truncated(p, j_max, escape, tol_x);
    report.per_x.push_back(b);
    if (weight > 0.0) {
      avg += weight * b;
      report.tail_bound += weight * tol_x;
    }
  }
  report.average = avg;
  return report;
}

double expected_bits_lower_bound(const ReconDistribution& q, const SourceModel& source,
                                 const DistortionSpec& spec) {
  double lb = 0.0;
  bool unbounded = false;
  for_each_source_match(q, source, spec, [&](double weight, double p) {
    if (weight == 0.0) return;
    if (p <= 0.0) {
      unbounded = true;
      return;
    }
    if (p >= 1.0) return;
    // E[log2 J] >= E[floor(log2 J)] = sum_k P[J >= 2^k], within 1 bit
    const double log1mp = std::log1p(-p);
    double acc = 0.0;
    for (double pow2 = 2.0; pow2 < 1e300; pow2 *= 2.0) {
      const double term = std::exp((pow2 - 1.0) * log1mp);
      acc += term;
      if (term < 1e-12) break;
    }
    lb += weight * acc;
  });
  return unbounded ? std::numeric_limits<double>::infinity() : lb;
}

GapReport optimal_action_and_gaps(const std::vector<ReconDistribution>& arms,
                                  const SourceModel& source, const DistortionSpec& spec,
                                  double tol, std::optional<std::uint64_t> escape_j_max) {
  if (arms.empty()) throw std::invalid_argument("optimal_action_and_gaps: no arms");
  GapReport g;
  g.cost.reserve(arms.size());
  g.eta = std::numeric_limits<double>::infinity();
  for (const auto& arm : arms) {
    const MinMatchResult mm = min_match_probability(arm, spec);
    g.eta = std::min(g.eta, mm.value);
    g.eta_has_zero = g.eta_has_zero || mm.has_zero;
    if (escape_j_max) {
      g.cost.push_back(expected_bits_truncated(arm, source, spec, *escape_j_max, tol).average);
    } else if (mm.has_zero) {
      g.cost.push_back(std::numeric_limits<double>::infinity());
    } else {
      g.cost.push_back(expected_bits(arm, source, spec, tol).average);
    }
  }
  g.a_star = static_cast<std::size_t>(
      std::min_element(g.cost.begin(), g.cost.end()) - g.cost.begin());
  g.r_star = g.cost[g.a_star];
  g.gaps.resize(arms.size());
  double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
  for (std::size_t a = 0; a < arms.size(); ++a) {
    g.gaps[a] = g.cost[a] - g.r_star;
    if (g.gaps[a] > 0.0) {
      dmin = std::min(dmin, g.gaps[a]);
      dmax = std::max(dmax, g.gaps[a]);
    }
  }
  if (dmax > 0.0) {
    g.delta_min = dmin;
    g.delta_max = dmax;
    g.lambda = dmax / dmin;
  } else {
    g.delta_min = g.delta_max = 0.0;
    g.lambda = 1.0;  // degenerate instance reported as 1
  }
  return g;
}

std::vector<double> pseudo_regret_of_trace(const PolicyTrace& trace,
                                           std::span<const double> gaps) {
  std::vector<double> curve;
  curve.reserve(trace.rounds.size());
  double cum = 0.0;
  for (const RoundRecord& r : trace.rounds) {
    if (r.action >= gaps.size()) {
      throw std::invalid_argument("pseudo_regret_of_trace: arm-set mismatch");
    }
    cum += gaps[r.action];
    curve.push_back(cum);
  }
  return curve;
}

// ------------------------------------------------------------ Blahut-Arimoto

namespace {

struct TiltedChannel {
  std::vector<std::vector<double>> w;  // w[u][v]
  double distortion = 0.0;
  double rate_bits = 0.0;
};

TiltedChannel tilted_channel(std::span<const double> p_u,
                             const std::vector<std::vector<double>>& rho,
                             std::span<const double> q, double s) {
  const std::size_t m = p_u.size(), n = q.size();
  TiltedChannel out;
  out.w.assign(m, std::vector<double>(n, 0.0));
  for (std::size_t u = 0; u < m; ++u) {
    if (p_u[u] == 0.0) continue;
    // log-space row: log q(v) - s rho(u,v), normalized by logsumexp
    double mx = -std::numeric_limits<double>::infinity();
    std::vector<double> lw(n);
    for (std::size_t v = 0; v < n; ++v) {
      lw[v] = (q[v] > 0.0 ? std::log(q[v]) : -std::numeric_limits<double>::infinity()) -
              s * rho[u][v];
      mx = std::max(mx, lw[v]);
    }
    double z = 0.0;
    for (std::size_t v = 0; v < n; ++v) z += std::exp(lw[v] - mx);
    const double log_z = mx + std::log(z);
    for (std::size_t v = 0; v < n; ++v) {
      const double wv = std::exp(lw[v] - log_z);
      out.w[u][v] = wv;
      out.distortion += p_u[u] * wv * rho[u][v];
      if (wv > 0.0 && q[v] > 0.0) {
        out.rate_bits += p_u[u] * wv * (std::log(wv) - std::log(q[v]));
      }
    }
  }
  out.rate_bits /= kLn2;
  return out;
}

}  // namespace

BlahutArimotoResult blahut_arimoto_fixed_distortion(std::span<const double> p_u,
                                                    const std::vector<std::vector<double>>& rho,
                                                    double d, double tol, int max_iters) {
  const std::size_t m = p_u.size();
  if (rho.size() != m || m == 0) throw std::invalid_argument("blahut_arimoto: shape mismatch");
  const std::size_t n = rho[0].size();

  double d_min = 0.0;
  for (std::size_t u = 0; u < m; ++u) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < n; ++v) best = std::min(best, rho[u][v]);
    d_min += p_u[u] * best;
  }
  double d_max = std::numeric_limits<double>::infinity();
  std::size_t v_best = 0;
  for (std::size_t v = 0; v < n; ++v) {
    double dv = 0.0;
    for (std::size_t u = 0; u < m; ++u) dv += p_u[u] * rho[u][v];
    if (dv < d_max) {
      d_max = dv;
      v_best = v;
    }
  }
  if (d < d_min - 1e-12) throw std::invalid_argument("blahut_arimoto: distortion infeasible");

  BlahutArimotoResult res;
  if (d <= d_min + 1e-12) {
    // zero-slack corner: deterministic argmin reproduction
    res.q_star.assign(n, 0.0);
    double h = 0.0;
    for (std::size_t u = 0; u < m; ++u) {
      std::size_t vm = 0;
      for (std::size_t v = 1; v < n; ++v) {
        if (rho[u][v] < rho[u][vm]) vm = v;
      }
      res.q_star[vm] += p_u[u];
      res.distortion += p_u[u] * rho[u][vm];
    }
    for (double qv : res.q_star) {
      if (qv > 0.0) h -= qv * std::log2(qv);
    }
    res.rate_bits = h;
    res.iterations = 0;
    res.rate_history.push_back(h);
    return res;
  }
  if (d >= d_max) {
    res.q_star.assign(n, 0.0);
    res.q_star[v_best] = 1.0;
    res.rate_bits = 0.0;
    res.distortion = d_max;
    res.iterations = 0;
    res.rate_history.push_back(0.0);
    return res;
  }

  std::vector<double> q(n, 1.0 / static_cast<double>(n));
  double prev_rate = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iters; ++it) {
    // pin distortion at d: bisection on the tilt s (distortion decreasing in s)
    TiltedChannel ch = tilted_channel(p_u, rho, q, 0.0);
    double s_lo = 0.0, s_hi = 1.0;
    if (ch.distortion > d) {
      TiltedChannel hi = tilted_channel(p_u, rho, q, s_hi);
      while (hi.distortion > d) {
        s_hi *= 2.0;
        if (s_hi > 1e9) throw std::runtime_error("blahut_arimoto: tilt search diverged");
        hi = tilted_channel(p_u, rho, q, s_hi);
      }
      for (int b = 0; b < 200; ++b) {
        const double s_mid = 0.5 * (s_lo + s_hi);
        TiltedChannel mid = tilted_channel(p_u, rho, q, s_mid);
        if (mid.distortion > d) {
          s_lo = s_mid;
        } else {
          s_hi = s_mid;
          hi = std::move(mid);
        }
        if (std::abs(hi.distortion - d) <= kDistortionPinTol) break;
      }
      ch = std::move(hi);
    }
    // else: distortion ball is slack at s = 0, rate 0 from here on

    res.rate_history.push_back(ch.rate_bits);
    res.distortion = ch.distortion;
    res.iterations = it;

    std::vector<double> q_next(n, 0.0);
    for (std::size_t u = 0; u < m; ++u) {
      for (std::size_t v = 0; v < n; ++v) q_next[v] += p_u[u] * ch.w[u][v];
    }
    q = std::move(q_next);

    if (std::abs(prev_rate - ch.rate_bits) < tol) {
      res.q_star = q;
      res.rate_bits = ch.rate_bits;
      return res;
    }
    prev_rate = ch.rate_bits;
  }
  throw std::runtime_error("blahut_arimoto: no convergence at max_iters");
}

// ----------------------------------------------------------------- sampling

std::uint64_t sample_geometric(double p, RngStream& rng) {
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("sample_geometric: p not in (0,1]");
  if (p == 1.0) return 1;
  const double u = rng.next_unit();
  const double j = std::floor(std::log1p(-u) / std::log1p(-p));
  return 1 + static_cast<std::uint64_t>(std::max(0.0, j));
}

CalibrationResult calibrate_confidence_constant(const SourceModel& source,
                                                const ReconDistribution& q,
                                                const DistortionSpec& spec,
                                                std::span<const double> deltas,
                                                std::span<const int> ns, int reps,
                                                std::uint64_t seed,
                                                std::span<const double> c_grid) {
  static const std::vector<double> kDefaultGrid = [] {
    std::vector<double> g;
    for (int i = 1; i <= 16; ++i) g.push_back(0.25 * i);
    return g;
  }();
  if (c_grid.empty()) c_grid = kDefaultGrid;
  if (!source.enumerable()) {
    throw std::length_error("calibrate_confidence_constant: source must be enumerable");
  }

  CalibrationResult res;
  const MinMatchResult mm = min_match_probability(q, spec);
  if (mm.has_zero) {
    throw std::domain_error("calibrate_confidence_constant: arm has zero match probability");
  }
  res.eta = mm.value;
  res.b_tilde = expected_bits(q, source, spec, 1e-9).average;

  std::vector<double> p_of_x(source.alphabet_size());
  for (Symbol x = 0; x < source.alphabet_size(); ++x) {
    p_of_x[x] = match_probability(q, x, spec);
  }

  // deviations[i][r]: |mean of n_i samples - b_tilde| for replication r
  std::vector<std::vector<double>> deviations(ns.size(), std::vector<double>(reps));
  for (std::size_t i = 0; i < ns.size(); ++i) {
    for (int r = 0; r < reps; ++r) {
      RngStream rng(derive_key({seed, stream_tag::kAux, i, static_cast<std::uint64_t>(r)}));
      double sum = 0.0;
      for (int k = 0; k < ns[i]; ++k) {
        const Symbol x = source.sample(rng);
        const std::uint64_t j = sample_geometric(p_of_x[x], rng);
        sum += std::log2(static_cast<double>(j));
      }
      deviations[i][r] = std::abs(sum / ns[i] - res.b_tilde);
    }
  }

  auto coverage = [&](double c, double delta, std::size_t n_idx) {
    const double radius =
        (c / res.eta) * std::sqrt(std::log(1.0 / delta) / static_cast<double>(ns[n_idx]));
    int hits = 0;
    for (double dev : deviations[n_idx]) hits += dev <= radius ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(reps);
  };

  for (double c : c_grid) {
    bool ok = true;
    for (double delta : deltas) {
      for (std::size_t i = 0; i < ns.size() && ok; ++i) {
        ok = coverage(c, delta, i) >= 1.0 - delta - 1e-12;
      }
      if (!ok) break;
    }
    if (ok) {
      res.c = c;
      res.achieved = true;
      break;
    }
  }
  if (!res.achieved) res.c = c_grid.back();
  for (double delta : deltas) {
    for (std::size_t i = 0; i < ns.size(); ++i) {
      res.cells.push_back(CoverageCell{delta, ns[i], coverage(res.c, delta, i)});
    }
  }
  return res;
}

double kl_divergence_bits(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence_bits: size mismatch");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    kl += p[i] * std::log2(p[i] / q[i]);
  }
  return std::max(kl, 0.0);
}

}  // namespace banditlc
