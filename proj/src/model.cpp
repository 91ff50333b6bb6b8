#include "banditlc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace banditlc {

namespace {

constexpr double kPmfSumTolSource = 1e-12;
constexpr double kPmfSumTolRecon = 1e-9;

void validate_pmf(std::span<const double> pmf, double tol, const char* what) {
  if (pmf.empty()) throw std::invalid_argument(std::string(what) + ": empty pmf");
  double sum = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0)) throw std::invalid_argument(std::string(what) + ": negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol) {
    throw std::invalid_argument(std::string(what) + ": pmf does not sum to 1");
  }
}

std::uint64_t pow_u64_saturating(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (__builtin_mul_overflow(r, base, &r)) return UINT64_MAX;
  }
  return r;
}

std::size_t inverse_cdf(std::span<const double> pmf, double u) {
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (pmf[i] > 0.0) last_positive = i;
    acc += pmf[i];
    if (u < acc) return i;
  }
  return last_positive;
}

}  // namespace

// ---------------------------------------------------------------- SourceModel

SourceModel SourceModel::categorical(std::vector<double> pmf) {
  validate_pmf(pmf, kPmfSumTolSource, "SourceModel");
  SourceModel m;
  m.size_ = pmf.size();
  m.dense_ = std::move(pmf);
  return m;
}

SourceModel SourceModel::product(std::vector<double> per_symbol_pmf, int length) {
  validate_pmf(per_symbol_pmf, kPmfSumTolSource, "SourceModel");
  if (length < 1) throw std::invalid_argument("SourceModel: length must be positive");
  SourceModel m;
  m.size_ = pow_u64_saturating(per_symbol_pmf.size(), length);
  m.product_ = ProductStructure{per_symbol_pmf, length};
  if (m.size_ <= kEnumerationGuard) {
    m.dense_.resize(m.size_);
    const int u = static_cast<int>(per_symbol_pmf.size());
    for (Symbol x = 0; x < m.size_; ++x) {
      double p = 1.0;
      for (int d : symbol_digits(x, u, length)) p *= per_symbol_pmf[d];
      m.dense_[x] = p;
    }
  }
  return m;
}

double SourceModel::pmf(Symbol x) const {
  if (!dense_.empty()) {
    if (x >= dense_.size()) throw std::invalid_argument("SourceModel::pmf: symbol out of range");
    return dense_[x];
  }
  const auto& ps = *product_;
  double p = 1.0;
  for (int d : symbol_digits(x, static_cast<int>(ps.per_symbol_pmf.size()), ps.length)) {
    p *= ps.per_symbol_pmf[d];
  }
  return p;
}

Symbol SourceModel::sample(RngStream& rng) const {
  if (product_) {
    const auto& ps = *product_;
    Symbol x = 0;
    for (int i = 0; i < ps.length; ++i) {
      x = x * ps.per_symbol_pmf.size() + inverse_cdf(ps.per_symbol_pmf, rng.next_unit());
    }
    return x;
  }
  return inverse_cdf(dense_, rng.next_unit());
}

// ------------------------------------------------------------- DistortionSpec

DistortionSpec DistortionSpec::table(std::vector<std::vector<double>> rho, double level) {
  if (rho.empty() || rho[0].empty()) throw std::invalid_argument("DistortionSpec: empty table");
  const std::size_t cols = rho[0].size();
  for (const auto& row : rho) {
    if (row.size() != cols) throw std::invalid_argument("DistortionSpec: ragged table");
    for (double v : row) {
      if (!(v >= 0.0)) throw std::invalid_argument("DistortionSpec: negative distortion");
    }
  }
  if (level < 0.0) throw std::invalid_argument("DistortionSpec: negative level");
  DistortionSpec s;
  s.x_size_ = rho.size();
  s.y_size_ = cols;
  s.rho_ = std::move(rho);
  s.level_ = level;
  return s;
}

DistortionSpec DistortionSpec::additive(std::vector<std::vector<double>> per_symbol, int length,
                                        double level) {
  DistortionSpec base = table(std::move(per_symbol), level);
  if (length < 1) throw std::invalid_argument("DistortionSpec: length must be positive");
  DistortionSpec s;
  s.rho_ = std::move(base.rho_);
  s.level_ = level;
  s.length_ = length;
  s.u_size_ = static_cast<int>(s.rho_.size());
  s.v_size_ = static_cast<int>(s.rho_[0].size());
  s.x_size_ = pow_u64_saturating(s.u_size_, length);
  s.y_size_ = pow_u64_saturating(s.v_size_, length);
  return s;
}

DistortionSpec DistortionSpec::hamming(std::uint64_t alphabet, double level) {
  std::vector<std::vector<double>> rho(alphabet, std::vector<double>(alphabet, 1.0));
  for (std::uint64_t i = 0; i < alphabet; ++i) rho[i][i] = 0.0;
  return table(std::move(rho), level);
}

DistortionSpec DistortionSpec::additive_hamming(int u_size, int length, double level) {
  std::vector<std::vector<double>> rho(u_size, std::vector<double>(u_size, 1.0));
  for (int i = 0; i < u_size; ++i) rho[i][i] = 0.0;
  return additive(std::move(rho), length, level);
}

double DistortionSpec::total(Symbol x, Symbol y) const {
  if (!additive_form()) {
    if (x >= x_size_ || y >= y_size_) {
      throw std::invalid_argument("DistortionSpec: symbol out of range");
    }
    return rho_[x][y];
  }
  double sum = 0.0;
  Symbol xs = x, ys = y;
  for (int i = 0; i < length_; ++i) {
    const int u = static_cast<int>(xs % static_cast<Symbol>(u_size_));
    const int v = static_cast<int>(ys % static_cast<Symbol>(v_size_));
    sum += rho_[u][v];
    xs /= static_cast<Symbol>(u_size_);
    ys /= static_cast<Symbol>(v_size_);
  }
  if (xs != 0 || ys != 0) throw std::invalid_argument("DistortionSpec: symbol out of range");
  return sum;
}

namespace {

// Exact distribution of sum_i rho(x_i, V_i) with V_i iid ~ weights over V,
// as a (cost -> mass) map. `weights` may be a pmf (probability masses) or
// all-ones (match counting). Support growth is guarded.
constexpr std::size_t kConvolutionGuard = 1u << 16;

std::map<double, double> additive_cost_distribution(const std::vector<std::vector<double>>& rho,
                                                    std::span<const int> x_digits,
                                                    std::span<const double> weights) {
  std::map<double, double> dist{{0.0, 1.0}};
  for (int u : x_digits) {
    std::map<double, double> next;
    for (const auto& [cost, mass] : dist) {
      for (std::size_t v = 0; v < weights.size(); ++v) {
        if (weights[v] == 0.0) continue;
        next[cost + rho[u][v]] += mass * weights[v];
      }
    }
    if (next.size() > kConvolutionGuard) {
      throw std::length_error("additive distortion support exceeds guard");
    }
    dist = std::move(next);
  }
  return dist;
}

double mass_within(const std::map<double, double>& dist, double level) {
  double p = 0.0;
  for (const auto& [cost, mass] : dist) {
    if (cost <= level) p += mass;
    else break;
  }
  return p;
}

}  // namespace

std::uint64_t DistortionSpec::count_matches(Symbol x) const {
  if (additive_form()) {
    std::vector<double> ones(v_size_, 1.0);
    const auto digits = symbol_digits(x, u_size_, length_);
    const auto dist = additive_cost_distribution(rho_, digits, ones);
    const double c = mass_within(dist, level_);
    if (c >= static_cast<double>(UINT64_MAX)) return UINT64_MAX;
    return static_cast<std::uint64_t>(std::llround(c));
  }
  std::uint64_t n = 0;
  for (Symbol y = 0; y < y_size_; ++y) n += within(x, y) ? 1 : 0;
  return n;
}

std::uint64_t DistortionSpec::max_matches() const {
  if (additive_form()) {
    // the count depends on x only through its type; scan types
    TypeEnumeration types(length_, u_size_);
    std::uint64_t best = 0;
    for (std::size_t j = 0; j < types.count(); ++j) {
      std::vector<int> digits;
      for (int u = 0; u < u_size_; ++u) {
        digits.insert(digits.end(), types.at(j).counts[u], u);
      }
      best = std::max(best, count_matches(symbol_from_digits(digits, u_size_)));
    }
    return best;
  }
  std::uint64_t best = 0;
  for (Symbol x = 0; x < x_size_; ++x) best = std::max(best, count_matches(x));
  return best;
}

void DistortionSpec::validate_feasible() const {
  if (additive_form()) {
    // worst x is the all-u vector for the u maximizing min_v rho(u, v)
    for (int u = 0; u < u_size_; ++u) {
      double best = std::numeric_limits<double>::infinity();
      for (int v = 0; v < v_size_; ++v) best = std::min(best, rho_[u][v]);
      if (best * length_ > level_) {
        throw std::invalid_argument("DistortionSpec: some x has no d-match");
      }
    }
    return;
  }
  for (Symbol x = 0; x < x_size_; ++x) {
    bool ok = false;
    for (Symbol y = 0; y < y_size_ && !ok; ++y) ok = within(x, y);
    if (!ok) throw std::invalid_argument("DistortionSpec: some x has no d-match");
  }
}

// --------------------------------------------------------- ReconDistribution

ReconDistribution ReconDistribution::categorical(std::vector<double> pmf) {
  validate_pmf(pmf, kPmfSumTolRecon, "ReconDistribution");
  const std::uint64_t n = pmf.size();
  return ReconDistribution(Categorical{std::move(pmf)}, n);
}

ReconDistribution ReconDistribution::memoryless(std::vector<double> per_symbol, int length) {
  validate_pmf(per_symbol, kPmfSumTolRecon, "ReconDistribution");
  if (length < 1) throw std::invalid_argument("ReconDistribution: length must be positive");
  const std::uint64_t n = pow_u64_saturating(per_symbol.size(), length);
  return ReconDistribution(Memoryless{std::move(per_symbol), length}, n);
}

ReconDistribution ReconDistribution::uniform_on_type(TypeVector type) {
  for (int c : type.counts) {
    if (c < 0) throw std::invalid_argument("ReconDistribution: negative count");
  }
  if (type.length() < 1) throw std::invalid_argument("ReconDistribution: empty type");
  const std::uint64_t n = pow_u64_saturating(type.v_size(), type.length());
  const double ls = log_type_class_size(type);
  return ReconDistribution(UniformOnType{std::move(type), ls}, n);
}

ReconDistribution ReconDistribution::type_mixture(std::shared_ptr<const TypeEnumeration> types,
                                                  std::vector<double> weights) {
  if (!types) throw std::invalid_argument("ReconDistribution: null enumeration");
  if (weights.size() != types->count()) {
    throw std::invalid_argument("ReconDistribution: weight count != type count");
  }
  validate_pmf(weights, kPmfSumTolRecon, "ReconDistribution");
  std::vector<double> lw(weights.size()), ls(weights.size());
  for (std::size_t j = 0; j < weights.size(); ++j) {
    lw[j] = weights[j] > 0.0 ? std::log(weights[j]) : -std::numeric_limits<double>::infinity();
    ls[j] = log_type_class_size(types->at(j));
  }
  const std::uint64_t n = pow_u64_saturating(types->v_size(), types->length());
  return ReconDistribution(TypeMixture{std::move(types), std::move(lw), std::move(ls)}, n);
}

ReconDistribution ReconDistribution::type_mixture_of_memoryless(std::vector<double> per_symbol,
                                                                int length) {
  auto types = std::make_shared<TypeEnumeration>(length, static_cast<int>(per_symbol.size()));
  std::vector<double> w(types->count());
  for (std::size_t j = 0; j < types->count(); ++j) {
    w[j] = iid_type_weight(per_symbol, types->at(j));
  }
  return type_mixture(std::move(types), std::move(w));
}

double ReconDistribution::pmf(Symbol y) const {
  if (y >= size_) throw std::invalid_argument("ReconDistribution::pmf: symbol out of range");
  return std::visit(
      [y](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Categorical>) {
          return v.pmf[y];
        } else if constexpr (std::is_same_v<T, Memoryless>) {
          double p = 1.0;
          for (int d : symbol_digits(y, static_cast<int>(v.per_symbol.size()), v.length)) {
            p *= v.per_symbol[d];
          }
          return p;
        } else if constexpr (std::is_same_v<T, UniformOnType>) {
          const TypeVector t = empirical_type(y, v.type.v_size(), v.type.length());
          return t == v.type ? std::exp(-v.log_class_size) : 0.0;
        } else {
          const TypeVector t = empirical_type(y, v.types->v_size(), v.types->length());
          const std::size_t j = v.types->index_of(t);
          return std::exp(v.log_weights[j] - v.log_class_sizes[j]);
        }
      },
      variant_);
}

Symbol ReconDistribution::sample(RngStream& rng) const {
  return std::visit(
      [&rng](const auto& v) -> Symbol {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Categorical>) {
          return inverse_cdf(v.pmf, rng.next_unit());
        } else if constexpr (std::is_same_v<T, Memoryless>) {
          Symbol y = 0;
          for (int i = 0; i < v.length; ++i) {
            y = y * v.per_symbol.size() + inverse_cdf(v.per_symbol, rng.next_unit());
          }
          return y;
        } else if constexpr (std::is_same_v<T, UniformOnType>) {
          return sample_uniform_in_type(v.type, rng);
        } else {
          // inverse CDF over mixture weights, then uniform within the class
          const double u = rng.next_unit();
          double acc = 0.0;
          std::size_t pick = v.log_weights.size() - 1;
          for (std::size_t j = 0; j < v.log_weights.size(); ++j) {
            acc += std::exp(v.log_weights[j]);
            if (u < acc) {
              pick = j;
              break;
            }
          }
          return sample_uniform_in_type(v.types->at(pick), rng);
        }
      },
      variant_);
}

std::string ReconDistribution::describe() const {
  std::ostringstream os;
  std::visit(
      [&os](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Categorical>) {
          os << "categorical[";
          for (std::size_t i = 0; i < v.pmf.size(); ++i) os << (i ? "," : "") << v.pmf[i];
          os << "]";
        } else if constexpr (std::is_same_v<T, Memoryless>) {
          os << "memoryless[";
          for (std::size_t i = 0; i < v.per_symbol.size(); ++i) {
            os << (i ? "," : "") << v.per_symbol[i];
          }
          os << "]^" << v.length;
        } else if constexpr (std::is_same_v<T, UniformOnType>) {
          os << "uniform_on_type[";
          for (std::size_t i = 0; i < v.type.counts.size(); ++i) {
            os << (i ? "," : "") << v.type.counts[i];
          }
          os << "]";
        } else {
          os << "type_mixture[tau=" << v.log_weights.size() << "]";
        }
      },
      variant_);
  return os.str();
}

// ------------------------------------------------------------------ free ops

double distortion_total(const DistortionSpec& spec, Symbol x, Symbol y) {
  return spec.total(x, y);
}

double match_probability(const ReconDistribution& q, Symbol x, const DistortionSpec& spec) {
  if (q.alphabet_size() != spec.y_size()) {
    throw std::invalid_argument("match_probability: Y alphabet mismatch");
  }
  if (spec.additive_form() && q.is_memoryless()) {
    const auto& m = std::get<ReconDistribution::Memoryless>(q.variant());
    if (m.length != spec.length() ||
        static_cast<int>(m.per_symbol.size()) != spec.v_size()) {
      throw std::invalid_argument("match_probability: shape mismatch");
    }
    const auto digits = symbol_digits(x, spec.u_size(), spec.length());
    const auto dist = additive_cost_distribution(spec.per_symbol_table(), digits, m.per_symbol);
    return std::min(1.0, mass_within(dist, spec.level()));
  }
  if (spec.y_size() > kEnumerationGuard) {
    throw std::length_error("match_probability: Y too large to enumerate");
  }
  double p = 0.0;
  for (Symbol y = 0; y < spec.y_size(); ++y) {
    if (spec.within(x, y)) p += q.pmf(y);
  }
  return std::min(1.0, p);
}

MinMatchResult min_match_probability(const ReconDistribution& q, const DistortionSpec& spec) {
  MinMatchResult r{std::numeric_limits<double>::infinity(), false, 0};
  auto consider = [&r, &q, &spec](Symbol x) {
    const double p = match_probability(q, x, spec);
    if (p < r.value) {
      r.value = p;
      r.argmin_x = x;
    }
  };
  if (spec.additive_form() && q.is_memoryless()) {
    // p(x, Q) depends on x only through its type
    TypeEnumeration types(spec.length(), spec.u_size());
    for (std::size_t j = 0; j < types.count(); ++j) {
      std::vector<int> digits;
      for (int u = 0; u < spec.u_size(); ++u) {
        digits.insert(digits.end(), types.at(j).counts[u], u);
      }
      consider(symbol_from_digits(digits, spec.u_size()));
    }
  } else {
    if (spec.x_size() > kEnumerationGuard) {
      throw std::length_error("min_match_probability: X too large to enumerate");
    }
    for (Symbol x = 0; x < spec.x_size(); ++x) consider(x);
  }
  r.has_zero = (r.value == 0.0);
  return r;
}

double recon_pmf(const ReconDistribution& q, Symbol y) { return q.pmf(y); }

Symbol sample_recon(const ReconDistribution& q, RngStream& rng) { return q.sample(rng); }

std::vector<double> clamp_to_floor(std::span<const double> pmf, double eta) {
  if (eta < 0.0 || eta * static_cast<double>(pmf.size()) >= 1.0) {
    throw std::invalid_argument("clamp_to_floor: infeasible floor");
  }
  double excess = 0.0;
  for (double p : pmf) excess += std::max(p - eta, 0.0);
  std::vector<double> out(pmf.size());
  const double scale = (1.0 - eta * static_cast<double>(pmf.size())) / excess;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    out[i] = eta + std::max(pmf[i] - eta, 0.0) * scale;
  }
  return out;
}

}  // namespace banditlc
