#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "banditlc/rng.hpp"
#include "banditlc/typespace.hpp"

namespace banditlc {

// Alphabets are integer indices 0..|X|-1; vector symbols are base-|V|
// encoded so brute-force sweeps are flat loops.
inline constexpr std::uint64_t kEnumerationGuard = 1u << 22;

struct ProductStructure {
  std::vector<double> per_symbol_pmf;  // P_U
  int length;                          // l
};

// Finite-alphabet source, optionally an l-fold product of a per-symbol pmf.
class SourceModel {
 public:
  static SourceModel categorical(std::vector<double> pmf);
  static SourceModel product(std::vector<double> per_symbol_pmf, int length);

  std::uint64_t alphabet_size() const { return size_; }
  double pmf(Symbol x) const;
  Symbol sample(RngStream& rng) const;
  const std::optional<ProductStructure>& product_structure() const { return product_; }
  bool enumerable() const { return size_ <= kEnumerationGuard; }

 private:
  SourceModel() = default;
  std::uint64_t size_ = 0;
  std::vector<double> dense_;  // filled only when enumerable
  std::optional<ProductStructure> product_;
};

// rho(x, y) >= 0 as a full table over X x Y, or an additive per-symbol
// table over U x V applied position-wise to length-l vectors.
class DistortionSpec {
 public:
  static DistortionSpec table(std::vector<std::vector<double>> rho, double level);
  static DistortionSpec additive(std::vector<std::vector<double>> per_symbol, int length,
                                 double level);
  // Hamming convenience: scalar table for size n, or additive per-symbol.
  static DistortionSpec hamming(std::uint64_t alphabet, double level);
  static DistortionSpec additive_hamming(int u_size, int length, double level);

  double level() const { return level_; }
  double total(Symbol x, Symbol y) const;
  bool within(Symbol x, Symbol y) const { return total(x, y) <= level_; }

  std::uint64_t x_size() const { return x_size_; }
  std::uint64_t y_size() const { return y_size_; }
  bool additive_form() const { return length_ > 0; }
  int length() const { return length_; }
  int u_size() const { return u_size_; }
  int v_size() const { return v_size_; }
  const std::vector<std::vector<double>>& per_symbol_table() const { return rho_; }

  // Framework assumption: every x has at least one y with rho(x,y) <= d.
  // Throws if violated (enumeration-guarded).
  void validate_feasible() const;

  // #\{y : rho(x,y) <= d\} and its max over x. Additive instances use an
  // exact counting convolution, so large l is fine.
  std::uint64_t count_matches(Symbol x) const;
  std::uint64_t max_matches() const;

 private:
  DistortionSpec() = default;
  std::vector<std::vector<double>> rho_;  // full table, or per-symbol when additive
  double level_ = 0.0;
  std::uint64_t x_size_ = 0, y_size_ = 0;
  int length_ = 0;  // 0 => full-table form
  int u_size_ = 0, v_size_ = 0;
};

// A distribution over Y in one of four representations. Type-mixture
// weights live in natural-log space internally; accessors are linear.
class ReconDistribution {
 public:
  struct Categorical {
    std::vector<double> pmf;
  };
  struct Memoryless {
    std::vector<double> per_symbol;  // P_V
    int length;
  };
  struct UniformOnType {
    TypeVector type;
    double log_class_size;
  };
  struct TypeMixture {
    std::shared_ptr<const TypeEnumeration> types;
    std::vector<double> log_weights;       // log a(j)
    std::vector<double> log_class_sizes;   // log |T_l(P_j)|
  };
  using Variant = std::variant<Categorical, Memoryless, UniformOnType, TypeMixture>;

  static ReconDistribution categorical(std::vector<double> pmf);
  static ReconDistribution memoryless(std::vector<double> per_symbol, int length);
  static ReconDistribution uniform_on_type(TypeVector type);
  static ReconDistribution type_mixture(std::shared_ptr<const TypeEnumeration> types,
                                        std::vector<double> weights);
  // The mixture over types equivalent to Memoryless(per_symbol, l):
  // weights a(j) = iid_type_weight(per_symbol, P_j).
  static ReconDistribution type_mixture_of_memoryless(std::vector<double> per_symbol,
                                                      int length);

  std::uint64_t alphabet_size() const { return size_; }
  double pmf(Symbol y) const;
  Symbol sample(RngStream& rng) const;
  const Variant& variant() const { return variant_; }
  bool is_memoryless() const { return std::holds_alternative<Memoryless>(variant_); }
  std::string describe() const;

 private:
  ReconDistribution(Variant v, std::uint64_t size) : variant_(std::move(v)), size_(size) {}
  Variant variant_;
  std::uint64_t size_ = 0;
};

// rho(x, y) at the spec level; additive form expands position-wise.
double distortion_total(const DistortionSpec& spec, Symbol x, Symbol y);

// p(x, Q) = sum_{y : rho(x,y) <= d} Q(y), exact. Memoryless Q with an
// additive spec uses an exact convolution over the per-position distortion
// distribution; everything else sweeps Y (enumeration-guarded).
double match_probability(const ReconDistribution& q, Symbol x, const DistortionSpec& spec);

struct MinMatchResult {
  double value;    // min_x p(x, Q); the eta fed to confidence bounds
  bool has_zero;   // some x has p(x, Q) = 0 (arm needs escape handling)
  Symbol argmin_x;
};
MinMatchResult min_match_probability(const ReconDistribution& q, const DistortionSpec& spec);

double recon_pmf(const ReconDistribution& q, Symbol y);
Symbol sample_recon(const ReconDistribution& q, RngStream& rng);

// Projection onto {q : q(y) >= eta, sum q = 1} that is the identity on the
// set itself: floor at eta and redistribute the remaining mass
// proportionally to the positive excess.
std::vector<double> clamp_to_floor(std::span<const double> pmf, double eta);

}  // namespace banditlc
