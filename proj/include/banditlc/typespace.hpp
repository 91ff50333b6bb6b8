#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "banditlc/rng.hpp"

namespace banditlc {

using Symbol = std::uint64_t;

// Empirical distribution of a length-l vector over an alphabet of size
// |V| = counts.size(), stored as integer counts summing to l.
struct TypeVector {
  std::vector<int> counts;

  int length() const;
  int v_size() const { return static_cast<int>(counts.size()); }
  std::vector<double> distribution() const;  // counts / l
  bool operator==(const TypeVector&) const = default;
};

// Number of types: binomial(l + v - 1, v - 1).
std::uint64_t count_types(int length, int v_size);

// Complete, duplicate-free, lexicographically ordered (on counts) list of
// all types for (l, |V|). The ordering is deterministic so that action
// indices are stable across runs and across encoder/decoder.
class TypeEnumeration {
 public:
  TypeEnumeration(int length, int v_size);

  std::size_t count() const { return types_.size(); }
  const TypeVector& at(std::size_t j) const { return types_[j]; }
  std::size_t index_of(const TypeVector& t) const;  // throws if absent
  int length() const { return length_; }
  int v_size() const { return v_size_; }
  const std::vector<TypeVector>& all() const { return types_; }

  // Enumeration sizes beyond this are rejected.
  static constexpr std::uint64_t kGuard = 10'000'000;

 private:
  int length_;
  int v_size_;
  std::vector<TypeVector> types_;
};

// |T_l(P)| = l! / prod_v counts(v)!, exact. Throws on 64-bit overflow;
// callers needing larger instances use log_type_class_size.
std::uint64_t type_class_size(const TypeVector& type);
double log_type_class_size(const TypeVector& type);  // natural log, via lgamma

// Counts of each v in the base-|V| digits of y (big-endian, `length` digits).
TypeVector empirical_type(Symbol y, int v_size, int length);

// Uniform over T_l(P): an in-place shuffle of the multiset given by counts.
Symbol sample_uniform_in_type(const TypeVector& type, RngStream& rng);

// P[Y in T_l(P)] for Y with iid symbols ~ per_symbol:
// |T_l(P)| * prod_v per_symbol(v)^{l P(v)}, accumulated in log space.
double iid_type_weight(std::span<const double> per_symbol, const TypeVector& type);
double log_iid_type_weight(std::span<const double> per_symbol, const TypeVector& type);

// Base-|V| digit codec for vector symbols (big-endian: digits[0] is the
// most significant digit).
std::vector<int> symbol_digits(Symbol s, int base, int length);
Symbol symbol_from_digits(std::span<const int> digits, int base);
Symbol symbol_from_string(const char* str, int base);

// |V|^l with an overflow guard.
std::uint64_t pow_u64(std::uint64_t base, int exp);

}  // namespace banditlc
