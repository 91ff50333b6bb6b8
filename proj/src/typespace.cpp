#include "banditlc/typespace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace banditlc {

int TypeVector::length() const {
  return std::accumulate(counts.begin(), counts.end(), 0);
}

std::vector<double> TypeVector::distribution() const {
  const double l = static_cast<double>(length());
  std::vector<double> p(counts.size());
  for (std::size_t v = 0; v < counts.size(); ++v) p[v] = counts[v] / l;
  return p;
}

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw std::overflow_error("64-bit overflow in combinatorial count");
  }
  return r;
}

// binomial(n, k) exact in 64 bits, throws on overflow
std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i stays integral when divided stepwise via gcd
    std::uint64_t num = n - k + i;
    std::uint64_t g = std::gcd(r, i);
    std::uint64_t den = i / g;
    r = checked_mul(r / g, num);
    if (r % den != 0) throw std::logic_error("binomial internal error");
    r /= den;
  }
  return r;
}

void enumerate_rec(int slot, int v_size, int remaining, std::vector<int>& cur,
                   std::vector<TypeVector>& out) {
  if (slot == v_size - 1) {
    cur[slot] = remaining;
    out.push_back(TypeVector{cur});
    return;
  }
  for (int c = 0; c <= remaining; ++c) {
    cur[slot] = c;
    enumerate_rec(slot + 1, v_size, remaining - c, cur, out);
  }
}

}  // namespace

std::uint64_t count_types(int length, int v_size) {
  if (length < 1 || v_size < 1) throw std::invalid_argument("count_types: bad arguments");
  return binomial_u64(static_cast<std::uint64_t>(length) + v_size - 1, v_size - 1);
}

TypeEnumeration::TypeEnumeration(int length, int v_size)
    : length_(length), v_size_(v_size) {
  if (length < 1 || v_size < 1) throw std::invalid_argument("TypeEnumeration: bad arguments");
  const std::uint64_t tau = count_types(length, v_size);
  if (tau > kGuard) {
    throw std::length_error("TypeEnumeration: type count exceeds guard");
  }
  types_.reserve(tau);
  std::vector<int> cur(v_size, 0);
  enumerate_rec(0, v_size, length, cur, types_);
  // the recursion emits counts in lexicographic order already
  if (types_.size() != tau) throw std::logic_error("TypeEnumeration: count mismatch");
}

std::size_t TypeEnumeration::index_of(const TypeVector& t) const {
  auto it = std::lower_bound(
      types_.begin(), types_.end(), t,
      [](const TypeVector& a, const TypeVector& b) { return a.counts < b.counts; });
  if (it == types_.end() || !(*it == t)) {
    throw std::invalid_argument("TypeEnumeration: type not in enumeration");
  }
  return static_cast<std::size_t>(it - types_.begin());
}

std::uint64_t type_class_size(const TypeVector& type) {
  // multinomial(l; counts) = prod over symbols of binomial(partial_sum, count)
  std::uint64_t r = 1;
  std::uint64_t seen = 0;
  for (int c : type.counts) {
    if (c < 0) throw std::invalid_argument("type_class_size: negative count");
    seen += static_cast<std::uint64_t>(c);
    r = checked_mul(r, binomial_u64(seen, static_cast<std::uint64_t>(c)));
  }
  return r;
}

double log_type_class_size(const TypeVector& type) {
  double l = 0.0;
  double total = 0.0;
  for (int c : type.counts) {
    total += c;
    l -= std::lgamma(static_cast<double>(c) + 1.0);
  }
  return l + std::lgamma(total + 1.0);
}

TypeVector empirical_type(Symbol y, int v_size, int length) {
  TypeVector t{std::vector<int>(v_size, 0)};
  for (int i = 0; i < length; ++i) {
    const int digit = static_cast<int>(y % static_cast<Symbol>(v_size));
    t.counts[digit]++;
    y /= static_cast<Symbol>(v_size);
  }
  if (y != 0) throw std::invalid_argument("empirical_type: symbol out of alphabet");
  return t;
}

Symbol sample_uniform_in_type(const TypeVector& type, RngStream& rng) {
  std::vector<int> word;
  word.reserve(type.length());
  for (int v = 0; v < type.v_size(); ++v) {
    word.insert(word.end(), type.counts[v], v);
  }
  // Fisher-Yates
  for (std::size_t i = word.size(); i > 1; --i) {
    const std::uint64_t j = rng.next_below(i);
    std::swap(word[i - 1], word[j]);
  }
  return symbol_from_digits(word, type.v_size());
}

double log_iid_type_weight(std::span<const double> per_symbol, const TypeVector& type) {
  if (static_cast<int>(per_symbol.size()) != type.v_size()) {
    throw std::invalid_argument("iid_type_weight: alphabet size mismatch");
  }
  double lw = log_type_class_size(type);
  for (int v = 0; v < type.v_size(); ++v) {
    if (type.counts[v] == 0) continue;
    if (per_symbol[v] <= 0.0) return -std::numeric_limits<double>::infinity();
    lw += type.counts[v] * std::log(per_symbol[v]);
  }
  return lw;
}

double iid_type_weight(std::span<const double> per_symbol, const TypeVector& type) {
  return std::exp(log_iid_type_weight(per_symbol, type));
}

std::vector<int> symbol_digits(Symbol s, int base, int length) {
  std::vector<int> d(length);
  for (int i = length - 1; i >= 0; --i) {
    d[i] = static_cast<int>(s % static_cast<Symbol>(base));
    s /= static_cast<Symbol>(base);
  }
  if (s != 0) throw std::invalid_argument("symbol_digits: symbol out of range");
  return d;
}

Symbol symbol_from_digits(std::span<const int> digits, int base) {
  Symbol s = 0;
  for (int d : digits) {
    if (d < 0 || d >= base) throw std::invalid_argument("symbol_from_digits: digit out of range");
    s = s * static_cast<Symbol>(base) + static_cast<Symbol>(d);
  }
  return s;
}

Symbol symbol_from_string(const char* str, int base) {
  std::vector<int> digits;
  for (const char* p = str; *p; ++p) digits.push_back(*p - '0');
  return symbol_from_digits(digits, base);
}

std::uint64_t pow_u64(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) r = checked_mul(r, base);
  return r;
}

}  // namespace banditlc
