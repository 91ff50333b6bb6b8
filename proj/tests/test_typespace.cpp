#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "banditlc/typespace.hpp"

using namespace banditlc;

TEST_CASE("type counts match the stars-and-bars formula") {
  CHECK(count_types(4, 2) == 5);
  CHECK(count_types(2, 3) == 6);
  CHECK(count_types(1, 7) == 7);
  CHECK(TypeEnumeration(4, 2).count() == 5);
  CHECK(TypeEnumeration(2, 3).count() == 6);
}

TEST_CASE("enumeration is lexicographic, complete and duplicate-free") {
  TypeEnumeration types(4, 2);
  std::set<std::vector<int>> seen;
  for (std::size_t j = 0; j < types.count(); ++j) {
    const TypeVector& t = types.at(j);
    CHECK(t.length() == 4);
    CHECK(seen.insert(t.counts).second);
    if (j > 0) CHECK(types.at(j - 1).counts < t.counts);
    CHECK(types.index_of(t) == j);
  }
}

TEST_CASE("enumeration guard rejects oversized instances") {
  CHECK_THROWS_AS(TypeEnumeration(4000, 6), std::length_error);
}

TEST_CASE("type class sizes") {
  CHECK(type_class_size(TypeVector{{2, 2}}) == 6);
  CHECK(type_class_size(TypeVector{{4, 0}}) == 1);
  // sizes partition the cube: sum over the 5 types at l=4 is 2^4
  TypeEnumeration types(4, 2);
  std::uint64_t total = 0;
  for (std::size_t j = 0; j < types.count(); ++j) total += type_class_size(types.at(j));
  CHECK(total == 16);
  // log-space agrees with the exact value
  CHECK(std::abs(log_type_class_size(TypeVector{{2, 2}}) - std::log(6.0)) < 1e-12);
}

TEST_CASE("class sizes partition |V|^l for l <= 12, |V| <= 4") {
  for (int v = 2; v <= 4; ++v) {
    for (int l = 1; l <= 12; ++l) {
      TypeEnumeration types(l, v);
      long double total = 0;
      for (std::size_t j = 0; j < types.count(); ++j) total += type_class_size(types.at(j));
      CHECK(total == std::pow((long double)v, l));
    }
  }
}

TEST_CASE("empirical types") {
  CHECK(empirical_type(symbol_from_string("0101", 2), 2, 4) == TypeVector{{2, 2}});
  CHECK(empirical_type(symbol_from_string("0000", 2), 2, 4) == TypeVector{{4, 0}});
  // every member of a class maps back to its type
  TypeEnumeration types(4, 2);
  for (std::size_t j = 0; j < types.count(); ++j) {
    for (Symbol y = 0; y < 16; ++y) {
      if (empirical_type(y, 2, 4) == types.at(j)) {
        CHECK(types.index_of(empirical_type(y, 2, 4)) == j);
      }
    }
  }
  CHECK_THROWS(empirical_type(Symbol{16}, 2, 4));
}

TEST_CASE("uniform-in-type sampling") {
  RngStream rng(derive_key({42, 1}));
  // singleton class
  for (int i = 0; i < 10; ++i) {
    CHECK(sample_uniform_in_type(TypeVector{{4, 0}}, rng) == 0);
  }
  // constant composition always holds
  const TypeVector t{{2, 2}};
  std::map<Symbol, int> freq;
  const int n = 60000;
  for (int i = 0; i < n; ++i) {
    const Symbol y = sample_uniform_in_type(t, rng);
    CHECK(empirical_type(y, 2, 4) == t);
    freq[y]++;
  }
  CHECK(freq.size() == 6);
  for (const auto& [y, count] : freq) {
    CHECK(std::abs(count / double(n) - 1.0 / 6.0) < 0.01);
  }
}

TEST_CASE("iid type weights") {
  CHECK(iid_type_weight(std::vector<double>{0.5, 0.5}, TypeVector{{1, 1}}) == doctest::Approx(0.5));
  CHECK(iid_type_weight(std::vector<double>{0.7, 0.3}, TypeVector{{2, 2}}) ==
        doctest::Approx(6 * 0.49 * 0.09).epsilon(1e-12));
  // zero outside the support of P_V
  CHECK(iid_type_weight(std::vector<double>{1.0, 0.0}, TypeVector{{2, 2}}) == 0.0);

  // weights are a pmf over the enumeration, for every tested (l, |V|)
  for (int v = 2; v <= 4; ++v) {
    std::vector<double> pv(v);
    for (int i = 0; i < v; ++i) pv[i] = (i + 1.0) / (v * (v + 1.0) / 2.0);
    for (int l = 1; l <= 12; ++l) {
      TypeEnumeration types(l, v);
      double total = 0.0;
      for (std::size_t j = 0; j < types.count(); ++j) total += iid_type_weight(pv, types.at(j));
      CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("symbol digit codec round-trips") {
  for (Symbol s = 0; s < 81; ++s) {
    const auto d = symbol_digits(s, 3, 4);
    CHECK(symbol_from_digits(d, 3) == s);
  }
  CHECK(symbol_from_string("0110", 2) == 6);
  CHECK_THROWS(symbol_digits(Symbol{16}, 2, 4));
}
