#include "bandspectra/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "bandspectra/cumulants.hpp"
#include "bandspectra/error.hpp"
#include "bandspectra/partitions.hpp"
#include "bandspectra/stats.hpp"

namespace bandspectra {

namespace {

int total_order(std::span<const int> block_sizes) {
  if (block_sizes.empty()) throw DomainError("oracle needs at least one trace power");
  int k = 0;
  for (int s : block_sizes) {
    if (s < 1) throw DomainError("trace powers must be >= 1");
    k += s;
  }
  return k;
}

void check_inputs(const ProcessModel& model, int k, std::size_t p, std::size_t n, const OracleLimits& limits) {
  if (p < 1 || n < 1) throw DomainError("oracle needs p >= 1 and n >= 1");
  if (k > limits.max_total_order) {
    throw CapacityError("oracle total trace order", k, limits.max_total_order);
  }
  if (p > limits.max_dim) {
    throw CapacityError("oracle dimension p", static_cast<long long>(p), static_cast<long long>(limits.max_dim));
  }
  if (model.max_cumulant_order() < 2 * k) {
    throw ConfigError("oracle needs driver cumulants up to order " + std::to_string(2 * k));
  }
}

struct Term {
  Partition pi;
  int exponent = 0;  // -k + #(Pi0 v Pi)
  std::vector<std::vector<int>> parts;  // 0-based slots of each part of Pi
};

std::vector<Term> connected_terms(std::span<const int> block_sizes, int k) {
  const auto [pi0, pi1] = standard_matchings(block_sizes);
  const Partition base = join(pi0, pi1);
  std::vector<Term> terms;
  for (const Partition& pi : enumerate_no_singleton(2 * k)) {
    if (join_count(base, pi) != 1) continue;
    Term t;
    t.pi = pi;
    t.exponent = -k + join_count(pi0, pi);
    for (const auto& part : pi.parts()) {
      std::vector<int> slots;
      for (int e : part) slots.push_back(e - 1);
      t.parts.push_back(std::move(slots));
    }
    terms.push_back(std::move(t));
  }
  return terms;
}

double product_over_parts(const ProcessModel& model, const Term& term, std::span<const long> word,
                          std::vector<long>& offsets) {
  double c = 1.0;
  for (const auto& part : term.parts) {
    offsets.clear();
    for (int s : part) offsets.push_back(word[static_cast<std::size_t>(s)]);
    c *= linear_process_cumulant(model, offsets);
    if (c == 0.0) break;
  }
  return c;
}

}  // namespace

double exact_trace_cumulant(const ProcessModel& model, std::span<const int> block_sizes, std::size_t p, std::size_t n,
                            std::size_t b, const OracleLimits& limits) {
  const int k = total_order(block_sizes);
  check_inputs(model, k, p, n, limits);
  const auto pi1 = standard_matchings(block_sizes).second;
  const int slots = 2 * k;
  std::vector<int> slot_part(static_cast<std::size_t>(slots));
  for (int e = 1; e <= slots; ++e) slot_part[static_cast<std::size_t>(e - 1)] = static_cast<int>(pi1.block_of(e));
  const std::size_t free_values = pi1.size();

  const auto terms = connected_terms(block_sizes, k);
  std::vector<double> term_values;
  term_values.reserve(terms.size());

  std::vector<long> word(static_cast<std::size_t>(slots));
  std::vector<long> assignment(free_values, 1);
  std::vector<long> offsets;
  std::vector<double> word_values;

  for (const Term& term : terms) {
    word_values.clear();
    std::fill(assignment.begin(), assignment.end(), 1);
    while (true) {
      for (int s = 0; s < slots; ++s) word[static_cast<std::size_t>(s)] = assignment[static_cast<std::size_t>(slot_part[s])];
      bool inside = true;
      for (int a = 0; a < k && inside; ++a) {
        inside = static_cast<std::size_t>(std::labs(word[2 * a] - word[2 * a + 1])) <= b;
      }
      if (inside) word_values.push_back(product_over_parts(model, term, word, offsets));
      std::size_t pos = 0;
      while (pos < free_values && assignment[pos] == static_cast<long>(p)) assignment[pos++] = 1;
      if (pos == free_values) break;
      ++assignment[pos];
    }
    term_values.push_back(std::pow(static_cast<double>(n), term.exponent) * pairwise_sum(word_values));
  }
  return pairwise_sum(term_values);
}

// Walks all p^(2k) raw words, keeps the Pi1-measurable ones and adds every
// term's contribution word by word.
double exact_trace_cumulant_unmasked(const ProcessModel& model, std::span<const int> block_sizes, std::size_t p,
                                     std::size_t n, const OracleLimits& limits) {
  const int k = total_order(block_sizes);
  check_inputs(model, k, p, n, limits);
  const auto pi1 = standard_matchings(block_sizes).second;
  const auto terms = connected_terms(block_sizes, k);
  const std::size_t slots = static_cast<std::size_t>(2 * k);

  std::vector<std::vector<double>> per_term(terms.size());
  std::vector<long> word(slots, 1);
  std::vector<long> offsets;
  while (true) {
    bool measurable = true;
    for (Block block : pi1.blocks()) {
      const int first = std::countr_zero(block);
      for (Block rest = block; rest != 0 && measurable; rest &= rest - 1) {
        measurable = word[static_cast<std::size_t>(std::countr_zero(rest))] == word[static_cast<std::size_t>(first)];
      }
    }
    if (measurable) {
      for (std::size_t t = 0; t < terms.size(); ++t) {
        per_term[t].push_back(product_over_parts(model, terms[t], word, offsets));
      }
    }
    std::size_t pos = 0;
    while (pos < slots && word[pos] == static_cast<long>(p)) word[pos++] = 1;
    if (pos == slots) break;
    ++word[pos];
  }
  std::vector<double> term_values;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    term_values.push_back(std::pow(static_cast<double>(n), terms[t].exponent) * pairwise_sum(per_term[t]));
  }
  return pairwise_sum(term_values);
}

double exact_mean_trace(const ProcessModel& model, int k, std::size_t p, std::size_t n, std::size_t b,
                        const OracleLimits& limits) {
  const int sizes[] = {k};
  return exact_trace_cumulant(model, sizes, p, n, b, limits);
}

std::size_t connected_term_count(std::span<const int> block_sizes) {
  return connected_terms(block_sizes, total_order(block_sizes)).size();
}

}  // namespace bandspectra
