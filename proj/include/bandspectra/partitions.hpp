#pragma once

// Set partitions of {1..k}: the lattice Part(k), joins, perfect matchings and
// the combinatorial inequalities used to bound trace-cumulant expansions.

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bandspectra {

/// Bit i-1 set <=> element i belongs to the block.
using Block = std::uint32_t;

inline constexpr int kMaxGroundSize = 32;
inline constexpr int kDefaultEnumerationCap = 10;
inline constexpr int kDefaultAuditCap = 4;
inline constexpr int kLargeAuditCap = 5;

/// A set partition of {1..k} held in canonical form: blocks stored as bit
/// masks, ordered by their minimum element. Two partitions are equal iff
/// their canonical forms are equal.
class Partition {
 public:
  Partition() = default;

  /// Blocks given as 1-based element lists, in any order.
  static Partition from_parts(int ground_size, const std::vector<std::vector<int>>& parts);
  static Partition from_blocks(int ground_size, std::vector<Block> blocks);
  /// Restricted growth string: labels[i] is the block index of element i+1.
  static Partition from_labels(std::span<const int> labels);
  static Partition singletons(int ground_size);
  static Partition one_block(int ground_size);

  int ground_size() const noexcept { return ground_size_; }
  std::size_t size() const noexcept { return blocks_.size(); }
  std::span<const Block> blocks() const noexcept { return blocks_; }
  Block universe() const noexcept;

  /// Index of the block containing element (1-based).
  std::size_t block_of(int element) const;
  /// Sizes of the blocks in canonical order.
  std::vector<int> block_sizes() const;
  std::vector<std::vector<int>> parts() const;

  bool is_perfect_matching() const noexcept;
  bool has_singleton() const noexcept;

  /// "{{1,2},{3}}"
  std::string to_string() const;

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition&, const Partition&) = default;

 private:
  Partition(int ground_size, std::vector<Block> blocks) noexcept
      : ground_size_(ground_size), blocks_(std::move(blocks)) {}

  int ground_size_ = 0;
  std::vector<Block> blocks_;
};

inline bool is_perfect_matching(const Partition& p) { return p.is_perfect_matching(); }

/// Every element of Part(k), in restricted-growth-string order.
std::vector<Partition> enumerate_partitions(int k, int cap = kDefaultEnumerationCap);

/// Elements of Part(k) with no singleton block (Part_2(k)).
std::vector<Partition> enumerate_no_singleton(int k, int cap = kDefaultEnumerationCap);

/// All perfect matchings of {1..2m} (there are (2m-1)!!).
std::vector<Partition> enumerate_perfect_matchings(int ground_size, int cap = kDefaultEnumerationCap);

/// Calls visit(blocks) for every set partition of the elements of `mask`;
/// blocks are masks over the full ground set. Order: restricted growth
/// strings over the elements of `mask` taken in increasing order.
void for_each_partition_of(Block mask, const std::function<void(std::span<const Block>)>& visit);

/// Every partition refined by `coarse` (the interval below it in Part(k)).
std::vector<Partition> enumerate_refinements(const Partition& coarse);

/// True iff each block of `fine` lies inside some block of `coarse`.
bool refines(const Partition& fine, const Partition& coarse);

/// Least upper bound: connected components of the union of both block relations.
Partition join(const Partition& a, const Partition& b);

/// Number of blocks of a v b without materializing the partition.
int join_count(const Partition& a, const Partition& b);

/// The standard matchings wiring a product of traces of matrix powers:
/// Pi0 pairs (2t-1, 2t); Pi1 pairs (2t, 2t+1) inside each block of length
/// 2*k_alpha, wrapping the last slot of a block to its first.
std::pair<Partition, Partition> standard_matchings(std::span<const int> block_sizes);

/// prod over A in coarse of (-1)^(m_A - 1) (m_A - 1)!, with m_A the number of
/// blocks of `fine` inside A.
long long mobius_weight(const Partition& coarse, const Partition& fine);

/// Evaluation of the join inequalities for one (Pi0, Pi1, Pi) triple.
struct TripleCheck {
  int k = 0;              // half the ground size
  int join0 = 0;          // #(Pi0 v Pi)
  int join1 = 0;          // #(Pi1 v Pi)
  int parts = 0;          // #Pi
  int r = 0;              // #(Pi0 v Pi1)
  int total_join = 0;     // #(Pi0 v Pi1 v Pi)
  bool basic_holds = false;   // join0 + join1 <= 1 + #Pi <= k + 1
  int basic_slack = 0;        // (k + 1) - (join0 + join1)
  int refined_bound = 0;      // k + 1 - floor(r/2); meaningful when r > 1
  bool refined_holds = true;  // vacuous when r == 1
  int matching_bound = 0;     // k + 2 - r, known to hold when Pi is a perfect matching
  bool matching_bound_holds = false;

  int sum() const noexcept { return join0 + join1; }
};

TripleCheck check_join_bounds(const Partition& pi0, const Partition& pi1, const Partition& pi);

struct AuditSlack {
  int r = 0;
  long long count = 0;
  int min_slack = 0;  // bound - (join0 + join1), bound per r
  int max_slack = 0;
};

struct AuditReport {
  int k = 0;
  long long matchings = 0;       // Pi1 candidates
  long long candidates = 0;      // |Part_2(2k)|
  long long triples_checked = 0; // triples passing the connectivity filter
  long long violations = 0;
  std::vector<std::string> violation_details;  // first few offending triples
  std::vector<AuditSlack> slack_by_r;          // ascending r

  int max_slack() const noexcept;
  int min_slack() const noexcept;
};

/// Exhaustively checks the join inequalities for Pi0 in standard form, every
/// perfect matching Pi1 of {1..2k} and every Pi in Part_2(2k) with
/// #(Pi0 v Pi1 v Pi) = 1.
AuditReport audit_join_bounds(int k, bool allow_large = false);

}  // namespace bandspectra

template <>
struct std::hash<bandspectra::Partition> {
  std::size_t operator()(const bandspectra::Partition& p) const noexcept;
};
