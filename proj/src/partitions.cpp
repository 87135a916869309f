#include "bandspectra/partitions.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>

#include "bandspectra/error.hpp"

namespace bandspectra {

namespace {

Block full_mask(int k) { return k >= 32 ? ~Block{0} : ((Block{1} << k) - 1); }

void check_ground_size(int k) {
  if (k < 1 || k > kMaxGroundSize) {
    throw DomainError("ground size must lie in [1, " + std::to_string(kMaxGroundSize) + "], got " +
                      std::to_string(k));
  }
}

void canonicalize(std::vector<Block>& blocks) {
  std::sort(blocks.begin(), blocks.end(),
            [](Block a, Block b) { return std::countr_zero(a) < std::countr_zero(b); });
}

void check_same_ground(const Partition& a, const Partition& b) {
  if (a.ground_size() != b.ground_size()) {
    throw DomainError("partitions over different ground sets: " + std::to_string(a.ground_size()) +
                      " vs " + std::to_string(b.ground_size()));
  }
}

// Restricted growth strings over `elems`, emitting block masks.
void rgs_recurse(const std::vector<int>& elems, std::size_t pos, std::vector<Block>& blocks,
                 const std::function<void(std::span<const Block>)>& visit) {
  if (pos == elems.size()) {
    visit(blocks);
    return;
  }
  const Block bit = Block{1} << elems[pos];
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    blocks[b] |= bit;
    rgs_recurse(elems, pos + 1, blocks, visit);
    blocks[b] &= ~bit;
  }
  blocks.push_back(bit);
  rgs_recurse(elems, pos + 1, blocks, visit);
  blocks.pop_back();
}

void check_cap(int k, int cap) {
  if (k < 1) throw DomainError("partition ground size must be positive, got " + std::to_string(k));
  if (k > cap) throw CapacityError("partition enumeration size", k, cap);
  if (k > kMaxGroundSize) throw CapacityError("partition enumeration size", k, kMaxGroundSize);
}

long long factorial(int m) {
  long long f = 1;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

}  // namespace

Partition Partition::from_blocks(int ground_size, std::vector<Block> blocks) {
  check_ground_size(ground_size);
  Block seen = 0;
  for (Block b : blocks) {
    if (b == 0) throw DomainError("partition has an empty part");
    if (seen & b) throw DomainError("partition parts overlap");
    seen |= b;
  }
  if (seen != full_mask(ground_size)) {
    throw DomainError("partition parts do not cover {1.." + std::to_string(ground_size) + "}");
  }
  canonicalize(blocks);
  return Partition(ground_size, std::move(blocks));
}

Partition Partition::from_parts(int ground_size, const std::vector<std::vector<int>>& parts) {
  check_ground_size(ground_size);
  std::vector<Block> blocks;
  blocks.reserve(parts.size());
  for (const auto& part : parts) {
    Block b = 0;
    for (int e : part) {
      if (e < 1 || e > ground_size) {
        throw DomainError("element " + std::to_string(e) + " outside {1.." + std::to_string(ground_size) +
                          "}");
      }
      const Block bit = Block{1} << (e - 1);
      if (b & bit) throw DomainError("element " + std::to_string(e) + " repeated in a part");
      b |= bit;
    }
    blocks.push_back(b);
  }
  return from_blocks(ground_size, std::move(blocks));
}

Partition Partition::from_labels(std::span<const int> labels) {
  const int k = static_cast<int>(labels.size());
  check_ground_size(k);
  std::vector<Block> blocks;
  for (int i = 0; i < k; ++i) {
    const int lab = labels[i];
    if (lab < 0) throw DomainError("negative block label");
    if (static_cast<std::size_t>(lab) >= blocks.size()) blocks.resize(lab + 1, 0);
    blocks[lab] |= Block{1} << i;
  }
  std::erase(blocks, Block{0});
  return from_blocks(k, std::move(blocks));
}

Partition Partition::singletons(int ground_size) {
  check_ground_size(ground_size);
  std::vector<Block> blocks(ground_size);
  for (int i = 0; i < ground_size; ++i) blocks[i] = Block{1} << i;
  return Partition(ground_size, std::move(blocks));
}

Partition Partition::one_block(int ground_size) {
  check_ground_size(ground_size);
  return Partition(ground_size, {full_mask(ground_size)});
}

Block Partition::universe() const noexcept { return full_mask(ground_size_); }

std::size_t Partition::block_of(int element) const {
  if (element < 1 || element > ground_size_) throw DomainError("element outside ground set");
  const Block bit = Block{1} << (element - 1);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i] & bit) return i;
  }
  throw DomainError("element not covered");  // unreachable for a valid partition
}

std::vector<int> Partition::block_sizes() const {
  std::vector<int> sizes;
  sizes.reserve(blocks_.size());
  for (Block b : blocks_) sizes.push_back(std::popcount(b));
  return sizes;
}

std::vector<std::vector<int>> Partition::parts() const {
  std::vector<std::vector<int>> out;
  out.reserve(blocks_.size());
  for (Block b : blocks_) {
    std::vector<int> part;
    for (Block m = b; m != 0; m &= m - 1) part.push_back(std::countr_zero(m) + 1);
    out.push_back(std::move(part));
  }
  return out;
}

bool Partition::is_perfect_matching() const noexcept {
  return !blocks_.empty() &&
         std::all_of(blocks_.begin(), blocks_.end(), [](Block b) { return std::popcount(b) == 2; });
}

bool Partition::has_singleton() const noexcept {
  return std::any_of(blocks_.begin(), blocks_.end(), [](Block b) { return std::popcount(b) == 1; });
}

std::string Partition::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first_part = true;
  for (const auto& part : parts()) {
    if (!first_part) os << ',';
    first_part = false;
    os << '{';
    for (std::size_t i = 0; i < part.size(); ++i) os << (i ? "," : "") << part[i];
    os << '}';
  }
  os << '}';
  return os.str();
}

void for_each_partition_of(Block mask, const std::function<void(std::span<const Block>)>& visit) {
  std::vector<int> elems;
  for (Block m = mask; m != 0; m &= m - 1) elems.push_back(std::countr_zero(m));
  std::vector<Block> blocks;
  blocks.reserve(elems.size());
  if (elems.empty()) {
    visit(blocks);
    return;
  }
  rgs_recurse(elems, 0, blocks, visit);
}

std::vector<Partition> enumerate_partitions(int k, int cap) {
  check_cap(k, cap);
  std::vector<Partition> out;
  for_each_partition_of(full_mask(k), [&](std::span<const Block> blocks) {
    out.push_back(Partition::from_blocks(k, {blocks.begin(), blocks.end()}));
  });
  return out;
}

std::vector<Partition> enumerate_no_singleton(int k, int cap) {
  check_cap(k, cap);
  std::vector<Partition> out;
  for_each_partition_of(full_mask(k), [&](std::span<const Block> blocks) {
    if (std::any_of(blocks.begin(), blocks.end(), [](Block b) { return std::popcount(b) < 2; })) return;
    out.push_back(Partition::from_blocks(k, {blocks.begin(), blocks.end()}));
  });
  return out;
}

std::vector<Partition> enumerate_perfect_matchings(int ground_size, int cap) {
  check_cap(ground_size, cap);
  std::vector<Partition> out;
  if (ground_size % 2 != 0) return out;
  std::vector<Block> blocks;
  std::function<void(Block)> recurse = [&](Block remaining) {
    if (remaining == 0) {
      out.push_back(Partition::from_blocks(ground_size, blocks));
      return;
    }
    const Block first = remaining & (~remaining + 1);
    const Block rest = remaining & ~first;
    for (Block m = rest; m != 0; m &= m - 1) {
      const Block partner = m & (~m + 1);
      blocks.push_back(first | partner);
      recurse(rest & ~partner);
      blocks.pop_back();
    }
  };
  recurse(full_mask(ground_size));
  return out;
}

std::vector<Partition> enumerate_refinements(const Partition& coarse) {
  // Cartesian product of the partitions of each block.
  std::vector<std::vector<std::vector<Block>>> per_block;
  per_block.reserve(coarse.size());
  for (Block b : coarse.blocks()) {
    std::vector<std::vector<Block>> options;
    for_each_partition_of(b, [&](std::span<const Block> blocks) { options.emplace_back(blocks.begin(), blocks.end()); });
    per_block.push_back(std::move(options));
  }
  std::vector<Partition> out;
  std::vector<std::size_t> idx(per_block.size(), 0);
  while (true) {
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < per_block.size(); ++i) {
      const auto& choice = per_block[i][idx[i]];
      blocks.insert(blocks.end(), choice.begin(), choice.end());
    }
    out.push_back(Partition::from_blocks(coarse.ground_size(), std::move(blocks)));
    std::size_t i = per_block.size();
    while (i > 0) {
      --i;
      if (++idx[i] < per_block[i].size()) break;
      idx[i] = 0;
      if (i == 0) return out;
    }
    if (per_block.empty()) return out;
  }
}

bool refines(const Partition& fine, const Partition& coarse) {
  check_same_ground(fine, coarse);
  for (Block f : fine.blocks()) {
    const bool inside = std::any_of(coarse.blocks().begin(), coarse.blocks().end(),
                                    [f](Block c) { return (f & ~c) == 0; });
    if (!inside) return false;
  }
  return true;
}

namespace {

std::vector<Block> join_blocks(std::span<const Block> a, std::span<const Block> b) {
  std::vector<Block> merged(a.begin(), a.end());
  for (Block nb : b) {
    Block acc = nb;
    std::vector<Block> kept;
    kept.reserve(merged.size());
    for (Block m : merged) {
      if (m & acc) {
        acc |= m;
      } else {
        kept.push_back(m);
      }
    }
    kept.push_back(acc);
    merged = std::move(kept);
  }
  return merged;
}

}  // namespace

Partition join(const Partition& a, const Partition& b) {
  check_same_ground(a, b);
  return Partition::from_blocks(a.ground_size(), join_blocks(a.blocks(), b.blocks()));
}

int join_count(const Partition& a, const Partition& b) {
  check_same_ground(a, b);
  return static_cast<int>(join_blocks(a.blocks(), b.blocks()).size());
}

std::pair<Partition, Partition> standard_matchings(std::span<const int> block_sizes) {
  if (block_sizes.empty()) throw DomainError("standard_matchings needs at least one block size");
  int k = 0;
  for (int s : block_sizes) {
    if (s < 1) throw DomainError("block sizes must be positive");
    k += s;
  }
  const int ground = 2 * k;
  check_ground_size(ground);
  auto bit = [](int e) { return Block{1} << (e - 1); };

  std::vector<Block> pi0;
  for (int t = 1; t <= k; ++t) pi0.push_back(bit(2 * t - 1) | bit(2 * t));

  std::vector<Block> pi1;
  int offset = 0;  // K_{alpha-1}
  for (int s : block_sizes) {
    const int end = offset + 2 * s;  // K_alpha
    for (int nu = 1; nu < s; ++nu) pi1.push_back(bit(offset + 2 * nu) | bit(offset + 2 * nu + 1));
    pi1.push_back(bit(end) | bit(offset + 1));
    offset = end;
  }
  return {Partition::from_blocks(ground, std::move(pi0)), Partition::from_blocks(ground, std::move(pi1))};
}

long long mobius_weight(const Partition& coarse, const Partition& fine) {
  if (!refines(fine, coarse)) {
    throw DomainError("mobius_weight: " + fine.to_string() + " does not refine " + coarse.to_string());
  }
  long long w = 1;
  for (Block c : coarse.blocks()) {
    int m = 0;
    for (Block f : fine.blocks()) m += (f & ~c) == 0 ? 1 : 0;
    w *= ((m - 1) % 2 == 0 ? 1 : -1) * factorial(m - 1);
  }
  return w;
}

TripleCheck check_join_bounds(const Partition& pi0, const Partition& pi1, const Partition& pi) {
  check_same_ground(pi0, pi1);
  check_same_ground(pi0, pi);
  TripleCheck t;
  t.k = pi0.ground_size() / 2;
  t.join0 = join_count(pi0, pi);
  t.join1 = join_count(pi1, pi);
  t.parts = static_cast<int>(pi.size());
  const auto p01 = join(pi0, pi1);
  t.r = static_cast<int>(p01.size());
  t.total_join = join_count(p01, pi);
  t.basic_slack = (t.k + 1) - t.sum();
  t.basic_holds = t.sum() <= 1 + t.parts && 1 + t.parts <= t.k + 1;
  t.refined_bound = t.k + 1 - t.r / 2;
  t.refined_holds = t.r <= 1 || t.sum() <= t.refined_bound;
  t.matching_bound = t.k + 2 - t.r;
  t.matching_bound_holds = t.sum() <= t.matching_bound;
  return t;
}

int AuditReport::max_slack() const noexcept {
  int m = 0;
  bool any = false;
  for (const auto& s : slack_by_r) {
    if (s.count == 0) continue;
    m = any ? std::max(m, s.max_slack) : s.max_slack;
    any = true;
  }
  return m;
}

int AuditReport::min_slack() const noexcept {
  int m = 0;
  bool any = false;
  for (const auto& s : slack_by_r) {
    if (s.count == 0) continue;
    m = any ? std::min(m, s.min_slack) : s.min_slack;
    any = true;
  }
  return m;
}

AuditReport audit_join_bounds(int k, bool allow_large) {
  const int cap = allow_large ? kLargeAuditCap : kDefaultAuditCap;
  if (k < 1) throw DomainError("audit needs k >= 1");
  if (k > cap) throw CapacityError("join-bound audit k", k, cap);

  AuditReport report;
  report.k = k;
  const int ground = 2 * k;
  const std::vector<int> one{k};
  const Partition pi0 = standard_matchings(one).first;
  const auto matchings = enumerate_perfect_matchings(ground, ground);
  const auto candidates = enumerate_no_singleton(ground, ground);
  report.matchings = static_cast<long long>(matchings.size());
  report.candidates = static_cast<long long>(candidates.size());

  std::vector<AuditSlack> slack(k + 1);
  for (int r = 0; r <= k; ++r) slack[r].r = r;

  for (const auto& pi1 : matchings) {
    const auto p01 = join(pi0, pi1);
    const int r = static_cast<int>(p01.size());
    for (const auto& pi : candidates) {
      if (join_count(p01, pi) != 1) continue;
      const TripleCheck t = check_join_bounds(pi0, pi1, pi);
      ++report.triples_checked;
      const int bound = r > 1 ? t.refined_bound : t.k + 1;
      const int s = bound - t.sum();
      auto& cell = slack[r];
      if (cell.count == 0) {
        cell.min_slack = cell.max_slack = s;
      } else {
        cell.min_slack = std::min(cell.min_slack, s);
        cell.max_slack = std::max(cell.max_slack, s);
      }
      ++cell.count;
      if (!t.basic_holds || !t.refined_holds) {
        ++report.violations;
        if (report.violation_details.size() < 10) {
          report.violation_details.push_back("Pi1=" + pi1.to_string() + " Pi=" + pi.to_string());
        }
      }
    }
  }
  for (auto& cell : slack) {
    if (cell.count > 0) report.slack_by_r.push_back(cell);
  }
  return report;
}

}  // namespace bandspectra

std::size_t std::hash<bandspectra::Partition>::operator()(const bandspectra::Partition& p) const noexcept {
  std::size_t h = static_cast<std::size_t>(p.ground_size());
  for (auto b : p.blocks()) h = h * 0x100000001b3ULL ^ b;
  return h;
}
