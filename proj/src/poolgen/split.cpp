#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "revmatch/poolgen.hpp"
#include "revmatch/util/hash.hpp"
#include "revmatch/util/rng.hpp"

namespace revmatch {

std::vector<std::size_t> apportion(std::size_t total, std::span<const int> ratios) {
  if (ratios.empty()) throw std::invalid_argument("apportion: no ratios");
  long long sum = 0;
  for (int r : ratios) {
    if (r < 0) throw std::invalid_argument("apportion: negative ratio");
    sum += r;
  }
  if (sum == 0) throw std::invalid_argument("apportion: ratios sum to zero");

  // Exact integer arithmetic: quota_i = total * r_i / sum.
  std::vector<std::size_t> counts(ratios.size());
  std::vector<long long> remainders(ratios.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const long long num = static_cast<long long>(total) * ratios[i];
    counts[i] = static_cast<std::size_t>(num / sum);
    remainders[i] = num % sum;
    assigned += counts[i];
  }
  std::vector<std::size_t> order(ratios.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++counts[order[k]];
  return counts;
}

SplitResult stratified_split(std::span<const ReviewRecord> records, std::array<int, 3> ratios,
                             std::uint64_t seed) {
  std::map<std::string, std::vector<std::string>> strata;
  for (const ReviewRecord& r : records) {
    if (r.l1_category.empty()) throw std::invalid_argument("record " + r.record_id() + " has no L1 category");
    strata[r.l1_category].push_back(r.record_id());
  }
  SplitResult out;
  std::array<std::vector<std::string>*, 3> parts{&out.train, &out.val, &out.test};
  for (auto& [l1, ids] : strata) {
    // Sorting first makes the result independent of input order.
    std::sort(ids.begin(), ids.end());
    Rng rng(derive_seed(seed, "split:" + l1));
    rng.shuffle(ids);
    const auto counts = apportion(ids.size(), ratios);
    std::size_t pos = 0;
    for (std::size_t p = 0; p < 3; ++p) {
      for (std::size_t k = 0; k < counts[p]; ++k) parts[p]->push_back(ids[pos++]);
    }
  }
  return out;
}

}  // namespace revmatch
