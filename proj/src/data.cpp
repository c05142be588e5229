#include "srhgnn/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string_view>

#include <spdlog/spdlog.h>

#include "srhgnn/errors.hpp"
#include "srhgnn/rng.hpp"

namespace srhgnn::data {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  const char delim = line.find('\t') != std::string_view::npos ? '\t' : ',';
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delim, start);
    std::string_view f = line.substr(start, pos == std::string_view::npos ? pos : pos - start);
    while (!f.empty() && (f.front() == ' ')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ')) f.remove_suffix(1);
    out.push_back(f);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim_line(const std::string& line) {
  std::string_view v(line);
  while (!v.empty() && (v.back() == '\r' || v.back() == '\n' || v.back() == ' ')) {
    v.remove_suffix(1);
  }
  return v;
}

[[noreturn]] void bad_line(const std::string& source, std::size_t line_no,
                           const std::string& why) {
  throw DataError(source + ":" + std::to_string(line_no) + ": " + why);
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

}  // namespace

RatingData parse_ratings(std::istream& in, const std::string& source,
                         int rating_levels) {
  RatingData data;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> position;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view v = trim_line(line);
    if (v.empty()) continue;
    const auto fields = split_fields(v);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      bad_line(source, line_no, "expected user, item, rating");
    }
    double rating = 0.0;
    const auto [ptr, ec] =
        std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), rating);
    if (ec != std::errc() || ptr != fields[2].data() + fields[2].size()) {
      bad_line(source, line_no, "rating '" + std::string(fields[2]) + "' is not a number");
    }
    if (rating != std::round(rating) || rating < 1.0 ||
        rating > static_cast<double>(rating_levels)) {
      bad_line(source, line_no, "rating " + std::string(fields[2]) +
                                    " is not an integer in 1.." +
                                    std::to_string(rating_levels));
    }
    RatingRecord r;
    r.user_id = std::string(fields[0]);
    r.item_id = std::string(fields[1]);
    r.rating = rating;
    auto [uit, unew] = data.user_index.try_emplace(r.user_id, data.user_ids.size());
    if (unew) data.user_ids.push_back(r.user_id);
    auto [iit, inew] = data.item_index.try_emplace(r.item_id, data.item_ids.size());
    if (inew) data.item_ids.push_back(r.item_id);
    r.user = uit->second;
    r.item = iit->second;
    auto [pit, fresh] = position.try_emplace({r.user, r.item}, data.records.size());
    if (fresh) {
      data.records.push_back(std::move(r));
    } else {
      spdlog::warn("{}:{}: repeated rating for user {} item {}; keeping the last",
                   source, line_no, r.user_id, r.item_id);
      data.records[pit->second] = std::move(r);
      ++data.duplicates_replaced;
    }
  }
  if (data.records.empty()) throw DataError(source + ": no ratings");
  spdlog::info("{}: {} users, {} items, {} interactions", source, data.num_users(),
               data.num_items(), data.records.size());
  return data;
}

RatingData load_ratings(const std::filesystem::path& path, int rating_levels) {
  std::ifstream in = open_or_throw(path);
  return parse_ratings(in, path.string(), rating_levels);
}

TrustData parse_trust(std::istream& in, const std::string& source,
                      const RatingData& ratings) {
  TrustData out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view v = trim_line(line);
    if (v.empty()) continue;
    const auto fields = split_fields(v);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      bad_line(source, line_no, "expected user, user");
    }
    ++out.raw_ties;
    const auto a = ratings.user_index.find(std::string(fields[0]));
    const auto b = ratings.user_index.find(std::string(fields[1]));
    if (a == ratings.user_index.end() || b == ratings.user_index.end()) {
      ++out.dropped_unknown;
      continue;
    }
    if (a->second == b->second) {
      ++out.self_ties;
      continue;
    }
    out.edges.emplace_back(a->second, b->second);
  }
  spdlog::info("{}: {} raw ties, {} dropped (user without ratings), {} self ties",
               source, out.raw_ties, out.dropped_unknown, out.self_ties);
  return out;
}

TrustData load_trust(const std::filesystem::path& path, const RatingData& ratings) {
  std::ifstream in = open_or_throw(path);
  return parse_trust(in, path.string(), ratings);
}

DataSplit split(std::size_t num_records, const SplitSpec& spec) {
  if (!(spec.train_percent > 0.0 && spec.train_percent < 100.0)) {
    throw ConfigError("train percent must lie strictly between 0 and 100");
  }
  const auto n_train = static_cast<std::size_t>(
      std::floor(static_cast<double>(num_records) * spec.train_percent / 100.0 + 0.5));
  const std::size_t rest = num_records - std::min(n_train, num_records);
  const std::size_t n_val = rest / 2;
  const std::size_t n_test = rest - n_val;
  if (n_val == 0 || n_test == 0) {
    throw ConfigError("split of " + std::to_string(num_records) +
                      " records leaves an empty validation or test set");
  }
  Rng rng = Rng::stream(spec.seed, "split");
  const auto order = rng.permutation(num_records);
  DataSplit out;
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                        order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  return out;
}

std::vector<RatingTriple> to_triples(const RatingData& data,
                                     std::span<const std::size_t> indices) {
  std::vector<RatingTriple> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    const auto& r = data.records[i];
    out.push_back({r.user, r.item, r.rating});
  }
  return out;
}

Metrics metrics(std::span<const double> predictions, std::span<const double> truths) {
  if (predictions.empty() || predictions.size() != truths.size()) {
    throw ContractError("metrics need equal-length non-empty inputs");
  }
  double se = 0.0;
  double ae = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double e = predictions[i] - truths[i];
    se += e * e;
    ae += std::abs(e);
  }
  const auto n = static_cast<double>(predictions.size());
  return {std::sqrt(se / n), ae / n};
}

namespace {

/// Contiguous cut points over `mass` (sorted ascending) into `parts` groups,
/// refined by single-step boundary moves while the max-min spread shrinks.
using Cuts = std::vector<std::size_t>;

std::size_t spread_of(const std::vector<std::size_t>& prefix, const Cuts& cuts) {
  std::size_t lo = std::numeric_limits<std::size_t>::max();
  std::size_t hi = 0;
  for (std::size_t b = 0; b + 1 < cuts.size(); ++b) {
    const std::size_t m = prefix[cuts[b + 1]] - prefix[cuts[b]];
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  return hi - lo;
}

// Cut positions closest to each b/parts share of the total mass.
Cuts nearest_target_cuts(const std::vector<std::size_t>& prefix, std::size_t parts) {
  const std::size_t n = prefix.size() - 1;
  const double total = static_cast<double>(prefix[n]);
  Cuts cuts(parts + 1, 0);
  cuts[parts] = n;
  for (std::size_t b = 1; b < parts; ++b) {
    const double target = total * static_cast<double>(b) / static_cast<double>(parts);
    std::size_t best = cuts[b - 1] + 1;
    for (std::size_t c = best + 1; c + (parts - b) <= n; ++c) {
      if (std::abs(static_cast<double>(prefix[c]) - target) <
          std::abs(static_cast<double>(prefix[best]) - target)) {
        best = c;
      }
    }
    cuts[b] = best;
  }
  return cuts;
}

// Contiguous partition with every non-empty bucket mass in [lo, hi], if any.
std::optional<Cuts> partition_within(const std::vector<std::size_t>& prefix,
                                     std::size_t parts, std::size_t lo, std::size_t hi) {
  const std::size_t n = prefix.size() - 1;
  // reach[b][i]: the first i users can form b buckets. count[b] is its prefix sum.
  std::vector<std::vector<char>> reach(parts + 1, std::vector<char>(n + 1, 0));
  std::vector<std::vector<std::size_t>> count(parts + 1, std::vector<std::size_t>(n + 2, 0));
  reach[0][0] = 1;
  auto valid_range = [&](std::size_t i) {
    // j < i with prefix[i] - hi <= prefix[j] <= prefix[i] - lo.
    const std::size_t want_hi = prefix[i] >= lo ? prefix[i] - lo : 0;
    const std::size_t want_lo = prefix[i] >= hi ? prefix[i] - hi : 0;
    const auto first = static_cast<std::size_t>(
        std::lower_bound(prefix.begin(), prefix.begin() + static_cast<std::ptrdiff_t>(i), want_lo) -
        prefix.begin());
    auto last = static_cast<std::size_t>(
        std::upper_bound(prefix.begin(), prefix.begin() + static_cast<std::ptrdiff_t>(i), want_hi) -
        prefix.begin());
    if (prefix[i] < lo) last = first;
    return std::pair{first, last};  // half-open
  };
  for (std::size_t b = 0; b <= parts; ++b) {
    if (b > 0) {
      for (std::size_t i = 1; i <= n; ++i) {
        const auto [first, last] = valid_range(i);
        reach[b][i] = first < last && count[b - 1][last] > count[b - 1][first];
      }
    }
    for (std::size_t i = 0; i <= n; ++i) count[b][i + 1] = count[b][i] + reach[b][i];
  }
  if (!reach[parts][n]) return std::nullopt;

  const double total = static_cast<double>(prefix[n]);
  Cuts cuts(parts + 1, 0);
  cuts[parts] = n;
  for (std::size_t b = parts - 1; b >= 1; --b) {
    const auto [first, last] = valid_range(cuts[b + 1]);
    const double target = total * static_cast<double>(b) / static_cast<double>(parts);
    std::size_t best = n + 1;
    for (std::size_t j = first; j < last; ++j) {
      if (!reach[b][j]) continue;
      if (best > n || std::abs(static_cast<double>(prefix[j]) - target) <
                          std::abs(static_cast<double>(prefix[best]) - target)) {
        best = j;
      }
    }
    cuts[b] = best;
  }
  return cuts;
}

// Contiguous cut of sorted per-user masses into `parts` non-empty groups that
// minimizes the spread between the heaviest and lightest group.
Cuts balanced_cuts(const std::vector<std::size_t>& mass, std::size_t parts) {
  const std::size_t n = mass.size();
  std::vector<std::size_t> prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + mass[i];
  Cuts best = nearest_target_cuts(prefix, parts);
  if (parts == 1) return best;
  std::size_t best_spread = spread_of(prefix, best);

  // Any better partition has its lightest group in [mean - spread, mean] and
  // its heaviest in [mean, mean + spread]. The smallest feasible upper bound
  // never decreases as the lower bound rises, so one sweep suffices.
  const std::size_t floor_mean = prefix[n] / parts;
  const std::size_t ceil_mean = (prefix[n] + parts - 1) / parts;
  std::size_t lo = floor_mean >= best_spread ? floor_mean - best_spread : 0;
  std::size_t hi = ceil_mean;
  for (; lo <= floor_mean; ++lo) {
    hi = std::max(hi, lo);
    while (hi < lo + best_spread && !partition_within(prefix, parts, lo, hi)) ++hi;
    if (hi >= lo + best_spread) continue;
    best = *partition_within(prefix, parts, lo, hi);
    best_spread = spread_of(prefix, best);
  }
  return best;
}

}  // namespace

SparsityReport sparsity_report(std::span<const EvaluatedPair> pairs,
                               std::span<const std::size_t> train_counts,
                               std::size_t bucket_count) {
  if (bucket_count == 0) throw ContractError("bucket count must be positive");
  std::map<std::size_t, std::vector<const EvaluatedPair*>> by_user;
  for (const auto& p : pairs) {
    if (p.user >= train_counts.size()) {
      throw ContractError("sparsity report: user index without a training count");
    }
    by_user[p.user].push_back(&p);
  }
  if (by_user.size() < bucket_count) {
    throw ContractError("sparsity report: " + std::to_string(by_user.size()) +
                        " users for " + std::to_string(bucket_count) + " buckets");
  }
  std::vector<std::size_t> users;
  for (const auto& [u, _] : by_user) users.push_back(u);
  std::stable_sort(users.begin(), users.end(), [&](std::size_t a, std::size_t b) {
    return train_counts[a] < train_counts[b];
  });
  std::vector<std::size_t> mass;
  for (std::size_t u : users) mass.push_back(train_counts[u]);
  const auto cuts = balanced_cuts(mass, bucket_count);

  SparsityReport report;
  report.evaluated_users = users.size();
  double total_se = 0.0;
  double total_ae = 0.0;
  std::size_t total_pairs = 0;
  for (std::size_t b = 0; b < bucket_count; ++b) {
    SparsityBucket bucket;
    bucket.min_count = mass[cuts[b]];
    bucket.max_count = mass[cuts[b + 1] - 1];
    double ae = 0.0;
    for (std::size_t i = cuts[b]; i < cuts[b + 1]; ++i) {
      ++bucket.users;
      bucket.interaction_mass += mass[i];
      for (const EvaluatedPair* p : by_user[users[i]]) {
        const double e = p->prediction - p->truth;
        bucket.squared_error_sum += e * e;
        ae += std::abs(e);
        ++bucket.pairs;
      }
    }
    const auto n = static_cast<double>(bucket.pairs);
    bucket.metrics = {std::sqrt(bucket.squared_error_sum / n), ae / n};
    total_se += bucket.squared_error_sum;
    total_ae += ae;
    total_pairs += bucket.pairs;
    report.buckets.push_back(bucket);
  }
  const auto n = static_cast<double>(total_pairs);
  report.overall = {std::sqrt(total_se / n), total_ae / n};
  return report;
}

}  // namespace srhgnn::data
