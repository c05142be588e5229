#pragma once

// Rating / trust ingestion, deterministic splits, error metrics and
// sparsity-bucket analysis.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "srhgnn/graph.hpp"

namespace srhgnn::data {

struct RatingRecord {
  std::string user_id;
  std::string item_id;
  double rating = 0.0;
  std::size_t user = 0;
  std::size_t item = 0;
};

/// Raw ids remapped to contiguous indices in order of first appearance.
struct RatingData {
  std::vector<RatingRecord> records;
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  std::unordered_map<std::string, std::size_t> user_index;
  std::unordered_map<std::string, std::size_t> item_index;
  std::size_t duplicates_replaced = 0;

  std::size_t num_users() const { return user_ids.size(); }
  std::size_t num_items() const { return item_ids.size(); }
};

/// Parses `user<TAB|,>item<TAB|,>rating` lines. Ratings must be integers in
/// 1..rating_levels. A repeated (user, item) keeps the last occurrence.
/// Throws DataError naming the line on malformed input, or on empty input.
RatingData parse_ratings(std::istream& in, const std::string& source,
                         int rating_levels = 5);
RatingData load_ratings(const std::filesystem::path& path, int rating_levels = 5);

struct TrustData {
  std::vector<UserPair> edges;  // raw directed pairs over rating indices
  std::size_t raw_ties = 0;     // non-empty lines read
  std::size_t dropped_unknown = 0;
  std::size_t self_ties = 0;
};

/// Parses `user<TAB|,>user` lines, keeping only users present in `ratings`.
TrustData parse_trust(std::istream& in, const std::string& source,
                      const RatingData& ratings);
TrustData load_trust(const std::filesystem::path& path, const RatingData& ratings);

struct SplitSpec {
  double train_percent = 80.0;
  std::uint64_t seed = 0;
};

/// Record indices of each part.
struct DataSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Seeded uniform shuffle, then x% / (1-x%)/2 / rest. Throws ConfigError if
/// validation or test would be empty.
DataSplit split(std::size_t num_records, const SplitSpec& spec);

std::vector<RatingTriple> to_triples(const RatingData& data,
                                     std::span<const std::size_t> indices);

struct Metrics {
  double rmse = 0.0;
  double mae = 0.0;
};

/// Throws ContractError on empty or unequal-length input.
Metrics metrics(std::span<const double> predictions, std::span<const double> truths);

struct EvaluatedPair {
  std::size_t user;
  double truth;
  double prediction;
};

struct SparsityBucket {
  std::size_t users = 0;
  std::size_t pairs = 0;
  std::size_t interaction_mass = 0;  // sum of the users' training counts
  std::size_t min_count = 0;
  std::size_t max_count = 0;
  Metrics metrics;
  double squared_error_sum = 0.0;
};

struct SparsityReport {
  std::vector<SparsityBucket> buckets;
  Metrics overall;
  std::size_t evaluated_users = 0;
};

/// Sorts evaluated users by training-interaction count and cuts them into
/// `bucket_count` contiguous groups of near-equal total training mass.
/// Throws ContractError when there are fewer users than buckets.
SparsityReport sparsity_report(std::span<const EvaluatedPair> pairs,
                               std::span<const std::size_t> train_counts,
                               std::size_t bucket_count = 3);

}  // namespace srhgnn::data
