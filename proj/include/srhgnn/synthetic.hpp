#pragma once

// Small deterministic datasets used by the tests, the acceptance suite and
// the CLI's gradcheck command.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "srhgnn/data.hpp"
#include "srhgnn/graph.hpp"

namespace srhgnn::synthetic {

/// Fixture T1: M=3, N=2, K=2 with interactions (u0,v0,1), (u1,v0,2),
/// (u1,v1,1) and one social tie u0-u1 (u2 isolated).
std::vector<RatingTriple> t1_ratings();
std::vector<UserPair> t1_social_edges();
inline constexpr std::size_t kT1Users = 3;
inline constexpr std::size_t kT1Items = 2;
inline constexpr int kT1Relations = 2;

/// Two disjoint complete cliques of `clique_size` users each.
UserSocialGraph two_cliques(std::size_t clique_size);

struct PlantedSpec {
  std::size_t users = 50;
  std::size_t items = 100;
  int rank = 4;
  int rating_levels = 5;
  double noise = 0.1;
  double density = 0.4;          // used when interactions == 0
  std::size_t interactions = 0;  // exact count of distinct observed pairs
  double signal_scale = 1.2;
  std::size_t communities = 0;   // 0: independent user factors
  double community_spread = 0.3;
  double social_in = 0.3;        // tie probability inside a community
  double social_out = 0.0;       // tie probability across communities
  std::uint64_t seed = 7;
};

struct PlantedData {
  data::RatingData ratings;
  data::TrustData trust;
  std::vector<std::size_t> community;  // per user, empty when communities == 0
};

/// Ratings round(3 + scale * <u, v> / sqrt(rank) + noise) clamped to
/// 1..rating_levels, from Gaussian user / item factors.
PlantedData planted(const PlantedSpec& spec);

}  // namespace srhgnn::synthetic
