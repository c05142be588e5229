#include "srhgnn/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "srhgnn/errors.hpp"
#include "srhgnn/rng.hpp"

namespace srhgnn::synthetic {

std::vector<RatingTriple> t1_ratings() {
  return {{0, 0, 1.0}, {1, 0, 2.0}, {1, 1, 1.0}};
}

std::vector<UserPair> t1_social_edges() { return {{0, 1}}; }

UserSocialGraph two_cliques(std::size_t clique_size) {
  std::vector<UserPair> edges;
  for (std::size_t c = 0; c < 2; ++c) {
    const std::size_t base = c * clique_size;
    for (std::size_t i = 0; i < clique_size; ++i) {
      for (std::size_t j = i + 1; j < clique_size; ++j) edges.emplace_back(base + i, base + j);
    }
  }
  return build_social_graph(edges, 2 * clique_size);
}

PlantedData planted(const PlantedSpec& spec) {
  if (spec.users == 0 || spec.items == 0 || spec.rank < 1) {
    throw ConfigError("planted dataset needs users, items and rank > 0");
  }
  Rng rng(spec.seed);
  const auto r = static_cast<std::size_t>(spec.rank);
  PlantedData out;

  std::vector<std::vector<double>> centers(spec.communities, std::vector<double>(r));
  for (auto& c : centers) {
    for (double& x : c) x = rng.normal();
  }
  std::vector<std::vector<double>> user_f(spec.users, std::vector<double>(r));
  for (std::size_t u = 0; u < spec.users; ++u) {
    if (spec.communities > 0) {
      const std::size_t g = u % spec.communities;
      out.community.push_back(g);
      for (std::size_t j = 0; j < r; ++j) {
        user_f[u][j] = centers[g][j] + spec.community_spread * rng.normal();
      }
    } else {
      for (double& x : user_f[u]) x = rng.normal();
    }
  }
  std::vector<std::vector<double>> item_f(spec.items, std::vector<double>(r));
  for (auto& f : item_f) {
    for (double& x : f) x = rng.normal();
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (spec.interactions > 0) {
    if (spec.interactions > spec.users * spec.items) {
      throw ConfigError("more planted interactions than user-item pairs");
    }
    std::set<std::pair<std::size_t, std::size_t>> chosen;
    while (chosen.size() < spec.interactions) {
      chosen.emplace(rng.index(spec.users), rng.index(spec.items));
    }
    pairs.assign(chosen.begin(), chosen.end());
  } else {
    for (std::size_t u = 0; u < spec.users; ++u) {
      for (std::size_t i = 0; i < spec.items; ++i) {
        if (rng.uniform() < spec.density) pairs.emplace_back(u, i);
      }
    }
  }

  // Register every user and item so indices equal the generator's ids.
  auto& rd = out.ratings;
  for (std::size_t u = 0; u < spec.users; ++u) {
    rd.user_ids.push_back("u" + std::to_string(u));
    rd.user_index.emplace(rd.user_ids.back(), u);
  }
  for (std::size_t i = 0; i < spec.items; ++i) {
    rd.item_ids.push_back("i" + std::to_string(i));
    rd.item_index.emplace(rd.item_ids.back(), i);
  }
  const double norm = std::sqrt(static_cast<double>(r));
  for (const auto& [u, i] : pairs) {
    double dot = 0.0;
    for (std::size_t j = 0; j < r; ++j) dot += user_f[u][j] * item_f[i][j];
    const double raw = 3.0 + spec.signal_scale * dot / norm + spec.noise * rng.normal();
    const double rating =
        std::clamp(std::round(raw), 1.0, static_cast<double>(spec.rating_levels));
    rd.records.push_back({rd.user_ids[u], rd.item_ids[i], rating, u, i});
  }

  if (spec.communities > 0) {
    for (std::size_t a = 0; a < spec.users; ++a) {
      for (std::size_t b = a + 1; b < spec.users; ++b) {
        const double p = out.community[a] == out.community[b] ? spec.social_in : spec.social_out;
        if (rng.uniform() < p) out.trust.edges.emplace_back(a, b);
      }
    }
    out.trust.raw_ties = out.trust.edges.size();
  }
  return out;
}

}  // namespace srhgnn::synthetic
