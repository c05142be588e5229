#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "srhgnn/predictor.hpp"

namespace srhgnn {

enum class SocialEncoderVariant { kMutualInformation, kGcn, kGat };

std::string to_string(SocialEncoderVariant v);
SocialEncoderVariant parse_social_encoder(const std::string& name);

/// Every knob of a training run. Field names map one-to-one onto the keys of
/// the flat `key = value` configuration file (see config_keys()).
struct TrainConfig {
  // Model widths.
  std::size_t dim = 16;          // dim
  int layers = 2;                // layers
  std::size_t social_dim = 128;  // social_dim
  int social_layers = 1;         // social_layers
  std::size_t recon_hidden = 0;  // recon_hidden, 0 means dim
  int rating_levels = 5;         // rating_levels

  predict::LossWeights weights;  // omega1, omega2, omega_r

  double learning_rate = 1e-3;           // learning_rate
  double pretrain_learning_rate = 1e-3;  // pretrain_learning_rate
  int pretrain_epochs = 200;             // pretrain_epochs (E_1)
  int epochs = 500;                      // epochs (E_2)
  std::size_t batch_size = 2048;         // batch_size, 0 means full batch
  int patience = 10;                     // patience
  int negatives = 1;                     // negatives (sample number s)
  std::uint64_t seed = 42;               // seed
  double train_percent = 80.0;           // x_percent

  bool use_social = true;          // social
  bool multi_type = true;          // multi_type
  bool use_reconstruction = true;  // reconstruction
  SocialEncoderVariant social_encoder = SocialEncoderVariant::kMutualInformation;
  bool standardize_social = true;  // standardize_social: center H* columns, unit RMS
  bool report_timing = false;      // report_timing

  std::size_t recon_width() const { return recon_hidden == 0 ? dim : recon_hidden; }
  int graph_relations() const { return multi_type ? rating_levels : 1; }

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Applies one `key`/`value` pair. Throws ConfigError on an unknown key or an
/// unparsable value.
void set_config_value(TrainConfig& config, const std::string& key,
                      const std::string& value);
/// Every key with its current value, formatted so that parsing it back
/// reproduces the config exactly.
std::vector<std::pair<std::string, std::string>> config_entries(const TrainConfig& config);
const std::vector<std::string>& config_keys();

/// Reads `key = value` lines; blank lines and `#` comments are ignored.
TrainConfig load_config(const std::filesystem::path& path, TrainConfig base = {});
void apply_config_text(TrainConfig& config, const std::string& text,
                       const std::string& source);
std::string format_config(const TrainConfig& config);

/// Applies an ablation name: no-social, single-type, no-reconstruction.
void apply_ablation(TrainConfig& config, const std::string& name);

std::string format_double(double v);

}  // namespace srhgnn
