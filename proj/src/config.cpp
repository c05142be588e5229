#include "srhgnn/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "srhgnn/errors.hpp"

namespace srhgnn {

std::string to_string(SocialEncoderVariant v) {
  switch (v) {
    case SocialEncoderVariant::kMutualInformation: return "mi";
    case SocialEncoderVariant::kGcn: return "gcn";
    case SocialEncoderVariant::kGat: return "gat";
  }
  return "mi";
}

SocialEncoderVariant parse_social_encoder(const std::string& name) {
  if (name == "mi") return SocialEncoderVariant::kMutualInformation;
  if (name == "gcn") return SocialEncoderVariant::kGcn;
  if (name == "gat") return SocialEncoderVariant::kGat;
  throw ConfigError("unknown social encoder '" + name + "' (expected mi, gcn or gat)");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + key + "': cannot parse '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + value + "'");
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void TrainConfig::validate() const {
  if (dim == 0) throw ConfigError("dim must be positive");
  if (use_social && dim % 2 != 0) throw ConfigError("dim must be even when social is on");
  if (layers < 1) throw ConfigError("layers must be >= 1");
  if (social_dim == 0) throw ConfigError("social_dim must be positive");
  if (social_layers < 1 || social_layers > 3) throw ConfigError("social_layers must be 1..3");
  if (rating_levels < 1) throw ConfigError("rating_levels must be >= 1");
  if (weights.interaction < 0 || weights.social < 0 || weights.regularization < 0) {
    throw ConfigError("loss weights must be non-negative");
  }
  if (!(learning_rate > 0) || !(pretrain_learning_rate > 0)) {
    throw ConfigError("learning rates must be positive");
  }
  if (epochs < 1 || pretrain_epochs < 1) throw ConfigError("epoch budgets must be >= 1");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (negatives < 1) throw ConfigError("negatives must be >= 1");
  if (!(train_percent > 0 && train_percent < 100)) {
    throw ConfigError("x_percent must lie strictly between 0 and 100");
  }
  if (social_encoder == SocialEncoderVariant::kGat && use_social) {
    throw ConfigError("social_encoder 'gat' is not implemented; use mi or gcn");
  }
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "dim",        "layers",         "social_dim",  "social_layers",
      "recon_hidden", "rating_levels", "omega1",     "omega2",
      "omega_r",    "learning_rate",  "pretrain_learning_rate",
      "pretrain_epochs", "epochs",    "batch_size",  "patience",
      "negatives",  "seed",           "x_percent",   "social",
      "multi_type", "reconstruction", "social_encoder", "standardize_social",
      "report_timing"};
  return keys;
}

void set_config_value(TrainConfig& c, const std::string& key, const std::string& v) {
  if (key == "dim") c.dim = parse_number<std::size_t>(key, v);
  else if (key == "layers") c.layers = parse_number<int>(key, v);
  else if (key == "social_dim") c.social_dim = parse_number<std::size_t>(key, v);
  else if (key == "social_layers") c.social_layers = parse_number<int>(key, v);
  else if (key == "recon_hidden") c.recon_hidden = parse_number<std::size_t>(key, v);
  else if (key == "rating_levels") c.rating_levels = parse_number<int>(key, v);
  else if (key == "omega1") c.weights.interaction = parse_number<double>(key, v);
  else if (key == "omega2") c.weights.social = parse_number<double>(key, v);
  else if (key == "omega_r") c.weights.regularization = parse_number<double>(key, v);
  else if (key == "learning_rate") c.learning_rate = parse_number<double>(key, v);
  else if (key == "pretrain_learning_rate") c.pretrain_learning_rate = parse_number<double>(key, v);
  else if (key == "pretrain_epochs") c.pretrain_epochs = parse_number<int>(key, v);
  else if (key == "epochs") c.epochs = parse_number<int>(key, v);
  else if (key == "batch_size") c.batch_size = parse_number<std::size_t>(key, v);
  else if (key == "patience") c.patience = parse_number<int>(key, v);
  else if (key == "negatives") c.negatives = parse_number<int>(key, v);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, v);
  else if (key == "x_percent") c.train_percent = parse_number<double>(key, v);
  else if (key == "social") c.use_social = parse_bool(key, v);
  else if (key == "multi_type") c.multi_type = parse_bool(key, v);
  else if (key == "reconstruction") c.use_reconstruction = parse_bool(key, v);
  else if (key == "social_encoder") c.social_encoder = parse_social_encoder(v);
  else if (key == "standardize_social") c.standardize_social = parse_bool(key, v);
  else if (key == "report_timing") c.report_timing = parse_bool(key, v);
  else throw ConfigError("unknown config key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> config_entries(const TrainConfig& c) {
  auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  return {
      {"dim", std::to_string(c.dim)},
      {"layers", std::to_string(c.layers)},
      {"social_dim", std::to_string(c.social_dim)},
      {"social_layers", std::to_string(c.social_layers)},
      {"recon_hidden", std::to_string(c.recon_hidden)},
      {"rating_levels", std::to_string(c.rating_levels)},
      {"omega1", format_double(c.weights.interaction)},
      {"omega2", format_double(c.weights.social)},
      {"omega_r", format_double(c.weights.regularization)},
      {"learning_rate", format_double(c.learning_rate)},
      {"pretrain_learning_rate", format_double(c.pretrain_learning_rate)},
      {"pretrain_epochs", std::to_string(c.pretrain_epochs)},
      {"epochs", std::to_string(c.epochs)},
      {"batch_size", std::to_string(c.batch_size)},
      {"patience", std::to_string(c.patience)},
      {"negatives", std::to_string(c.negatives)},
      {"seed", std::to_string(c.seed)},
      {"x_percent", format_double(c.train_percent)},
      {"social", b(c.use_social)},
      {"multi_type", b(c.multi_type)},
      {"reconstruction", b(c.use_reconstruction)},
      {"social_encoder", to_string(c.social_encoder)},
      {"standardize_social", b(c.standardize_social)},
      {"report_timing", b(c.report_timing)},
  };
}

void apply_config_text(TrainConfig& config, const std::string& text,
                       const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      set_config_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

TrainConfig load_config(const std::filesystem::path& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(base, ss.str(), path.string());
  return base;
}

std::string format_config(const TrainConfig& config) {
  std::string out;
  for (const auto& [k, v] : config_entries(config)) out += k + " = " + v + "\n";
  return out;
}

void apply_ablation(TrainConfig& config, const std::string& name) {
  if (name == "no-social") {
    config.use_social = false;
  } else if (name == "single-type") {
    config.multi_type = false;
  } else if (name == "no-reconstruction") {
    config.use_reconstruction = false;
  } else {
    throw ConfigError("unknown ablation '" + name +
                      "' (expected no-social, single-type or no-reconstruction)");
  }
}

}  // namespace srhgnn
