// Command-line front end: pretrain-social, train, evaluate, sparsity-report,
// gradcheck and sweep.

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "srhgnn/checkpoint.hpp"
#include "srhgnn/config.hpp"
#include "srhgnn/data.hpp"
#include "srhgnn/errors.hpp"
#include "srhgnn/gradcheck.hpp"
#include "srhgnn/report.hpp"
#include "srhgnn/synthetic.hpp"
#include "srhgnn/trainer.hpp"

namespace fs = std::filesystem;
using namespace srhgnn;

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<double> x_percent;
  std::vector<std::string> ablations;
  std::optional<std::string> social_encoder;
  std::string log_level = "warn";
};

struct DataOptions {
  std::string ratings;
  std::string trust;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config_path, "key = value configuration file");
  cmd->add_option("--set", o.overrides, "override one config key (key=value), repeatable");
  cmd->add_option("--seed", o.seed, "root random seed");
  cmd->add_option("--x-percent", o.x_percent, "training share of the ratings in percent");
  cmd->add_option("--ablate", o.ablations, "variant to ablate, repeatable")
      ->check(CLI::IsMember({"no-social", "single-type", "no-reconstruction"}));
  cmd->add_option("--social-encoder", o.social_encoder, "social encoder variant")
      ->check(CLI::IsMember({"mi", "gcn", "gat"}));
  cmd->add_option("--log-level", o.log_level, "trace, debug, info, warn, error or off");
}

void add_data(CLI::App* cmd, DataOptions& d) {
  cmd->add_option("--ratings", d.ratings, "ratings file: user<TAB>item<TAB>rating")->required();
  cmd->add_option("--trust", d.trust, "trust file: user<TAB>user");
}

// Config file first, then --set overrides, then dedicated flags.
TrainConfig resolve_config(const CommonOptions& o, TrainConfig base = {}) {
  TrainConfig c = o.config_path.empty() ? base : load_config(o.config_path, base);
  for (const std::string& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) c.seed = *o.seed;
  if (o.x_percent) c.train_percent = *o.x_percent;
  for (const std::string& a : o.ablations) apply_ablation(c, a);
  if (o.social_encoder) c.social_encoder = parse_social_encoder(*o.social_encoder);
  c.validate();
  return c;
}

struct LoadedData {
  data::RatingData ratings;
  data::TrustData trust;
  Dataset dataset;
};

LoadedData load_data(const DataOptions& d, const TrainConfig& c) {
  LoadedData out;
  out.ratings = data::load_ratings(d.ratings, c.rating_levels);
  if (!d.trust.empty()) out.trust = data::load_trust(d.trust, out.ratings);
  const auto split = data::split(out.ratings.records.size(), {c.train_percent, c.seed});
  out.dataset = make_dataset(out.ratings, out.trust, split);
  spdlog::info("{} users, {} items, {} ratings, {} social ties", out.ratings.num_users(),
               out.ratings.num_items(), out.ratings.records.size(),
               out.dataset.social.edges.size());
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

std::span<const RatingTriple> pick_split(const Dataset& d, const std::string& name) {
  if (name == "train") return d.train;
  if (name == "validation") return d.validation;
  return d.test;
}

void print_metrics(const std::string& label, const data::Metrics& m, std::size_t n) {
  std::cout << label << ": rmse " << format_double(m.rmse) << "  mae " << format_double(m.mae)
            << "  (" << n << " ratings)\n";
}

int cmd_pretrain(const CommonOptions& o, const DataOptions& d, const std::string& out) {
  const TrainConfig c = resolve_config(o);
  const LoadedData data = load_data(d, c);
  const auto result = pretrain_social(data.dataset.social, c);
  io::save_matrix(out, {"h_star", result.h_star, result.seed, result.epochs});
  std::cout << "pretrained social encoder: " << result.epochs << " epochs, final MI loss "
            << format_double(result.losses.back()) << "\nH* (" << result.h_star.rows() << "x"
            << result.h_star.cols() << ") written to " << out << "\n";
  nlohmann::json j = {{"type", "pretrain"},
                      {"epochs", result.epochs},
                      {"seed", result.seed},
                      {"losses", result.losses}};
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_train(const CommonOptions& o, const DataOptions& d, const std::string& h_star_path,
              const std::string& checkpoint, const std::string& report_path) {
  const TrainConfig c = resolve_config(o);
  const LoadedData data = load_data(d, c);
  std::optional<Matrix> h_star;
  if (!h_star_path.empty()) h_star = io::load_matrix(h_star_path).values;

  TrainResult result = train(data.dataset, c, h_star ? &*h_star : nullptr,
                             [](const EpochRecord& e) {
                               spdlog::info("epoch {} loss {:.6f} train_rmse {:.4f} val_rmse {:.4f}",
                                            e.epoch, e.loss_total, e.train_rmse, e.val_rmse);
                             });
  const ModelContext ctx = ModelContext::build(data.dataset, c);
  const data::Metrics test = evaluate(result.model, ctx, data.dataset.test);
  const std::string serialized = report::serialize(result.report, test, c.report_timing);
  if (!report_path.empty()) write_text(report_path, serialized);
  if (!checkpoint.empty()) io::save_checkpoint(checkpoint, result.model);

  const TrainReport& r = result.report;
  std::cout << "trained " << r.epochs.size() << " epochs (best " << r.best_epoch << ", stopped "
            << r.stopping_epoch << ")\n";
  print_metrics("validation", {r.best_val_rmse, r.best_val_mae}, data.dataset.validation.size());
  print_metrics("test", test, data.dataset.test.size());
  std::cout << report::train_summary(r, test).dump() << "\n";
  if (r.diverged) {
    std::cerr << "error: training diverged (" << r.failure << "); best parameters kept\n";
    return static_cast<int>(ExitCode::kNumerical);
  }
  return 0;
}

// Model and data for commands that start from a checkpoint. Flags given on the
// command line override the stored config only for split selection.
struct Restored {
  Model model;
  LoadedData data;
  ModelContext ctx;
};

Restored restore(const CommonOptions& o, const DataOptions& d, const std::string& checkpoint) {
  Restored r;
  r.model = io::load_checkpoint(checkpoint);
  TrainConfig c = r.model.config;
  if (o.seed) c.seed = *o.seed;
  if (o.x_percent) c.train_percent = *o.x_percent;
  r.data = load_data(d, c);
  if (r.data.dataset.num_users != r.model.num_users ||
      r.data.dataset.num_items != r.model.num_items) {
    throw DataError("checkpoint was trained on " + std::to_string(r.model.num_users) +
                    " users / " + std::to_string(r.model.num_items) +
                    " items but the data has " + std::to_string(r.data.dataset.num_users) +
                    " / " + std::to_string(r.data.dataset.num_items));
  }
  r.ctx = ModelContext::build(r.data.dataset, r.model.config);
  return r;
}

int cmd_evaluate(const CommonOptions& o, const DataOptions& d, const std::string& checkpoint,
                 const std::string& split) {
  Restored r = restore(o, d, checkpoint);
  const auto pairs = pick_split(r.data.dataset, split);
  const data::Metrics m = evaluate(r.model, r.ctx, pairs);
  print_metrics(split, m, pairs.size());
  std::cout << report::metrics_record(split, m, pairs.size()).dump() << "\n";
  return 0;
}

int cmd_sparsity(const CommonOptions& o, const DataOptions& d, const std::string& checkpoint,
                 std::size_t buckets) {
  Restored r = restore(o, d, checkpoint);
  const Dataset& ds = r.data.dataset;
  const auto preds = predict_ratings(r.model, r.ctx, ds.test);
  std::vector<data::EvaluatedPair> pairs;
  for (std::size_t i = 0; i < ds.test.size(); ++i) {
    pairs.push_back({ds.test[i].user, ds.test[i].rating, preds[i]});
  }
  std::vector<std::size_t> counts(ds.num_users, 0);
  for (const RatingTriple& t : ds.train) ++counts[t.user];
  const data::SparsityReport rep = data::sparsity_report(pairs, counts, buckets);
  for (std::size_t b = 0; b < rep.buckets.size(); ++b) {
    const auto& k = rep.buckets[b];
    std::cout << "bucket " << b + 1 << ": " << k.users << " users with " << k.min_count << ".."
              << k.max_count << " training ratings (mass " << k.interaction_mass << "), rmse "
              << format_double(k.metrics.rmse) << " mae " << format_double(k.metrics.mae) << "\n";
  }
  print_metrics("overall", rep.overall, pairs.size());
  std::cout << report::sparsity_record(rep).dump() << "\n";
  return 0;
}

// Gradient check of the joint and MI losses on the three-user fixture.
int cmd_gradcheck(const CommonOptions& o, double tolerance, double floor) {
  TrainConfig c = resolve_config(o, [] {
    TrainConfig t;
    t.dim = 4;
    t.social_dim = 4;
    t.rating_levels = synthetic::kT1Relations;
    return t;
  }());
  Dataset d;
  d.num_users = synthetic::kT1Users;
  d.num_items = synthetic::kT1Items;
  d.train = synthetic::t1_ratings();
  d.validation = d.train;
  d.social = build_social_graph(synthetic::t1_social_edges(), d.num_users);

  Model model = Model::init(d.num_users, d.num_items, c);
  Rng rng = Rng::stream(c.seed, "gradcheck");
  model.h_star.resize(static_cast<Eigen::Index>(d.num_users),
                      static_cast<Eigen::Index>(c.social_dim));
  for (Eigen::Index i = 0; i < model.h_star.size(); ++i) model.h_star.data()[i] = rng.uniform(-1, 1);
  for (ad::Parameter* p : model.persisted()) {
    for (Eigen::Index i = 0; i < p->size(); ++i) p->value().data()[i] = rng.uniform(-1, 1);
  }
  const ModelContext ctx = ModelContext::build(d, c);
  const auto triplets = recon::sample_triplets(ctx.graph, ctx.graph.interactions(), ctx.social,
                                               ctx.social.edges, c.negatives,
                                               mix_seed(c.seed, "gradcheck-negatives", 0));
  auto theta = model.trainable();
  auto joint = gradcheck(theta, [&](ad::Tape& t) {
    return joint_loss_terms(t, model, ctx, d.train, triplets, 1.0).total;
  }, 1e-6, floor);

  auto enc = social::SocialEncoderParams::init(d.num_users, {c.social_dim, c.social_layers}, rng);
  for (ad::Parameter* p : enc.all()) {
    for (Eigen::Index i = 0; i < p->size(); ++i) p->value().data()[i] = rng.uniform(-1, 1);
  }
  std::vector<std::size_t> identity{0, 1, 2};
  const auto perm = social::corruption_permutation(d.num_users, mix_seed(c.seed, "gradcheck-corrupt", 0));
  auto enc_params = enc.all();
  auto mi = gradcheck(enc_params, [&](ad::Tape& t) {
    ad::Var h = social::encode_one_hot(t, ctx.social_norm, identity, enc);
    ad::Var r = social::readout(ctx.social_norm, h);
    ad::Var w = t.parameter(enc.discriminator);
    return social::mi_loss(
        social::discriminator_logits(h, r, w),
        social::discriminator_logits(social::encode_one_hot(t, ctx.social_norm, perm, enc), r, w));
  }, 1e-6, floor);

  double worst = 0.0;
  nlohmann::json entries = nlohmann::json::array();
  auto emit = [&](const char* loss, const std::vector<GradcheckEntry>& list) {
    for (const auto& e : list) {
      worst = std::max(worst, e.max_relative_error);
      std::cout << loss << "  " << e.parameter << "  entries " << e.entries << "  max rel err "
                << format_double(e.max_relative_error) << "\n";
      entries.push_back({{"loss", loss},
                         {"parameter", e.parameter},
                         {"entries", e.entries},
                         {"max_relative_error", e.max_relative_error}});
    }
  };
  emit("joint", joint);
  emit("mi", mi);
  const bool ok = worst < tolerance;
  std::cout << (ok ? "gradcheck passed" : "gradcheck FAILED") << ": worst relative error "
            << format_double(worst) << " (tolerance " << format_double(tolerance) << ")\n";
  std::cout << nlohmann::json{{"type", "gradcheck"}, {"worst", worst}, {"passed", ok},
                              {"entries", entries}}
                   .dump()
            << "\n";
  return ok ? 0 : static_cast<int>(ExitCode::kNumerical);
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    TrainConfig probe;
    set_config_value(probe, "omega1", item);  // reuses the config number parser
    out.push_back(probe.weights.interaction);
  }
  if (out.empty()) throw ConfigError("empty sweep grid");
  return out;
}

int cmd_sweep(const CommonOptions& o, const DataOptions& d, const std::string& grid1,
              const std::string& grid2, const std::string& report_path) {
  const TrainConfig base = resolve_config(o);
  const LoadedData data = load_data(d, base);
  std::optional<Matrix> h_star;
  if (base.use_social && base.social_encoder == SocialEncoderVariant::kMutualInformation) {
    h_star = pretrain_social(data.dataset.social, base).h_star;  // shared by every grid point
  }
  std::string lines;
  double best_rmse = std::numeric_limits<double>::infinity();
  nlohmann::json best;
  for (double w1 : parse_grid(grid1)) {
    for (double w2 : parse_grid(grid2)) {
      TrainConfig c = base;
      c.weights.interaction = w1;
      c.weights.social = w2;
      TrainResult r = train(data.dataset, c, h_star ? &*h_star : nullptr);
      const ModelContext ctx = ModelContext::build(data.dataset, c);
      const data::Metrics test = evaluate(r.model, ctx, data.dataset.test);
      nlohmann::json j = report::train_summary(r.report, test);
      j["type"] = "sweep";
      j["omega1"] = w1;
      j["omega2"] = w2;
      lines += j.dump() + "\n";
      std::cout << "omega1 " << format_double(w1) << " omega2 " << format_double(w2)
                << ": val rmse " << format_double(r.report.best_val_rmse) << ", test rmse "
                << format_double(test.rmse) << " mae " << format_double(test.mae) << "\n";
      if (r.report.best_val_rmse < best_rmse) {
        best_rmse = r.report.best_val_rmse;
        best = j;
      }
    }
  }
  best["type"] = "sweep-best";
  lines += best.dump() + "\n";
  if (!report_path.empty()) write_text(report_path, lines);
  std::cout << "best by validation: omega1 " << format_double(best["omega1"].get<double>())
            << " omega2 " << format_double(best["omega2"].get<double>()) << "\n"
            << best.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Social recommendation with relation-aware graph networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "srhgnn 0.1.0");

  CommonOptions common;
  DataOptions data_opts;
  std::string out_path;
  std::string h_star_path;
  std::string checkpoint;
  std::string report_path;
  std::string split = "test";
  std::size_t buckets = 3;
  double tolerance = 1e-4;
  double floor = 1e-5;
  std::string grid1 = "0.001,0.01,0.1";
  std::string grid2 = "0.001,0.01,0.1";

  auto* pre = app.add_subcommand("pretrain-social", "phase 1: train the social encoder, save H*");
  add_common(pre, common);
  add_data(pre, data_opts);
  pre->add_option("-o,--out", out_path, "H* output file")->required();

  auto* tr = app.add_subcommand("train", "train the full model");
  add_common(tr, common);
  add_data(tr, data_opts);
  tr->add_option("--h-star", h_star_path, "H* file from pretrain-social (skips phase 1)");
  tr->add_option("--checkpoint", checkpoint, "model checkpoint output");
  tr->add_option("--report", report_path, "line-delimited JSON training log output");

  auto* ev = app.add_subcommand("evaluate", "RMSE / MAE of a checkpoint on one split");
  add_common(ev, common);
  add_data(ev, data_opts);
  ev->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  ev->add_option("--split", split, "train, validation or test")
      ->check(CLI::IsMember({"train", "validation", "test"}));

  auto* sp = app.add_subcommand("sparsity-report", "test error by user-activity bucket");
  add_common(sp, common);
  add_data(sp, data_opts);
  sp->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  sp->add_option("--buckets", buckets, "number of buckets")->check(CLI::PositiveNumber);

  auto* gc = app.add_subcommand("gradcheck", "finite-difference check of every gradient");
  add_common(gc, common);
  gc->add_option("--tolerance", tolerance, "maximum relative error");
  gc->add_option("--floor", floor,
                 "smallest denominator of the relative error; finite-difference roundoff "
                 "dominates gradients below it");

  auto* sw = app.add_subcommand("sweep", "grid search over the reconstruction loss weights");
  add_common(sw, common);
  add_data(sw, data_opts);
  sw->add_option("--omega1", grid1, "comma-separated values for omega1");
  sw->add_option("--omega2", grid2, "comma-separated values for omega2");
  sw->add_option("--report", report_path, "line-delimited JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  try {
    spdlog::set_level(spdlog::level::from_str(common.log_level));
    if (*pre) return cmd_pretrain(common, data_opts, out_path);
    if (*tr) return cmd_train(common, data_opts, h_star_path, checkpoint, report_path);
    if (*ev) return cmd_evaluate(common, data_opts, checkpoint, split);
    if (*sp) return cmd_sparsity(common, data_opts, checkpoint, buckets);
    if (*gc) return cmd_gradcheck(common, tolerance, floor);
    if (*sw) return cmd_sweep(common, data_opts, grid1, grid2, report_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kData);
  }
  return static_cast<int>(ExitCode::kUsage);
}
