#include "srhgnn/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include <spdlog/spdlog.h>

#include "srhgnn/adam.hpp"
#include "srhgnn/errors.hpp"

namespace srhgnn {

Dataset make_dataset(const data::RatingData& ratings, const data::TrustData& trust,
                     const data::DataSplit& split) {
  Dataset d;
  d.num_users = ratings.num_users();
  d.num_items = ratings.num_items();
  d.train = data::to_triples(ratings, split.train);
  d.validation = data::to_triples(ratings, split.validation);
  d.test = data::to_triples(ratings, split.test);
  d.social = build_social_graph(trust.edges, d.num_users);
  return d;
}

ModelContext ModelContext::build(const Dataset& dataset, const TrainConfig& config) {
  ModelContext ctx;
  const int relations = config.graph_relations();
  std::vector<Interaction> typed;
  typed.reserve(dataset.train.size());
  for (const RatingTriple& r : dataset.train) {
    const double k = std::round(r.rating);
    if (k != r.rating || k < 1.0 || k > static_cast<double>(config.rating_levels)) {
      throw DataError("rating " + std::to_string(r.rating) + " outside 1.." +
                      std::to_string(config.rating_levels));
    }
    typed.push_back({r.user, r.item, config.multi_type ? static_cast<int>(k) : 1, r.rating});
  }
  ctx.graph = SubNodeGraph::from_interactions(std::move(typed), dataset.num_users,
                                              dataset.num_items, relations);
  ctx.ops = gnn::PropagationOperators::build(ctx.graph);
  ctx.social = dataset.social;
  ctx.social_norm = normalize(ctx.social.adjacency);
  return ctx;
}

namespace {

gnn::RelationGnnConfig gnn_config(const TrainConfig& c) {
  gnn::RelationGnnConfig g;
  g.dim = c.dim;
  g.layers = c.layers;
  g.social_dim = c.social_dim;
  g.use_social = c.use_social;
  return g;
}

social::SocialEncoderConfig encoder_config(const TrainConfig& c) {
  social::SocialEncoderConfig e;
  e.hidden = c.social_dim;
  e.layers = c.social_layers;
  return e;
}

}  // namespace

Model Model::init(std::size_t num_users, std::size_t num_items, const TrainConfig& config) {
  config.validate();
  Model m;
  m.config = config;
  m.num_users = num_users;
  m.num_items = num_items;
  Rng rng = Rng::stream(config.seed, "model-init");
  const std::size_t subnodes = num_items * static_cast<std::size_t>(config.graph_relations());
  m.gnn = gnn::RelationGnnParams::init(num_users, subnodes, gnn_config(config), rng);
  const std::size_t width = config.dim * static_cast<std::size_t>(config.layers);
  m.recon = recon::ReconParams::init(width, config.recon_width(), 0.25, rng);
  m.predictor = predict::PredictorParams::init(width, config.dim, rng);
  if (m.joint_social_encoder()) {
    Rng social_rng = Rng::stream(config.seed, "social-init");
    m.social_encoder =
        social::SocialEncoderParams::init(num_users, encoder_config(config), social_rng);
  }
  return m;
}

std::vector<ad::Parameter*> Model::trainable() {
  std::vector<ad::Parameter*> out = gnn.all();
  for (ad::Parameter* p : predictor.all()) out.push_back(p);
  if (config.use_reconstruction) {
    for (ad::Parameter* p : recon.all()) out.push_back(p);
  }
  if (joint_social_encoder()) {
    for (ad::Parameter* p : social_encoder.encoder_parameters()) out.push_back(p);
  }
  return out;
}

std::vector<ad::Parameter*> Model::persisted() {
  std::vector<ad::Parameter*> out = gnn.all();
  for (ad::Parameter* p : predictor.all()) out.push_back(p);
  for (ad::Parameter* p : recon.all()) out.push_back(p);
  if (joint_social_encoder()) {
    for (ad::Parameter* p : social_encoder.all()) out.push_back(p);
  }
  return out;
}

gnn::FinalEmbeddings model_forward(ad::Tape& tape, Model& model,
                                   const ModelContext& context) {
  std::optional<ad::Var> h_star;
  if (model.config.use_social) {
    if (model.joint_social_encoder()) {
      std::vector<std::size_t> identity(model.num_users);
      std::iota(identity.begin(), identity.end(), std::size_t{0});
      h_star = social::encode_one_hot(tape, context.social_norm, identity,
                                      model.social_encoder);
    } else {
      h_star = tape.constant(model.h_star);
    }
  }
  return gnn::forward(tape, context.ops, h_star, model.gnn, gnn_config(model.config));
}

LossTerms joint_loss_terms(ad::Tape& tape, Model& model, const ModelContext& context,
                           std::span<const RatingTriple> ratings,
                           const recon::TripletBatch& triplets, double reg_fraction) {
  const gnn::FinalEmbeddings emb = model_forward(tape, model, context);
  std::vector<std::size_t> users;
  std::vector<std::size_t> items;
  std::vector<double> truths;
  for (const RatingTriple& r : ratings) {
    users.push_back(r.user);
    items.push_back(r.item);
    truths.push_back(r.rating);
  }
  LossTerms t;
  t.prediction = predict::prediction_loss(
      predict::predict(emb.users, emb.items, users, items, model.predictor), truths);
  t.interaction = tape.constant(0.0);
  t.social = tape.constant(0.0);
  if (model.config.use_reconstruction) {
    const double psi_r = static_cast<double>(count_nonzeros(context.graph.adjacency()));
    const double psi_s = static_cast<double>(count_nonzeros(context.social.adjacency));
    recon::TripletBatch filtered = triplets;
    if (!model.config.use_social) filtered.social.clear();
    const recon::ReconLosses r = recon::reconstruction_losses(
        emb.users, emb.subnodes, context.graph, filtered, model.recon,
        std::max(psi_r, 1.0), std::max(psi_s, 1.0));
    t.interaction = r.interaction;
    t.social = r.social;
  }
  const auto theta = model.trainable();
  t.regularization = ad::scale(predict::squared_norm(tape, theta), reg_fraction);
  predict::LossWeights w = model.config.weights;
  if (!model.config.use_reconstruction) w.interaction = w.social = 0.0;
  t.total = predict::joint_loss(t.prediction, t.interaction, t.social, t.regularization, w);
  return t;
}

std::vector<double> predict_ratings(Model& model, const ModelContext& context,
                                    std::span<const RatingTriple> pairs, bool clamp) {
  if (pairs.empty()) return {};
  ad::Tape tape;
  const gnn::FinalEmbeddings emb = model_forward(tape, model, context);
  std::vector<std::size_t> users;
  std::vector<std::size_t> items;
  for (const RatingTriple& r : pairs) {
    users.push_back(r.user);
    items.push_back(r.item);
  }
  const Matrix pred =
      predict::predict(emb.users, emb.items, users, items, model.predictor).value();
  std::vector<double> out(pairs.size());
  const double hi = static_cast<double>(model.config.rating_levels);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double p = pred(static_cast<Eigen::Index>(i), 0);
    out[i] = clamp ? std::clamp(p, 1.0, hi) : p;
  }
  return out;
}

data::Metrics evaluate(Model& model, const ModelContext& context,
                       std::span<const RatingTriple> pairs) {
  const auto preds = predict_ratings(model, context, pairs, true);
  std::vector<double> truths;
  truths.reserve(pairs.size());
  for (const RatingTriple& r : pairs) truths.push_back(r.rating);
  return data::metrics(preds, truths);
}

social::PretrainResult pretrain_social(const UserSocialGraph& graph,
                                       const TrainConfig& config) {
  social::PretrainConfig pc;
  pc.encoder = encoder_config(config);
  pc.epochs = config.pretrain_epochs;
  pc.learning_rate = config.pretrain_learning_rate;
  pc.seed = mix_seed(config.seed, "pretrain", 0);
  return social::pretrain(graph, pc);
}

namespace {

std::vector<Matrix> snapshot(std::span<ad::Parameter* const> params) {
  std::vector<Matrix> out;
  out.reserve(params.size());
  for (const ad::Parameter* p : params) out.push_back(p->value());
  return out;
}

void restore(std::span<ad::Parameter* const> params, const std::vector<Matrix>& values) {
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value() = values[i];
}

}  // namespace

Matrix standardize_social_embeddings(const Matrix& h) {
  Matrix out = h.rowwise() - h.colwise().mean();
  const double rms = out.size() == 0 ? 0.0 : std::sqrt(out.squaredNorm() / static_cast<double>(out.size()));
  if (rms > 0.0) out /= rms;
  return out;
}

TrainResult train(const Dataset& dataset, const TrainConfig& config,
                  const Matrix* h_star, const EpochCallback& on_epoch) {
  config.validate();
  if (dataset.train.empty()) throw ConfigError("empty training set");
  if (dataset.validation.empty()) throw ConfigError("empty validation set");

  TrainResult result;
  result.model = Model::init(dataset.num_users, dataset.num_items, config);
  Model& model = result.model;
  TrainReport& report = result.report;
  const ModelContext context = ModelContext::build(dataset, config);

  // Start the output bias at the mean training rating. From zero, the hidden
  // units spend early epochs absorbing the offset and several die doing so.
  double mean_rating = 0.0;
  for (const RatingTriple& r : dataset.train) mean_rating += r.rating;
  model.predictor.output_bias.value().setConstant(mean_rating /
                                                  static_cast<double>(dataset.train.size()));

  // Phase 1.
  if (config.use_social && !model.joint_social_encoder()) {
    if (h_star != nullptr) {
      if (static_cast<std::size_t>(h_star->rows()) != dataset.num_users ||
          static_cast<std::size_t>(h_star->cols()) != config.social_dim) {
        throw ConfigError("supplied H* is " + std::to_string(h_star->rows()) + "x" +
                          std::to_string(h_star->cols()) + ", expected " +
                          std::to_string(dataset.num_users) + "x" +
                          std::to_string(config.social_dim));
      }
      model.h_star = *h_star;
    } else {
      social::PretrainResult pre = pretrain_social(context.social, config);
      model.h_star = std::move(pre.h_star);
      model.h_star_seed = pre.seed;
      model.h_star_epochs = pre.epochs;
      report.pretrain_losses = std::move(pre.losses);
    }
    if (config.standardize_social) model.h_star = standardize_social_embeddings(model.h_star);
  }

  // Phase 2.
  const auto theta = model.trainable();
  Adam adam(theta, AdamOptions{.learning_rate = config.learning_rate});
  const std::size_t n_train = dataset.train.size();
  const std::size_t batch = config.batch_size == 0 ? n_train : std::min(config.batch_size, n_train);
  const std::size_t n_batches = (n_train + batch - 1) / batch;
  const bool sample_relations = config.use_reconstruction && context.graph.num_relations() >= 2;
  const bool sample_social = config.use_reconstruction && config.use_social &&
                             !context.social.edges.empty();

  std::vector<Matrix> best = snapshot(theta);
  double best_rmse = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> order(n_train);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<UserPair> edges = context.social.edges;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    Rng batch_rng = Rng::stream(config.seed, "batches", static_cast<std::uint64_t>(epoch));
    batch_rng.shuffle(std::span<std::size_t>(order));
    batch_rng.shuffle(std::span<UserPair>(edges));

    EpochRecord rec;
    rec.epoch = epoch;
    try {
      for (std::size_t b = 0; b < n_batches; ++b) {
        const std::size_t lo = b * batch;
        const std::size_t hi = std::min(n_train, lo + batch);
        std::vector<RatingTriple> ratings;
        std::vector<Interaction> positives;
        ratings.reserve(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) {
          const RatingTriple& r = dataset.train[order[i]];
          ratings.push_back(r);
          if (sample_relations) {
            positives.push_back(context.graph.interactions()[order[i]]);
          }
        }
        std::span<const UserPair> social_chunk;
        if (sample_social) {
          const std::size_t e_lo = b * edges.size() / n_batches;
          const std::size_t e_hi = (b + 1) * edges.size() / n_batches;
          social_chunk = std::span<const UserPair>(edges).subspan(e_lo, e_hi - e_lo);
        }
        const recon::TripletBatch triplets = recon::sample_triplets(
            context.graph, positives, context.social, social_chunk, config.negatives,
            mix_seed(config.seed, "negatives",
                     static_cast<std::uint64_t>(epoch) * 1000003ULL + b));

        adam.zero_grad();
        ad::Tape tape;
        const double fraction = static_cast<double>(hi - lo) / static_cast<double>(n_train);
        const LossTerms terms =
            joint_loss_terms(tape, model, context, ratings, triplets, fraction);
        tape.backward(terms.total);
        adam.step();
        rec.loss_prediction += terms.prediction.scalar();
        rec.loss_interaction += terms.interaction.scalar();
        rec.loss_social += terms.social.scalar();
        rec.loss_regularization += terms.regularization.scalar();
        rec.loss_total += terms.total.scalar();
      }
      for (ad::Parameter* p : theta) {
        if (!p->value().allFinite()) {
          throw NumericalError("parameter '" + p->name() + "' became non-finite");
        }
      }
      rec.train_rmse = evaluate(model, context, dataset.train).rmse;
      const data::Metrics val = evaluate(model, context, dataset.validation);
      rec.val_rmse = val.rmse;
      rec.val_mae = val.mae;
    } catch (const NumericalError& e) {
      report.diverged = true;
      report.failure = "epoch " + std::to_string(epoch) + ": " + e.what();
      spdlog::error("training diverged: {}", report.failure);
      report.stopping_epoch = epoch;
      break;
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    report.epochs.push_back(rec);
    report.stopping_epoch = epoch;
    if (on_epoch) on_epoch(rec);

    if (rec.val_rmse < best_rmse) {
      best_rmse = rec.val_rmse;
      report.best_epoch = epoch;
      report.best_val_rmse = rec.val_rmse;
      report.best_val_mae = rec.val_mae;
      best = snapshot(theta);
    } else if (epoch - report.best_epoch >= config.patience) {
      break;
    }
  }
  restore(theta, best);
  return result;
}

}  // namespace srhgnn
