#pragma once

// Two-phase training: MI pretraining of the social encoder (frozen H*), then
// joint descent on prediction, reconstruction and regularization losses with
// validation-based early stopping.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srhgnn/config.hpp"
#include "srhgnn/data.hpp"
#include "srhgnn/graph.hpp"
#include "srhgnn/predictor.hpp"
#include "srhgnn/reconstruction.hpp"
#include "srhgnn/relation_gnn.hpp"
#include "srhgnn/social_encoder.hpp"

namespace srhgnn {

/// Contiguously indexed ratings split three ways plus the social graph.
struct Dataset {
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  std::vector<RatingTriple> train;
  std::vector<RatingTriple> validation;
  std::vector<RatingTriple> test;
  UserSocialGraph social;
};

Dataset make_dataset(const data::RatingData& ratings, const data::TrustData& trust,
                     const data::DataSplit& split);

/// Graph structures derived once from the training split.
struct ModelContext {
  SubNodeGraph graph;
  gnn::PropagationOperators ops;
  UserSocialGraph social;
  NormalizedAdjacency social_norm;

  /// Interactions typed by rating, or all type 1 when multi_type is off.
  static ModelContext build(const Dataset& dataset, const TrainConfig& config);
};

struct Model {
  TrainConfig config;
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  Matrix h_star;  // frozen social embeddings (mi variant)
  std::uint64_t h_star_seed = 0;
  int h_star_epochs = 0;
  gnn::RelationGnnParams gnn;
  recon::ReconParams recon;
  predict::PredictorParams predictor;
  social::SocialEncoderParams social_encoder;  // trained jointly (gcn variant)

  static Model init(std::size_t num_users, std::size_t num_items,
                    const TrainConfig& config);

  /// Phase-2 parameters Theta: everything optimized by the joint loss.
  std::vector<ad::Parameter*> trainable();
  /// Every parameter that is persisted in a checkpoint.
  std::vector<ad::Parameter*> persisted();
  bool joint_social_encoder() const {
    return config.use_social && config.social_encoder == SocialEncoderVariant::kGcn;
  }
};

gnn::FinalEmbeddings model_forward(ad::Tape& tape, Model& model,
                                   const ModelContext& context);

struct LossTerms {
  ad::Var prediction;
  ad::Var interaction;
  ad::Var social;
  ad::Var regularization;  // ||Theta||^2 scaled by the batch fraction
  ad::Var total;
};

/// Joint loss over one batch of rated pairs and its reconstruction triplets.
LossTerms joint_loss_terms(ad::Tape& tape, Model& model, const ModelContext& context,
                           std::span<const RatingTriple> ratings,
                           const recon::TripletBatch& triplets, double reg_fraction);

/// Predictions for each pair; clamped to [1, rating_levels] when `clamp`.
std::vector<double> predict_ratings(Model& model, const ModelContext& context,
                                    std::span<const RatingTriple> pairs, bool clamp = true);
data::Metrics evaluate(Model& model, const ModelContext& context,
                       std::span<const RatingTriple> pairs);

struct EpochRecord {
  int epoch = 0;
  double loss_prediction = 0.0;
  double loss_interaction = 0.0;
  double loss_social = 0.0;
  double loss_regularization = 0.0;
  double loss_total = 0.0;
  double train_rmse = 0.0;
  double val_rmse = 0.0;
  double val_mae = 0.0;
  double wall_ms = 0.0;
};

struct TrainReport {
  std::vector<double> pretrain_losses;
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  int stopping_epoch = 0;
  double best_val_rmse = 0.0;
  double best_val_mae = 0.0;
  bool diverged = false;
  std::string failure;
};

struct TrainResult {
  Model model;
  TrainReport report;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Centers every column and rescales the whole matrix to unit RMS. The
/// pretrained H* separates communities along small offsets from a shared
/// mean, which the L2 penalty on W_3 would otherwise have to fight.
Matrix standardize_social_embeddings(const Matrix& h);

/// Runs both phases. With standardize_social, H* (pretrained or supplied) is
/// passed through standardize_social_embeddings first. A supplied `h_star` skips MI pretraining. On NaN the
/// best checkpoint so far is returned with report.diverged set.
TrainResult train(const Dataset& dataset, const TrainConfig& config,
                  const Matrix* h_star = nullptr, const EpochCallback& on_epoch = {});

/// Phase 1 only, with the pretraining settings taken from `config`.
social::PretrainResult pretrain_social(const UserSocialGraph& graph,
                                       const TrainConfig& config);

}  // namespace srhgnn
