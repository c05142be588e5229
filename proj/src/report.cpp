#include "srhgnn/report.hpp"

namespace srhgnn::report {

nlohmann::json epoch_record(const EpochRecord& rec, bool timing) {
  nlohmann::json j = {
      {"type", "epoch"},
      {"epoch", rec.epoch},
      {"loss_prediction", rec.loss_prediction},
      {"loss_interaction", rec.loss_interaction},
      {"loss_social", rec.loss_social},
      {"loss_regularization", rec.loss_regularization},
      {"loss", rec.loss_total},
      {"train_rmse", rec.train_rmse},
      {"val_rmse", rec.val_rmse},
      {"val_mae", rec.val_mae},
  };
  if (timing) j["wall_ms"] = rec.wall_ms;
  return j;
}

nlohmann::json train_summary(const TrainReport& report, const data::Metrics& test) {
  return {
      {"type", "summary"},
      {"best_epoch", report.best_epoch},
      {"stopping_epoch", report.stopping_epoch},
      {"val_rmse", report.best_val_rmse},
      {"val_mae", report.best_val_mae},
      {"rmse", test.rmse},
      {"mae", test.mae},
      {"diverged", report.diverged},
      {"failure", report.failure},
      {"pretrain_epochs", report.pretrain_losses.size()},
      {"pretrain_final_loss",
       report.pretrain_losses.empty() ? 0.0 : report.pretrain_losses.back()},
  };
}

nlohmann::json metrics_record(const std::string& split, const data::Metrics& m,
                              std::size_t count) {
  return {{"type", "metrics"}, {"split", split}, {"rmse", m.rmse}, {"mae", m.mae},
          {"count", count}};
}

nlohmann::json sparsity_record(const data::SparsityReport& r) {
  nlohmann::json buckets = nlohmann::json::array();
  for (const auto& b : r.buckets) {
    buckets.push_back({{"users", b.users},
                       {"pairs", b.pairs},
                       {"interaction_mass", b.interaction_mass},
                       {"min_count", b.min_count},
                       {"max_count", b.max_count},
                       {"rmse", b.metrics.rmse},
                       {"mae", b.metrics.mae}});
  }
  return {{"type", "sparsity"},
          {"evaluated_users", r.evaluated_users},
          {"rmse", r.overall.rmse},
          {"mae", r.overall.mae},
          {"buckets", buckets}};
}

std::string serialize(const TrainReport& report, const data::Metrics& test, bool timing) {
  std::string out;
  for (const auto& rec : report.epochs) out += epoch_record(rec, timing).dump() + "\n";
  out += train_summary(report, test).dump() + "\n";
  return out;
}

}  // namespace srhgnn::report
