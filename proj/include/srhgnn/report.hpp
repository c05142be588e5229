#pragma once

#include <json.hpp>

#include "srhgnn/data.hpp"
#include "srhgnn/trainer.hpp"

namespace srhgnn::report {

/// One line of the line-delimited training log. `wall_ms` is only emitted
/// when timing is requested so that seeded runs serialize identically.
nlohmann::json epoch_record(const EpochRecord& rec, bool timing);
nlohmann::json train_summary(const TrainReport& report, const data::Metrics& test);
nlohmann::json metrics_record(const std::string& split, const data::Metrics& m,
                              std::size_t count);
nlohmann::json sparsity_record(const data::SparsityReport& report);

/// All epoch lines followed by the summary line.
std::string serialize(const TrainReport& report, const data::Metrics& test, bool timing);

}  // namespace srhgnn::report
