#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>

#include "srhgnn/checkpoint.hpp"
#include "srhgnn/config.hpp"
#include "srhgnn/data.hpp"
#include "srhgnn/errors.hpp"
#include "srhgnn/graph.hpp"
#include "srhgnn/report.hpp"
#include "srhgnn/synthetic.hpp"
#include "srhgnn/trainer.hpp"

namespace py = pybind11;
using namespace srhgnn;

namespace {

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

std::span<const RatingTriple> split_of(const Dataset& d, const std::string& name) {
  if (name == "train") return d.train;
  if (name == "validation") return d.validation;
  if (name == "test") return d.test;
  throw ConfigError("split must be train, validation or test, got '" + name + "'");
}

py::dict metrics_dict(const data::Metrics& m) {
  py::dict out;
  out["rmse"] = m.rmse;
  out["mae"] = m.mae;
  return out;
}

py::list triples_to_list(std::span<const RatingTriple> ts) {
  py::list out;
  for (const auto& t : ts) out.append(py::make_tuple(t.user, t.item, t.rating));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Relation-aware graph networks for social rating prediction";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def(py::init([](const py::kwargs& kw) {
        TrainConfig c;
        for (auto [k, v] : kw) set_config_value(c, py::str(k), py::str(v));
        c.validate();
        return c;
      }))
      .def("set", &set_config_value, py::arg("key"), py::arg("value"),
           "Set one key from its text form, as in a config file.")
      .def("ablate", &apply_ablation, py::arg("name"))
      .def("validate", &TrainConfig::validate)
      .def("to_text", &format_config)
      .def("to_dict", [](const TrainConfig& c) {
        py::dict d;
        for (const auto& [k, v] : config_entries(c)) d[py::str(k)] = v;
        return d;
      })
      .def_static("from_file", [](const std::filesystem::path& p) { return load_config(p); })
      .def_static("keys", &config_keys)
      .def_readwrite("dim", &TrainConfig::dim)
      .def_readwrite("layers", &TrainConfig::layers)
      .def_readwrite("social_dim", &TrainConfig::social_dim)
      .def_readwrite("social_layers", &TrainConfig::social_layers)
      .def_readwrite("rating_levels", &TrainConfig::rating_levels)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("pretrain_learning_rate", &TrainConfig::pretrain_learning_rate)
      .def_readwrite("pretrain_epochs", &TrainConfig::pretrain_epochs)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("patience", &TrainConfig::patience)
      .def_readwrite("negatives", &TrainConfig::negatives)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("train_percent", &TrainConfig::train_percent)
      .def_readwrite("use_social", &TrainConfig::use_social)
      .def_readwrite("multi_type", &TrainConfig::multi_type)
      .def_readwrite("use_reconstruction", &TrainConfig::use_reconstruction)
      .def_property(
          "omega1", [](const TrainConfig& c) { return c.weights.interaction; },
          [](TrainConfig& c, double v) { c.weights.interaction = v; })
      .def_property(
          "omega2", [](const TrainConfig& c) { return c.weights.social; },
          [](TrainConfig& c, double v) { c.weights.social = v; })
      .def_property(
          "omega_r", [](const TrainConfig& c) { return c.weights.regularization; },
          [](TrainConfig& c, double v) { c.weights.regularization = v; })
      .def_property(
          "social_encoder", [](const TrainConfig& c) { return to_string(c.social_encoder); },
          [](TrainConfig& c, const std::string& v) { c.social_encoder = parse_social_encoder(v); })
      .def("__repr__", [](const TrainConfig& c) { return "TrainConfig(\n" + format_config(c) + ")"; });

  py::class_<data::RatingData>(m, "Ratings")
      .def_property_readonly("num_users", &data::RatingData::num_users)
      .def_property_readonly("num_items", &data::RatingData::num_items)
      .def_readonly("user_ids", &data::RatingData::user_ids)
      .def_readonly("item_ids", &data::RatingData::item_ids)
      .def_readonly("duplicates_replaced", &data::RatingData::duplicates_replaced)
      .def("__len__", [](const data::RatingData& r) { return r.records.size(); })
      .def("records", [](const data::RatingData& r) {
        py::list out;
        for (const auto& x : r.records) out.append(py::make_tuple(x.user, x.item, x.rating));
        return out;
      });

  py::class_<data::TrustData>(m, "Trust")
      .def_readonly("edges", &data::TrustData::edges)
      .def_readonly("raw_ties", &data::TrustData::raw_ties)
      .def_readonly("dropped_unknown", &data::TrustData::dropped_unknown)
      .def_readonly("self_ties", &data::TrustData::self_ties);

  m.def("load_ratings", &data::load_ratings, py::arg("path"), py::arg("rating_levels") = 5);
  m.def("load_trust", &data::load_trust, py::arg("path"), py::arg("ratings"));

  m.def(
      "planted",
      [](std::size_t users, std::size_t items, int rank, double noise, double density,
         std::size_t communities, double social_in, double social_out, std::uint64_t seed) {
        synthetic::PlantedSpec s;
        s.users = users;
        s.items = items;
        s.rank = rank;
        s.noise = noise;
        s.density = density;
        s.communities = communities;
        s.social_in = social_in;
        s.social_out = social_out;
        s.seed = seed;
        auto p = synthetic::planted(s);
        return py::make_tuple(std::move(p.ratings), std::move(p.trust));
      },
      py::arg("users") = 50, py::arg("items") = 100, py::arg("rank") = 4, py::arg("noise") = 0.1,
      py::arg("density") = 0.4, py::arg("communities") = 0, py::arg("social_in") = 0.3,
      py::arg("social_out") = 0.0, py::arg("seed") = 7,
      "Synthetic low-rank ratings, optionally with community-correlated trust ties.");

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](const data::RatingData& r, std::optional<data::TrustData> t,
                       double train_percent, std::uint64_t seed) {
             return make_dataset(r, t.value_or(data::TrustData{}),
                                 data::split(r.records.size(), {train_percent, seed}));
           }),
           py::arg("ratings"), py::arg("trust") = py::none(), py::arg("train_percent") = 80.0,
           py::arg("seed") = 42)
      .def_readonly("num_users", &Dataset::num_users)
      .def_readonly("num_items", &Dataset::num_items)
      .def("split", [](const Dataset& d, const std::string& name) {
        return triples_to_list(split_of(d, name));
      })
      .def_property_readonly("social_edges",
                             [](const Dataset& d) { return d.social.edges; });

  py::class_<Model>(m, "Model")
      .def_readonly("config", &Model::config)
      .def_readonly("num_users", &Model::num_users)
      .def_readonly("num_items", &Model::num_items)
      .def_property_readonly("h_star", [](const Model& mdl) { return mdl.h_star; })
      .def("parameters", [](Model& mdl) {
        py::dict out;
        for (ad::Parameter* p : mdl.persisted()) out[py::str(p->name())] = p->value();
        return out;
      })
      .def("save", [](Model& mdl, const std::filesystem::path& p) { io::save_checkpoint(p, mdl); })
      .def_static("load", &io::load_checkpoint, py::arg("path"))
      .def(
          "predict",
          [](Model& mdl, const Dataset& d, const std::vector<std::size_t>& users,
             const std::vector<std::size_t>& items, bool clamp) {
            if (users.size() != items.size()) throw ContractError("users and items differ in length");
            std::vector<RatingTriple> pairs;
            for (std::size_t i = 0; i < users.size(); ++i) pairs.push_back({users[i], items[i], 0.0});
            return predict_ratings(mdl, ModelContext::build(d, mdl.config), pairs, clamp);
          },
          py::arg("dataset"), py::arg("users"), py::arg("items"), py::arg("clamp") = true)
      .def(
          "evaluate",
          [](Model& mdl, const Dataset& d, const std::string& split) {
            return metrics_dict(evaluate(mdl, ModelContext::build(d, mdl.config), split_of(d, split)));
          },
          py::arg("dataset"), py::arg("split") = "test");

  m.def(
      "pretrain_social",
      [](const Dataset& d, const TrainConfig& c) {
        auto r = pretrain_social(d.social, c);
        return py::make_tuple(r.h_star, r.losses);
      },
      py::arg("dataset"), py::arg("config"),
      "Phase 1 only. Returns (H*, per-epoch MI losses).");

  m.def(
      "train",
      [](const Dataset& d, const TrainConfig& c, std::optional<Matrix> h_star,
         std::function<void(py::dict)> on_epoch) {
        EpochCallback cb;
        if (on_epoch) {
          cb = [&](const EpochRecord& e) {
            on_epoch(to_python(report::epoch_record(e, c.report_timing)));
          };
        }
        TrainResult r = train(d, c, h_star ? &*h_star : nullptr, cb);
        const auto test = evaluate(r.model, ModelContext::build(d, c), d.test);
        py::list epochs;
        for (const auto& e : r.report.epochs) epochs.append(to_python(report::epoch_record(e, c.report_timing)));
        py::dict summary = to_python(report::train_summary(r.report, test));
        summary["epochs"] = epochs;
        return py::make_tuple(std::move(r.model), summary);
      },
      py::arg("dataset"), py::arg("config"), py::arg("h_star") = py::none(),
      py::arg("on_epoch") = py::none(),
      "Both training phases. Returns (model, summary dict with rmse / mae on the test split).");

  m.def(
      "sparsity_report",
      [](Model& mdl, const Dataset& d, std::size_t buckets) {
        const ModelContext ctx = ModelContext::build(d, mdl.config);
        const auto preds = predict_ratings(mdl, ctx, d.test);
        std::vector<data::EvaluatedPair> pairs;
        for (std::size_t i = 0; i < d.test.size(); ++i) {
          pairs.push_back({d.test[i].user, d.test[i].rating, preds[i]});
        }
        std::vector<std::size_t> counts(d.num_users, 0);
        for (const auto& t : d.train) ++counts[t.user];
        return to_python(report::sparsity_record(data::sparsity_report(pairs, counts, buckets)));
      },
      py::arg("model"), py::arg("dataset"), py::arg("buckets") = 3);

  m.def(
      "normalized_adjacency",
      [](const std::vector<UserPair>& edges, std::size_t num_users) {
        return normalize(build_social_graph(edges, num_users).adjacency).matrix.to_dense();
      },
      py::arg("edges"), py::arg("num_users"),
      "Dense D^-1/2 (A + I) D^-1/2 of an undirected user graph.");

  m.def(
      "save_matrix",
      [](const std::filesystem::path& p, const Matrix& values, const std::string& name) {
        io::save_matrix(p, {name, values, 0, 0});
      },
      py::arg("path"), py::arg("values"), py::arg("name") = "h_star");
  m.def(
      "load_matrix", [](const std::filesystem::path& p) { return io::load_matrix(p).values; },
      py::arg("path"));
}
