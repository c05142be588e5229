#include <doctest.h>

#include <sstream>

#include "srhgnn/checkpoint.hpp"
#include "srhgnn/config.hpp"
#include "srhgnn/errors.hpp"
#include "srhgnn/report.hpp"
#include "srhgnn/trainer.hpp"

using namespace srhgnn;

TEST_SUITE("config") {
  TEST_CASE("every key round-trips through the text form") {
    TrainConfig c;
    c.dim = 8;
    c.weights.interaction = 0.123456789012345678;
    c.learning_rate = 3e-4;
    c.seed = 18446744073709551615ULL;
    c.use_social = false;
    c.social_encoder = SocialEncoderVariant::kGcn;
    c.batch_size = 0;
    TrainConfig back;
    apply_config_text(back, format_config(c), "mem");
    CHECK(format_config(back) == format_config(c));
    CHECK(back.weights.interaction == c.weights.interaction);
    CHECK(back.seed == c.seed);
    CHECK(config_entries(c).size() == config_keys().size());
  }

  TEST_CASE("comments, blank lines and spacing are accepted") {
    TrainConfig c;
    apply_config_text(c, "# a comment\n\n  dim = 32  \nx_percent=60 # trailing\n", "mem");
    CHECK(c.dim == 32);
    CHECK(c.train_percent == 60.0);
  }

  TEST_CASE("unknown keys and bad values are configuration errors") {
    TrainConfig c;
    CHECK_THROWS_AS(set_config_value(c, "nope", "1"), ConfigError);
    CHECK_THROWS_AS(set_config_value(c, "dim", "many"), ConfigError);
    CHECK_THROWS_AS(set_config_value(c, "social", "maybe"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(c, "dim 4\n", "mem"), ConfigError);
  }

  TEST_CASE("validation rejects out-of-range settings") {
    TrainConfig c;
    c.weights.social = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = TrainConfig{};
    c.epochs = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = TrainConfig{};
    c.social_encoder = SocialEncoderVariant::kGat;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }

  TEST_CASE("ablations flip exactly one switch") {
    TrainConfig c;
    apply_ablation(c, "no-social");
    CHECK_FALSE(c.use_social);
    CHECK(c.multi_type);
    apply_ablation(c, "single-type");
    CHECK(c.graph_relations() == 1);
    apply_ablation(c, "no-reconstruction");
    CHECK_FALSE(c.use_reconstruction);
    CHECK_THROWS_AS(apply_ablation(c, "everything"), ConfigError);
  }

  TEST_CASE("social encoder names") {
    CHECK(parse_social_encoder("mi") == SocialEncoderVariant::kMutualInformation);
    CHECK(parse_social_encoder("gcn") == SocialEncoderVariant::kGcn);
    CHECK(to_string(SocialEncoderVariant::kGat) == "gat");
    CHECK_THROWS_AS(parse_social_encoder("rnn"), ConfigError);
  }
}

TEST_SUITE("files") {
  TEST_CASE("matrix file round-trips bit-exactly with its header") {
    Rng rng(1);
    io::MatrixFile f{"h_star", Matrix(3, 4), 99, 200};
    for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values.data()[i] = rng.normal() * 1e-7;
    std::stringstream ss;
    io::write_matrix(ss, f);
    CHECK(ss.str().rfind("# srhgnn matrix v1", 0) == 0);
    const auto back = io::read_matrix(ss, "mem");
    CHECK(back.name == "h_star");
    CHECK(back.values == f.values);
    CHECK(back.seed == 99);
    CHECK(back.epochs == 200);
  }

  TEST_CASE("truncated or mislabeled matrix files are data errors") {
    std::stringstream bad("# srhgnn matrix v1\nname x\nrows 2\ncols 2\nseed 0\nepochs 0\ndata\n1 2\n");
    CHECK_THROWS_AS(io::read_matrix(bad, "mem"), DataError);
    std::stringstream wrong("# something else\n");
    CHECK_THROWS_AS(io::read_matrix(wrong, "mem"), DataError);
  }

  TEST_CASE("model checkpoint round-trips config and every parameter") {
    for (bool social : {true, false}) {
      TrainConfig c;
      c.dim = 4;
      c.social_dim = 6;
      c.use_social = social;
      c.seed = 5;
      Model m = Model::init(7, 5, c);
      Rng rng(2);
      m.h_star = Matrix(7, 6);
      for (Eigen::Index i = 0; i < m.h_star.size(); ++i) m.h_star.data()[i] = rng.normal();
      m.h_star_seed = 11;
      m.h_star_epochs = 3;
      std::stringstream ss;
      io::write_checkpoint(ss, m);
      const std::string text = ss.str();
      Model back = io::read_checkpoint(ss, "mem");
      CHECK(format_config(back.config) == format_config(c));
      CHECK(back.h_star_seed == 11);
      const auto a = m.persisted();
      const auto b = back.persisted();
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i]->name() == b[i]->name());
        CHECK(a[i]->value() == b[i]->value());
      }
      if (social) CHECK(back.h_star == m.h_star);
      std::stringstream again;
      io::write_checkpoint(again, back);
      CHECK(again.str() == text);
    }
  }

  TEST_CASE("checkpoint with a missing matrix is rejected") {
    TrainConfig c;
    c.dim = 2;
    c.social_dim = 2;
    Model m = Model::init(2, 2, c);
    m.h_star = Matrix::Zero(2, 2);
    std::stringstream ss;
    io::write_checkpoint(ss, m);
    std::string text = ss.str();
    const auto cut = text.rfind("matrix ");
    std::stringstream broken(text.substr(0, cut) + "end\n");
    CHECK_THROWS_AS(io::read_checkpoint(broken, "mem"), DataError);
  }
}

TEST_SUITE("report") {
  TEST_CASE("summary uses the metric keys rmse and mae") {
    TrainReport r;
    r.epochs.push_back({.epoch = 1, .val_rmse = 1.0, .val_mae = 0.8, .wall_ms = 12.5});
    r.stopping_epoch = 1;
    const auto j = report::train_summary(r, {0.9, 0.7});
    CHECK(j.contains("rmse"));
    CHECK(j.contains("mae"));
    CHECK(j["rmse"].get<double>() == 0.9);
    CHECK_FALSE(report::epoch_record(r.epochs[0], false).contains("wall_ms"));
    CHECK(report::epoch_record(r.epochs[0], true).contains("wall_ms"));
  }
}
