#include "srhgnn/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "srhgnn/errors.hpp"

namespace srhgnn::io {

namespace {

constexpr const char* kMatrixMagic = "# srhgnn matrix v1";
constexpr const char* kCheckpointMagic = "# srhgnn checkpoint v1";

void write_rows(std::ostream& out, const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ' ';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

double parse_double(const std::string& token, const std::string& source) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw DataError(source + ": bad number '" + token + "'");
  }
  return v;
}

Matrix read_rows(std::istream& in, Eigen::Index rows, Eigen::Index cols,
                 const std::string& source) {
  Matrix m(rows, cols);
  std::string token;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!(in >> token)) throw DataError(source + ": truncated matrix data");
    m.data()[i] = parse_double(token, source);
  }
  return m;
}

template <typename T>
T parse_int(const std::string& token, const std::string& source) {
  T v{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw DataError(source + ": bad integer '" + token + "'");
  }
  return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

}  // namespace

void write_matrix(std::ostream& out, const MatrixFile& file) {
  out << kMatrixMagic << '\n'
      << "name " << file.name << '\n'
      << "rows " << file.values.rows() << '\n'
      << "cols " << file.values.cols() << '\n'
      << "seed " << file.seed << '\n'
      << "epochs " << file.epochs << '\n'
      << "data\n";
  write_rows(out, file.values);
}

MatrixFile read_matrix(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || line != kMatrixMagic) {
    throw DataError(source + ": not an srhgnn matrix file");
  }
  MatrixFile f;
  Eigen::Index rows = -1;
  Eigen::Index cols = -1;
  while (std::getline(in, line) && line != "data") {
    std::istringstream ls(line);
    std::string key;
    std::string value;
    ls >> key >> value;
    if (key == "name") f.name = value;
    else if (key == "rows") rows = parse_int<Eigen::Index>(value, source);
    else if (key == "cols") cols = parse_int<Eigen::Index>(value, source);
    else if (key == "seed") f.seed = parse_int<std::uint64_t>(value, source);
    else if (key == "epochs") f.epochs = parse_int<int>(value, source);
    else throw DataError(source + ": unknown header key '" + key + "'");
  }
  if (rows < 0 || cols < 0) throw DataError(source + ": missing rows/cols header");
  f.values = read_rows(in, rows, cols, source);
  return f;
}

void save_matrix(const std::filesystem::path& path, const MatrixFile& file) {
  std::ofstream out = open_out(path);
  write_matrix(out, file);
}

MatrixFile load_matrix(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  return read_matrix(in, path.string());
}

void write_checkpoint(std::ostream& out, Model& model) {
  out << kCheckpointMagic << '\n'
      << "num_users " << model.num_users << '\n'
      << "num_items " << model.num_items << '\n'
      << "h_star_seed " << model.h_star_seed << '\n'
      << "h_star_epochs " << model.h_star_epochs << '\n';
  for (const auto& [k, v] : config_entries(model.config)) {
    out << "config " << k << " = " << v << '\n';
  }
  auto emit = [&out](const std::string& name, const Matrix& m) {
    out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    write_rows(out, m);
  };
  emit("h_star", model.h_star);
  for (const ad::Parameter* p : model.persisted()) emit(p->name(), p->value());
  out << "end\n";
}

Model read_checkpoint(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || line != kCheckpointMagic) {
    throw DataError(source + ": not an srhgnn checkpoint");
  }
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  std::uint64_t seed = 0;
  int epochs = 0;
  std::string config_text;
  std::map<std::string, Matrix> matrices;
  std::string key;
  while (in >> key) {
    if (key == "end") break;
    if (key == "matrix") {
      std::string name;
      std::string r;
      std::string c;
      in >> name >> r >> c;
      matrices[name] = read_rows(in, parse_int<Eigen::Index>(r, source),
                                 parse_int<Eigen::Index>(c, source), source);
      continue;
    }
    std::getline(in, line);
    const auto b = line.find_first_not_of(' ');
    const std::string value = b == std::string::npos ? "" : line.substr(b);
    if (key == "num_users") num_users = parse_int<std::size_t>(value, source);
    else if (key == "num_items") num_items = parse_int<std::size_t>(value, source);
    else if (key == "h_star_seed") seed = parse_int<std::uint64_t>(value, source);
    else if (key == "h_star_epochs") epochs = parse_int<int>(value, source);
    else if (key == "config") config_text += value + "\n";
    else throw DataError(source + ": unknown checkpoint key '" + key + "'");
  }
  if (key != "end") throw DataError(source + ": truncated checkpoint");

  TrainConfig config;
  apply_config_text(config, config_text, source);
  Model model = Model::init(num_users, num_items, config);
  model.h_star_seed = seed;
  model.h_star_epochs = epochs;
  if (auto it = matrices.find("h_star"); it != matrices.end()) model.h_star = it->second;
  for (ad::Parameter* p : model.persisted()) {
    const auto it = matrices.find(p->name());
    if (it == matrices.end()) throw DataError(source + ": missing matrix " + p->name());
    if (it->second.rows() != p->rows() || it->second.cols() != p->cols()) {
      throw DataError(source + ": shape mismatch for " + p->name());
    }
    p->value() = it->second;
    p->zero_grad();
  }
  return model;
}

void save_checkpoint(const std::filesystem::path& path, Model& model) {
  std::ofstream out = open_out(path);
  write_checkpoint(out, model);
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  return read_checkpoint(in, path.string());
}

}  // namespace srhgnn::io
