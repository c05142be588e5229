#pragma once

// On-disk formats. Both are line-oriented text with every double written with
// 17 significant digits, so save/load round-trips bit-exactly.
//
// Matrix file (H*):
//   # srhgnn matrix v1
//   name <name>
//   rows <M>
//   cols <d_H>
//   seed <u64>
//   epochs <int>
//   data
//   <M lines of d_H space-separated values>
//
// Model checkpoint:
//   # srhgnn checkpoint v1
//   num_users <M>
//   num_items <N>
//   h_star_seed <u64>
//   h_star_epochs <int>
//   config <key> = <value>        (one line per configuration key)
//   matrix <name> <rows> <cols>   (followed by <rows> lines of values)
//   ...
//   end

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "srhgnn/sparse.hpp"
#include "srhgnn/trainer.hpp"

namespace srhgnn::io {

struct MatrixFile {
  std::string name;
  Matrix values;
  std::uint64_t seed = 0;
  int epochs = 0;
};

void write_matrix(std::ostream& out, const MatrixFile& file);
MatrixFile read_matrix(std::istream& in, const std::string& source);
void save_matrix(const std::filesystem::path& path, const MatrixFile& file);
MatrixFile load_matrix(const std::filesystem::path& path);

void write_checkpoint(std::ostream& out, Model& model);
Model read_checkpoint(std::istream& in, const std::string& source);
void save_checkpoint(const std::filesystem::path& path, Model& model);
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace srhgnn::io
