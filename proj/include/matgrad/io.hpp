// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "matgrad/network.hpp"
#include "matgrad/trainer.hpp"

// On-disk formats: network specs and weights as JSON, datasets as CSV.
// docs/formats.md describes each schema.
namespace matgrad::io {

// Malformed file content. The message names the line, row or key at fault.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

struct SpecFile {
  // Homogeneous n_0..n_k, or affine m_0..m_k when `affine` is set.
  std::vector<std::size_t> dims;
  std::vector<LayerActivation> activations;
  bool affine = false;
  std::optional<std::uint64_t> seed;
  double scale = kDefaultInitScale;

  // The homogeneous network, embedding the affine one when needed.
  NetworkSpec network() const;
  // Fresh weights for network(); affine specs get their frozen formal rows.
  WeightSet initial_weights(std::uint64_t seed) const;
};

SpecFile parse_spec(std::string_view json_text);
SpecFile load_spec(const std::filesystem::path& path);

// Rows of `cols` reals; a header line is skipped when `has_header` is set.
std::vector<std::vector<double>> parse_csv(std::string_view text, bool has_header,
                                           std::size_t cols);

// Each row: input_dim input columns then the target.
Dataset parse_dataset(std::string_view text, bool has_header, std::size_t input_dim);
Dataset load_dataset(const std::filesystem::path& path, bool has_header, std::size_t input_dim);

// "1.5, -2,3" -> [1.5, -2, 3]ᵀ
ColumnVector parse_vector(std::string_view text);

// {"layers": [{"rows": r, "cols": c, "data": [...]}, ...]} with every real
// printed to 17 significant digits so it reads back bit-identically.
std::string weights_to_json(const WeightSet& w);
WeightSet weights_from_json(std::string_view json_text);
void save_weights(const std::filesystem::path& path, const WeightSet& w);
WeightSet load_weights(const std::filesystem::path& path);

// 17 significant digits ("%.17g"), enough to read back the same double.
std::string format_real(double x);

std::string read_file(const std::filesystem::path& path);

}  // namespace matgrad::io
