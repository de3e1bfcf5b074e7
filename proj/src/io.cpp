// SPDX-License-Identifier: Apache-2.0
#include "matgrad/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace matgrad::io {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_real(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports "... at line L, column C: ..."
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

LayerActivation parse_layer(const json& desc, std::size_t layer, std::size_t width) {
  const std::string where = "key 'activations'[" + std::to_string(layer - 1) + "]";
  try {
    if (desc.is_string()) return LayerActivation::uniform(catalog_lookup(desc.get<std::string>()), width);
    if (desc.is_array()) {
      if (desc.size() != width) {
        throw FormatError(where + ": " + std::to_string(desc.size()) + " names for layer width " +
                          std::to_string(width));
      }
      std::vector<Activation> entries;
      for (const auto& name : desc) {
        if (!name.is_string()) throw FormatError(where + ": activation names must be strings");
        entries.push_back(catalog_lookup(name.get<std::string>()));
      }
      return LayerActivation(std::move(entries));
    }
  } catch (const UnknownActivationError& e) {
    throw FormatError(where + ": " + e.what());
  }
  throw FormatError(where + ": expected a name or an array of names");
}

}  // namespace

NetworkSpec SpecFile::network() const {
  return affine ? affine_spec(dims, activations) : NetworkSpec(dims, activations);
}

WeightSet SpecFile::initial_weights(std::uint64_t s) const {
  if (affine) return embed_affine(dims, activations, s, scale).weights;
  return init_weights(network(), s, scale);
}

SpecFile parse_spec(std::string_view json_text) {
  const json doc = parse_json(json_text);
  if (!doc.is_object()) throw FormatError("spec: top level must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "dims" && key != "activations" && key != "affine" && key != "seed" && key != "scale") {
      throw FormatError("spec: unknown key '" + key + "'");
    }
  }

  SpecFile spec;
  if (!doc.contains("dims") || !doc["dims"].is_array() || doc["dims"].size() < 2) {
    throw FormatError("key 'dims': expected an array of at least two positive integers");
  }
  for (const auto& d : doc["dims"]) {
    if (!d.is_number_integer() || d.get<long long>() < 1) {
      throw FormatError("key 'dims': every entry must be a positive integer");
    }
    spec.dims.push_back(d.get<std::size_t>());
  }
  if (spec.dims.back() != 1) throw FormatError("key 'dims': output dimension must be 1");

  if (!doc.contains("activations") || !doc["activations"].is_array()) {
    throw FormatError("key 'activations': expected an array with one entry per layer");
  }
  const json& acts = doc["activations"];
  const std::size_t k = spec.dims.size() - 1;
  if (acts.size() != k) {
    throw FormatError("key 'activations': " + std::to_string(acts.size()) + " entries for " +
                      std::to_string(k) + " layers");
  }
  for (std::size_t i = 1; i <= k; ++i) spec.activations.push_back(parse_layer(acts[i - 1], i, spec.dims[i]));

  if (doc.contains("affine")) {
    if (!doc["affine"].is_boolean()) throw FormatError("key 'affine': expected true or false");
    spec.affine = doc["affine"].get<bool>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw FormatError("key 'seed': expected a non-negative integer");
    spec.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("scale")) {
    if (!doc["scale"].is_number() || !(doc["scale"].get<double>() > 0.0)) {
      throw FormatError("key 'scale': expected a positive number");
    }
    spec.scale = doc["scale"].get<double>();
  }

  try {
    (void)spec.network();
  } catch (const SpecError& e) {
    throw FormatError(std::string("spec: ") + e.what());
  }
  return spec;
}

SpecFile load_spec(const std::filesystem::path& path) { return parse_spec(read_file(path)); }

std::vector<std::vector<double>> parse_csv(std::string_view text, bool has_header, std::size_t cols) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  bool header_pending = has_header;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const std::size_t row_no = rows.size() + 1;
    const auto cells = split(line, ',');
    if (cells.size() != cols) {
      throw FormatError("data row " + std::to_string(row_no) + " (line " + std::to_string(line_no) +
                        "): expected " + std::to_string(cols) + " columns, got " +
                        std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cols);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = parse_real(cells[c]);
      if (!v) {
        throw FormatError("data row " + std::to_string(row_no) + " (line " + std::to_string(line_no) +
                          "), column " + std::to_string(c + 1) + ": '" + std::string(trim(cells[c])) +
                          "' is not a finite real");
      }
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError("data: no rows");
  return rows;
}

Dataset parse_dataset(std::string_view text, bool has_header, std::size_t input_dim) {
  const auto rows = parse_csv(text, has_header, input_dim + 1);
  std::vector<ColumnVector> inputs;
  std::vector<double> targets;
  for (const auto& r : rows) {
    inputs.emplace_back(std::vector<double>(r.begin(), r.end() - 1));
    targets.push_back(r.back());
  }
  return Dataset(std::move(inputs), std::move(targets));
}

Dataset load_dataset(const std::filesystem::path& path, bool has_header, std::size_t input_dim) {
  return parse_dataset(read_file(path), has_header, input_dim);
}

ColumnVector parse_vector(std::string_view text) {
  std::vector<double> e;
  for (std::string_view cell : split(text, ',')) {
    const auto v = parse_real(cell);
    if (!v) throw FormatError("input: '" + std::string(trim(cell)) + "' is not a finite real");
    e.push_back(*v);
  }
  return ColumnVector(std::move(e));
}

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string weights_to_json(const WeightSet& w) {
  std::ostringstream os;
  os << "{\n  \"layers\": [\n";
  for (std::size_t i = 1; i <= w.layers(); ++i) {
    const Matrix& m = w.layer(i);
    os << "    {\"rows\": " << m.rows() << ", \"cols\": " << m.cols() << ", \"data\": [";
    for (std::size_t e = 0; e < m.size(); ++e) {
      const double v = m.data()[e];
      // A bare "-0" would read back as the integer 0 and lose its sign.
      os << (e ? ", " : "") << (v == 0.0 && std::signbit(v) ? "-0.0" : format_real(v));
    }
    os << "]}" << (i < w.layers() ? "," : "") << "\n";
  }
  os << "  ]\n}\n";
  return os.str();
}

WeightSet weights_from_json(std::string_view json_text) {
  const json doc = parse_json(json_text);
  if (!doc.is_object() || !doc.contains("layers") || !doc["layers"].is_array() || doc["layers"].empty()) {
    throw FormatError("weights: expected an object with a non-empty 'layers' array");
  }
  std::vector<Matrix> layers;
  for (std::size_t i = 0; i < doc["layers"].size(); ++i) {
    const json& l = doc["layers"][i];
    const std::string where = "weights: key 'layers'[" + std::to_string(i) + "]";
    if (!l.is_object() || !l.contains("rows") || !l.contains("cols") || !l.contains("data") ||
        !l["rows"].is_number_unsigned() || !l["cols"].is_number_unsigned() || !l["data"].is_array()) {
      throw FormatError(where + ": expected {\"rows\", \"cols\", \"data\"}");
    }
    const auto rows = l["rows"].get<std::size_t>();
    const auto cols = l["cols"].get<std::size_t>();
    std::vector<double> data;
    for (const auto& v : l["data"]) {
      if (!v.is_number()) throw FormatError(where + ": 'data' must hold numbers");
      data.push_back(v.get<double>());
    }
    try {
      layers.emplace_back(rows, cols, std::move(data));
    } catch (const std::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
  }
  return WeightSet(std::move(layers));
}

void save_weights(const std::filesystem::path& path, const WeightSet& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << weights_to_json(w);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

WeightSet load_weights(const std::filesystem::path& path) { return weights_from_json(read_file(path)); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace matgrad::io
