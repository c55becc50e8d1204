#include "fqrp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fqrp/errors.hpp"

namespace fqrp::io {

using nlohmann::json;

namespace {

json number_array(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
  return v;
}

/// nlohmann prints the shortest round-trip form; re-emit every float with
/// a fixed 17 significant digits.
void emit(std::ostream& out, const json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::number_float:
      out << format_number(j.get<double>());
      break;
    case json::value_t::object: {
      out << '{' << nl;
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out << ',' << nl;
        first = false;
        out << pad << json(key).dump() << ": ";
        emit(out, value, indent, depth + 1);
      }
      out << nl << close_pad << '}';
      break;
    }
    case json::value_t::array: {
      out << '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ", ";
        emit(out, j[i], indent, depth + 1);
      }
      out << ']';
      break;
    }
    default:
      out << j.dump();
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

}  // namespace

std::string format_number(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

json to_json(const ScalarQuantizer& q) {
  return json{{"size", q.size()},
              {"levels", number_array(q.levels)},
              {"weights", number_array(q.weights)},
              {"distortion", q.distortion}};
}

ScalarQuantizer scalar_quantizer_from_json(const json& j) {
  ScalarQuantizer q;
  q.levels = vector_from(j.at("levels"));
  q.weights = vector_from(j.at("weights"));
  q.distortion = j.at("distortion").get<double>();
  if (j.at("size").get<Eigen::Index>() != q.levels.size() || q.weights.size() != q.levels.size())
    throw IoError("scalar quantizer JSON: size does not match levels/weights");
  return q;
}

json to_json(const ProductCodebook& cb) {
  json quantizers = json::array();
  for (const auto& q : cb.quantizers) quantizers.push_back(to_json(q));
  return json{{"T", cb.horizon},
              {"d", cb.dim},
              {"budget", cb.budget},
              {"allocation", cb.allocation.levels},
              {"scalar_quantizers", quantizers},
              {"distortion", codebook_distortion(cb)}};
}

ProductCodebook codebook_from_json(const json& j) {
  try {
    ProductCodebook cb;
    cb.horizon = j.at("T").get<double>();
    cb.dim = j.at("d").get<int>();
    cb.budget = j.at("budget").get<long>();
    cb.allocation.budget = integer_root(cb.budget, cb.dim);
    cb.allocation.levels = j.at("allocation").get<std::vector<int>>();
    for (const auto& q : j.at("scalar_quantizers")) cb.quantizers.push_back(scalar_quantizer_from_json(q));
    if (cb.quantizers.size() != cb.allocation.levels.size())
      throw IoError("codebook JSON: one scalar quantizer per allocated frequency required");
    for (std::size_t k = 0; k < cb.quantizers.size(); ++k)
      if (cb.quantizers[k].size() != cb.allocation.levels[k])
        throw IoError("codebook JSON: scalar quantizer " + std::to_string(k) + " has the wrong size");
    cb.lambda = eigenvalues(cb.allocation.active(), cb.horizon);
    cb.allocation.distortion = j.at("distortion").get<double>() / cb.dim;
    return cb;
  } catch (const json::exception& e) {
    throw IoError(std::string("codebook JSON: ") + e.what());
  }
}

std::string dump(const json& j) {
  std::ostringstream out;
  emit(out, j, 2, 0);
  out << '\n';
  return out.str();
}

void write_csv(std::ostream& out, const GridPath& path) {
  out << 't';
  for (Eigen::Index c = 0; c < path.dim(); ++c) out << ",x" << c + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < path.points(); ++i) {
    out << format_number(path.time(i));
    for (Eigen::Index c = 0; c < path.dim(); ++c) out << ',' << format_number(path.values()(i, c));
    out << '\n';
  }
}

GridPath read_grid_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("grid CSV: missing header");
  const auto header = split(line, ',');
  if (header.empty() || header[0] != "t") throw IoError("grid CSV: header must start with t");
  const Eigen::Index dim = static_cast<Eigen::Index>(header.size()) - 1;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (static_cast<Eigen::Index>(cells.size()) != dim + 1) throw IoError("grid CSV: ragged row");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(std::stod(c));
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw IoError("grid CSV: need at least two rows");
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size()) - 1;
  const double horizon = rows.back()[0];
  Eigen::MatrixXd values(n + 1, dim);
  for (Eigen::Index i = 0; i <= n; ++i) {
    const double expected = horizon * static_cast<double>(i) / static_cast<double>(n);
    if (std::abs(rows[i][0] - expected) > 1e-9 * std::max(1.0, horizon))
      throw GridError("grid CSV: times are not uniform");
    for (Eigen::Index c = 0; c < dim; ++c) values(i, c) = rows[i][c + 1];
  }
  return GridPath(horizon, std::move(values));
}

void write_csv(std::ostream& out, const EnhancedPath& path) {
  const Eigen::Index D = path.dim();
  out << 't';
  for (Eigen::Index c = 0; c < D; ++c) out << ",x" << c;
  for (Eigen::Index a = 0; a < D; ++a)
    for (Eigen::Index b = 0; b < D; ++b) out << ",A" << a << b;
  out << '\n';
  for (Eigen::Index i = 0; i <= path.intervals(); ++i) {
    out << format_number(path.horizon() * static_cast<double>(i) / static_cast<double>(path.intervals()));
    for (Eigen::Index c = 0; c < D; ++c) out << ',' << format_number(path.level1()(i, c));
    for (Eigen::Index k = 0; k < D * D; ++k) out << ',' << format_number(path.prefix_areas()(i, k));
    out << '\n';
  }
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fqrp::io
