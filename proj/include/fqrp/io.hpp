#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "fqrp/codebook.hpp"
#include "fqrp/kl.hpp"
#include "fqrp/roughpath.hpp"
#include "fqrp/scalar_quant.hpp"

namespace fqrp::io {

/// Number with 17 significant digits.
std::string format_number(double x);

nlohmann::json to_json(const ScalarQuantizer& q);
ScalarQuantizer scalar_quantizer_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ProductCodebook& cb);
/// Rebuilds a codebook from its JSON form. Eigenvalues are recomputed from T.
ProductCodebook codebook_from_json(const nlohmann::json& j);

/// Serialized JSON text; levels, weights and distortions carry 17
/// significant digits.
std::string dump(const nlohmann::json& j);

/// CSV with header t,x1,...,xd.
void write_csv(std::ostream& out, const GridPath& path);
GridPath read_grid_csv(std::istream& in);

/// CSV with header t,x0..x{D-1},A00..A{D-1}{D-1} (areas from the origin).
void write_csv(std::ostream& out, const EnhancedPath& path);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace fqrp::io
