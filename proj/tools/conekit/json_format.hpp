#pragma once

#include <string>

#include <json.hpp>

namespace conekit::cli {

// JSON text with every floating-point number printed as %.17g, keys sorted.
std::string dump_json(const nlohmann::json& j, int indent = 2);

// %.17g, with non-finite values spelled inf, -inf, nan.
std::string format_double(double x);

}  // namespace conekit::cli
