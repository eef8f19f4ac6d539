#pragma once

#include <fstream>
#include <json.hpp>
#include <stdexcept>
#include <string>

inline nlohmann::json load_fixture(const std::string& name) {
  const std::string path = std::string(CONEKIT_FIXTURE_DIR) + "/" + name;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing fixture " + path);
  return nlohmann::json::parse(in);
}
