#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mimsynth::test {

inline std::string read_model(const std::string& file)
{
  std::ifstream in(std::string(MIMSYNTH_MODELS_DIR) + "/" + file);
  if (!in) throw std::runtime_error("cannot open model " + file);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace mimsynth::test
