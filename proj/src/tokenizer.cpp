#include "rba/tokenizer.hpp"

namespace rba {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  for_each_token(text, [&](const std::string& token) { tokens.push_back(token); });
  return tokens;
}

}  // namespace rba
