#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ztac {

/// Shared tokenization rule used by every module: ASCII letters are lowercased,
/// any ASCII character that is not a letter or digit separates tokens, and empty
/// tokens are dropped. Bytes >= 0x80 are kept inside tokens so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view text);

/// Tokens of `text` joined by single spaces ("Patient-Consent" -> "patient consent").
std::string normalize(std::string_view text);

}  // namespace ztac
