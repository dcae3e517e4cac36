#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dog::text {

std::string_view trim_view(std::string_view s) noexcept;
std::string trim(std::string_view s);

// Unicode NFC. Throws dog::EncodeError on invalid UTF-8.
std::string nfc(std::string_view s);

// Label identity used for entities and relations: NFC then trim.
std::string normalize_label(std::string_view s);

// Loose comparison key for answers: NFC, full case fold, trim, internal
// whitespace runs collapsed to one space.
std::string normalize_answer(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);

bool is_valid_utf8(std::string_view s) noexcept;

}  // namespace dog::text
