#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace idr {

/// Porter (1980) suffix-stripping stemmer for lowercase ASCII words.
std::string porter_stem(std::string_view word);

bool is_stop_word(std::string_view word);

/// lowercase -> split on non-alphanumerics -> drop stop words -> Porter stem
/// -> keep tokens of length >= 2.
std::vector<std::string> tokenize(std::string_view text);

/// Whitespace-delimited word count of the raw text.
std::size_t raw_word_count(std::string_view text);

}  // namespace idr
