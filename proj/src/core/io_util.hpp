#pragma once

#include <string>

namespace markcorr {

// Writes via a temp file in the same directory, then renames into place.
void write_text_atomic(const std::string& path, const std::string& content);

} // namespace markcorr
