#pragma once

#include <string>

namespace bernoulli {

// Round-trip exact float formatting for all CSV/JSON payloads.
std::string format_double(double v);

// Write-to-temp-then-rename so readers never observe partial files.
void atomic_write(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

}  // namespace bernoulli
