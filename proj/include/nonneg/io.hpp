#pragma once

#include <filesystem>
#include <fstream>
#include <string>

namespace nonneg {

/// Shortest round-trip-safe text form used in every CSV: 17 significant digits.
std::string format_real(double v);

/// Opens `path` for writing, creating parent directories; throws io on failure.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace nonneg
