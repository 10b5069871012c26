#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sopsim/dynamics.hpp"
#include "sopsim/effective.hpp"
#include "sopsim/schedule.hpp"

namespace sopsim {

inline constexpr const char* version_string = "0.1.0";

// 17-significant-digit decimal form; parses back to the identical double.
std::string format_double(double v);

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t value);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

// CSV writers: one header line, 17-significant-digit numbers, LF endings,
// and no timestamps, so identical runs produce identical bytes.
void write_spectral_scan_csv(const std::filesystem::path& path,
                             const std::vector<spectral_data>& rows);
void write_trajectory_csv(const std::filesystem::path& path, const reduced_trajectory& traj);
void write_schedule_csv(const std::filesystem::path& path, const schedule& sched);

// Reads a two-column t,s file back as a schedule with the unconstrained
// kind tag (round-trip partner of write_schedule_csv).
schedule schedule_from_csv(const std::filesystem::path& path);

// Writes <directory>/manifest.json describing a finished run: tool version,
// creation timestamp, the effective configuration (config_json must parse),
// and a checksummed inventory of the given files. The manifest lands via a
// temporary file and an atomic rename; it is the only output that carries a
// timestamp.
void write_manifest(const std::filesystem::path& directory, const std::string& config_json,
                    const std::vector<std::filesystem::path>& files);

} // namespace sopsim
