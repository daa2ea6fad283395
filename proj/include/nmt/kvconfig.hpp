#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nmt {

// Flat "key = value" text: one pair per line, '#' starts a comment, blank
// lines ignored. Used for run configs and the checkpoint's config block so
// every run is diffable.
std::vector<std::pair<std::string, std::string>> parse_kv_lines(
    std::span<const std::string> lines);

std::int64_t kv_int(const std::string& key, const std::string& value);
double kv_double(const std::string& key, const std::string& value);
std::uint64_t kv_uint(const std::string& key, const std::string& value);

// Shortest round-trip-exact decimal form.
std::string format_double(double v);

}  // namespace nmt
