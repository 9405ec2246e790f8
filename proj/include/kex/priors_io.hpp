#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "kex/priors.hpp"

namespace kex {

/// Binary priors file, little-endian:
///
///   "KEXP"  u16 version  u16 flags (1 = term stats, 2 = topic model)
///   stats:  u64 doc_count  u64 total_tokens  u64 n  n x {str stem, u64 df, u64 tf}
///   topics: u32 K  f64 alpha  f64 beta  u32 iterations  u64 seed
///           u64 V  V x {str stem, K x f64}   u64 D  D x {str id, K x f64}
///
/// `str` is a u32 byte length followed by UTF-8 bytes. Map entries are written
/// in key order so identical priors give identical files.
inline constexpr std::uint16_t kPriorsVersion = 1;

void write_priors(std::ostream& out, const CorpusPriors& priors);
CorpusPriors read_priors(std::istream& in);

void save_priors(const std::filesystem::path& path, const CorpusPriors& priors);
/// Throws DataError on a bad magic, unknown version or truncated file.
CorpusPriors load_priors(const std::filesystem::path& path);

/// Human-readable JSON dump.
std::string priors_to_json(const CorpusPriors& priors, int indent = 1);

}  // namespace kex
