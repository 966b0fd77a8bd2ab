#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>

#include "sze/partition.hpp"

namespace sze {

/// Text form: `n k c`, one line per class, then one line for C0 (possibly
/// empty). Throws ParseError on malformed input.
EquitablePartition read_partition(std::istream& in);
void write_partition(std::ostream& out, const EquitablePartition& p);

EquitablePartition load_partition(const std::filesystem::path& path);
void save_partition(const EquitablePartition& p, const std::filesystem::path& path);

/// CSV with header `iteration,k,irregular_count,c0_size`.
void write_trace(std::ostream& out, std::span<const IterationRecord> trace);

}  // namespace sze
