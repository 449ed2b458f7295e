#pragma once

#include <string>
#include <vector>

#include "revgrid/config.hpp"

namespace revgrid {

/// SHA-1 digest of a byte string, lowercase hex.
std::string sha1_hex(const std::string& bytes);

/// Hash of file content with git blob semantics: sha1("blob <len>\0" + bytes).
std::string git_blob_hash(const std::string& bytes);

/// Write <out_dir>/manifest.txt: a sorted echo of the configuration, the
/// content hash of every named output file (paths relative to out_dir) and a
/// combined hash over the per-file records.
void write_manifest(const std::string& out_dir, const ConfigFile& config,
                    const std::vector<std::string>& relative_files);

}  // namespace revgrid
