#pragma once

#include <filesystem>

#include <json.hpp>

#include "humpforge/sparse_seq.hpp"

namespace humpforge {

/// Insertion-ordered JSON so files keep their documented key order.
using Json = nlohmann::ordered_json;

/// {"entries": [[index, value], ...]} with ascending indices and no zeros.
Json to_json(const SparseSeq& u);
/// Throws InputFormatError on any schema violation.
SparseSeq sparse_seq_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);

}  // namespace humpforge
