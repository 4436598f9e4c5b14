#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "humpforge/humpbuilder.hpp"
#include "humpforge/json_io.hpp"

namespace humpforge {

/// {"k", "n_prev", "n_k", "b_k", "u_k", "v_k", "w_k"}
Json stage_to_json(const HumpStage& stage);
/// eps is recomputed from b_k and the block length; inner_count is not stored.
HumpStage stage_from_json(const Json& j, Exponent p);

/// One JSON object per line.
void write_stages_jsonl(std::ostream& out, std::span<const HumpStage> stages);
/// Throws InputFormatError on malformed lines.
std::vector<HumpStage> read_stages_jsonl(std::istream& in, Exponent p);
std::vector<HumpStage> read_stages_file(const std::filesystem::path& path, Exponent p);

}  // namespace humpforge
