#include "humpforge/json_io.hpp"

#include <fstream>
#include <stdexcept>

#include "humpforge/errors.hpp"

namespace humpforge {

Json to_json(const SparseSeq& u) {
  auto entries = Json::array();
  for (const auto& e : u.entries()) entries.push_back(Json::array({e.index, e.value}));
  return Json{{"entries", std::move(entries)}};
}

SparseSeq sparse_seq_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("entries") || !j.at("entries").is_array()) {
    throw InputFormatError("sequence must be an object with an \"entries\" array");
  }
  std::vector<Entry> entries;
  entries.reserve(j.at("entries").size());
  for (const auto& pair : j.at("entries")) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() || !pair[1].is_number()) {
      throw InputFormatError("each entry must be [integer index, number value]");
    }
    entries.push_back({pair[0].get<Index>(), pair[1].get<double>()});
  }
  try {
    return SparseSeq(std::move(entries));
  } catch (const std::invalid_argument& e) {
    throw InputFormatError(e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputFormatError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputFormatError(path.string() + ": " + e.what());
  }
}

}  // namespace humpforge
