#include "humpforge/stage_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "humpforge/errors.hpp"

namespace humpforge {

Json stage_to_json(const HumpStage& stage) {
  Json j;
  j["k"] = stage.k;
  j["n_prev"] = stage.n_prev;
  j["n_k"] = stage.n_k;
  j["b_k"] = stage.b;
  j["u_k"] = to_json(stage.u);
  j["v_k"] = to_json(stage.v);
  j["w_k"] = to_json(stage.w);
  return j;
}

HumpStage stage_from_json(const Json& j, Exponent p) {
  if (!j.is_object()) throw InputFormatError("stage record must be a JSON object");
  for (const char* key : {"k", "n_prev", "n_k"}) {
    if (!j.contains(key) || !j.at(key).is_number_integer()) {
      throw InputFormatError(std::string("stage record needs integer \"") + key + "\"");
    }
  }
  if (!j.contains("b_k") || !j.at("b_k").is_number()) throw InputFormatError("stage record needs numeric \"b_k\"");
  for (const char* key : {"u_k", "v_k", "w_k"}) {
    if (!j.contains(key)) throw InputFormatError(std::string("stage record needs \"") + key + "\"");
  }
  HumpStage s;
  const auto k = j.at("k").get<std::int64_t>();
  if (k < 1) throw InputFormatError("stage index k must be positive");
  s.k = static_cast<std::size_t>(k);
  s.n_prev = j.at("n_prev").get<Index>();
  s.n_k = j.at("n_k").get<Index>();
  if (s.n_prev < 0 || s.n_k <= s.n_prev) throw InputFormatError("stage block must satisfy 0 <= n_prev < n_k");
  s.b = j.at("b_k").get<double>();
  s.u = sparse_seq_from_json(j.at("u_k"));
  s.v = sparse_seq_from_json(j.at("v_k"));
  s.w = sparse_seq_from_json(j.at("w_k"));
  s.eps = std::min(s.b, std::pow(static_cast<double>(s.block_length()), -p.inverse()));
  return s;
}

void write_stages_jsonl(std::ostream& out, std::span<const HumpStage> stages) {
  for (const auto& s : stages) out << stage_to_json(s).dump() << '\n';
}

std::vector<HumpStage> read_stages_jsonl(std::istream& in, Exponent p) {
  std::vector<HumpStage> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(stage_from_json(Json::parse(line), p));
    } catch (const nlohmann::json::exception& e) {
      throw InputFormatError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const InputFormatError& e) {
      throw InputFormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<HumpStage> read_stages_file(const std::filesystem::path& path, Exponent p) {
  std::ifstream in(path);
  if (!in) throw InputFormatError("cannot open " + path.string());
  return read_stages_jsonl(in, p);
}

}  // namespace humpforge
