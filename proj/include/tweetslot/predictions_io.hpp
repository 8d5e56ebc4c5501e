#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "error.hpp"
#include "json.hpp"
#include "model.hpp"

namespace tweetslot {

// One JSON object per line:
// {"tweet_id","event","subtask","candidate_index","chunk_text","probability",
//  "decision"} plus "filtered" once post-processing has run.
inline void write_predictions(std::ostream& out, std::span<const PredictionRecord> records,
                              bool with_filtered) {
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["tweet_id"] = r.tweet_id;
    j["event"] = to_string(r.subtask.event);
    j["subtask"] = r.subtask.name;
    j["candidate_index"] = r.candidate_index;
    j["chunk_text"] = r.chunk_text;
    j["probability"] = r.probability;
    j["decision"] = r.decision;
    if (with_filtered) j["filtered"] = r.filtered;
    out << j.dump() << '\n';
  }
}

inline void save_predictions(const std::string& path, std::span<const PredictionRecord> records,
                             bool with_filtered) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write predictions: " + path);
  write_predictions(out, records, with_filtered);
}

inline std::vector<PredictionRecord> parse_predictions(std::istream& in,
                                                       const std::string& source) {
  std::vector<PredictionRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = source + ":" + std::to_string(lineno);
    try {
      const auto j = nlohmann::json::parse(line);
      PredictionRecord r;
      r.tweet_id = j.at("tweet_id").get<std::string>();
      const auto ev = parse_event(j.at("event").get<std::string>());
      if (!ev) throw DataError(where + ": field 'event': unknown event");
      r.subtask = {*ev, j.at("subtask").get<std::string>()};
      r.candidate_index = j.at("candidate_index").get<std::size_t>();
      r.chunk_text = j.at("chunk_text").get<std::string>();
      r.probability = j.at("probability").get<double>();
      r.decision = j.at("decision").get<int>();
      r.filtered = j.value("filtered", false);
      if (r.decision != 0 && r.decision != 1) {
        throw DataError(where + ": field 'decision': must be 0 or 1");
      }
      if (!(r.probability >= 0.0 && r.probability <= 1.0)) {
        throw DataError(where + ": field 'probability': outside [0,1]");
      }
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<PredictionRecord> load_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open predictions: " + path);
  return parse_predictions(in, path);
}

}  // namespace tweetslot
