// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <future>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "fracsample/core.hpp"

namespace fracsample {

enum class RecordKind { thinking, thinking_chunk, solution, failure };

std::string_view to_string(RecordKind k);
RecordKind record_kind_from_string(std::string_view s);

// One persisted generation event. Identity is (run_id, key, kind, ordinal);
// ordinal numbers the chunks of a chunked thinking trace and is 0 otherwise.
struct TraceRecord {
  std::string run_id;
  SampleKey key;
  RecordKind kind = RecordKind::solution;
  int ordinal = 0;
  std::string text;
  int token_count = 0;
  // Thinking tokens preceding this event's output (prefix length for a
  // solution, running total after a chunk).
  int cumulative_thinking_tokens = 0;
  std::uint64_t seed = 0;
  DecodingParams params;
  std::optional<std::string> answer;
  std::optional<bool> correct;
  std::string finish_reason;
  std::vector<int> segment_boundaries;  // thinking records only
  std::optional<int> status;            // failure records: HTTP status, 0 for transport
  std::string created_at;

  std::string identity() const;
};

struct ScoreRecord {
  std::string run_id;
  SampleKey key;
  double score = 0.0;
  std::string scorer;
};

nlohmann::json record_to_json(const TraceRecord& r);
TraceRecord record_from_json(const nlohmann::json& j);
nlohmann::json score_to_json(const ScoreRecord& s);
ScoreRecord score_from_json(const nlohmann::json& j);

// Orders records by key, then kind, then ordinal.
bool record_key_less(const TraceRecord& a, const TraceRecord& b);

struct RecordFilter {
  std::optional<std::string> question_id;
  std::optional<RecordKind> kind;
  std::optional<int> trajectory;
  std::optional<int> depth;
  std::optional<int> solution;
  std::function<bool(const TraceRecord&)> predicate;

  bool matches(const TraceRecord& r) const;
};

std::string utc_timestamp();

// Append-only store for one run under <root>/<run_id>/:
//   records.jsonl  one TraceRecord per line
//   scores.jsonl   one ScoreRecord per line
//   summary.json   RunSummary
// Appends are serialized; readers parse whatever complete lines exist.
class TraceStore {
 public:
  TraceStore(std::filesystem::path root, std::string run_id);

  const std::string& run_id() const { return run_id_; }
  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path records_path() const { return dir_ / "records.jsonl"; }
  std::filesystem::path scores_path() const { return dir_ / "scores.jsonl"; }
  std::filesystem::path summary_path() const { return dir_ / "summary.json"; }
  std::filesystem::path partial_marker_path() const { return dir_ / "PARTIAL"; }

  // Returns the 1-based record id (line number). Throws DuplicateRecord.
  std::uint64_t append(const TraceRecord& record);
  std::vector<TraceRecord> load(const RecordFilter& filter = {}) const;
  std::size_t size() const;

  // One score per (scorer, key); throws DuplicateRecord otherwise.
  void append_score(const ScoreRecord& score);
  std::vector<ScoreRecord> load_scores() const;
  bool has_scores() const;

  void write_summary(const nlohmann::json& summary) const;
  nlohmann::json read_summary() const;
  void mark_partial(const std::string& reason) const;
  bool is_partial() const;

  static bool exists(const std::filesystem::path& root, const std::string& run_id);

 private:
  void write_line(const std::filesystem::path& path, const std::string& line);

  std::filesystem::path dir_;
  std::string run_id_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::uint64_t> index_;
  std::unordered_map<std::string, std::uint64_t> score_index_;
  std::uint64_t next_id_ = 1;
};

// Single-writer channel in front of a TraceStore: any thread may submit, one
// background thread performs every append in submission order.
class SerializedAppender {
 public:
  explicit SerializedAppender(TraceStore& store);
  ~SerializedAppender();
  SerializedAppender(const SerializedAppender&) = delete;
  SerializedAppender& operator=(const SerializedAppender&) = delete;

  std::future<std::uint64_t> submit(TraceRecord record);
  // Drains pending records and stops the writer thread.
  void close();

 private:
  void run();

  struct Pending {
    TraceRecord record;
    std::promise<std::uint64_t> ack;
  };

  TraceStore& store_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Pending> queue_;
  bool closing_ = false;
  std::thread writer_;
};

}  // namespace fracsample
