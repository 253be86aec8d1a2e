// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#include "fracsample/store.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <tuple>

#include "fracsample/error.hpp"

namespace fracsample {
namespace fs = std::filesystem;

std::string_view to_string(RecordKind k) {
  switch (k) {
    case RecordKind::thinking:
      return "thinking";
    case RecordKind::thinking_chunk:
      return "thinking_chunk";
    case RecordKind::solution:
      return "solution";
    case RecordKind::failure:
      return "failure";
  }
  return "unknown";
}

RecordKind record_kind_from_string(std::string_view s) {
  if (s == "thinking") return RecordKind::thinking;
  if (s == "thinking_chunk") return RecordKind::thinking_chunk;
  if (s == "solution") return RecordKind::solution;
  if (s == "failure") return RecordKind::failure;
  throw StoreError("unknown record kind '" + std::string(s) + "'");
}

std::string TraceRecord::identity() const {
  std::ostringstream os;
  os << run_id << '|' << key.str() << '|' << to_string(kind) << '|' << ordinal;
  return os.str();
}

nlohmann::json record_to_json(const TraceRecord& r) {
  nlohmann::json j = {
      {"run_id", r.run_id},
      {"question_id", r.key.question_id},
      {"i", r.key.trajectory},
      {"t", r.key.depth},
      {"j", r.key.solution},
      {"kind", to_string(r.kind)},
      {"ordinal", r.ordinal},
      {"text", r.text},
      {"token_count", r.token_count},
      {"cumulative_thinking_tokens", r.cumulative_thinking_tokens},
      {"seed", r.seed},
      {"params", r.params},
      {"finish_reason", r.finish_reason},
      {"created_at", r.created_at},
  };
  if (r.answer) j["answer"] = *r.answer;
  if (r.correct) j["correct"] = *r.correct;
  if (!r.segment_boundaries.empty()) j["segment_boundaries"] = r.segment_boundaries;
  if (r.status) j["status"] = *r.status;
  return j;
}

TraceRecord record_from_json(const nlohmann::json& j) {
  TraceRecord r;
  j.at("run_id").get_to(r.run_id);
  j.get_to(r.key);
  r.kind = record_kind_from_string(j.at("kind").get<std::string>());
  j.at("ordinal").get_to(r.ordinal);
  j.at("text").get_to(r.text);
  j.at("token_count").get_to(r.token_count);
  r.cumulative_thinking_tokens = j.value("cumulative_thinking_tokens", 0);
  r.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("params")) j.at("params").get_to(r.params);
  r.finish_reason = j.value("finish_reason", std::string{});
  r.created_at = j.value("created_at", std::string{});
  if (j.contains("answer")) r.answer = j.at("answer").get<std::string>();
  if (j.contains("correct")) r.correct = j.at("correct").get<bool>();
  if (j.contains("segment_boundaries")) j.at("segment_boundaries").get_to(r.segment_boundaries);
  if (j.contains("status")) r.status = j.at("status").get<int>();
  if (r.token_count < 0) throw StoreError("negative token_count");
  return r;
}

nlohmann::json score_to_json(const ScoreRecord& s) {
  return {{"run_id", s.run_id},   {"question_id", s.key.question_id}, {"i", s.key.trajectory},
          {"t", s.key.depth},     {"j", s.key.solution},              {"score", s.score},
          {"scorer", s.scorer}};
}

ScoreRecord score_from_json(const nlohmann::json& j) {
  ScoreRecord s;
  s.run_id = j.value("run_id", std::string{});
  j.get_to(s.key);
  j.at("score").get_to(s.score);
  s.scorer = j.value("scorer", std::string{});
  if (!std::isfinite(s.score)) throw StoreError("non-finite score");
  return s;
}

bool record_key_less(const TraceRecord& a, const TraceRecord& b) {
  return std::tie(a.key, a.kind, a.ordinal) < std::tie(b.key, b.kind, b.ordinal);
}

bool RecordFilter::matches(const TraceRecord& r) const {
  if (question_id && r.key.question_id != *question_id) return false;
  if (kind && r.kind != *kind) return false;
  if (trajectory && r.key.trajectory != *trajectory) return false;
  if (depth && r.key.depth != *depth) return false;
  if (solution && r.key.solution != *solution) return false;
  return !predicate || predicate(r);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t secs = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

namespace {

// Calls fn(json, byte_offset) for every line; empty trailing fragment ignored.
template <typename Fn>
void for_each_line(const fs::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return;
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    const std::uint64_t start = offset;
    offset += line.size() + 1;
    if (line.empty()) {
      throw CorruptRecord(path.string(), start, "empty line");
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw CorruptRecord(path.string(), start, e.what());
    }
    try {
      fn(j, start);
    } catch (const CorruptRecord&) {
      throw;
    } catch (const std::exception& e) {
      throw CorruptRecord(path.string(), start, e.what());
    }
  }
}

std::string score_identity(const ScoreRecord& s) { return s.scorer + "|" + s.key.str(); }

}  // namespace

TraceStore::TraceStore(fs::path root, std::string run_id)
    : dir_(std::move(root) / run_id), run_id_(std::move(run_id)) {
  if (run_id_.empty()) throw StoreError("run id must be non-empty");
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw StoreError("cannot create run directory " + dir_.string() + ": " + ec.message());
  for_each_line(records_path(), [&](const nlohmann::json& j, std::uint64_t) {
    index_.emplace(record_from_json(j).identity(), next_id_++);
  });
  std::uint64_t score_id = 1;
  for_each_line(scores_path(), [&](const nlohmann::json& j, std::uint64_t) {
    score_index_.emplace(score_identity(score_from_json(j)), score_id++);
  });
}

bool TraceStore::exists(const fs::path& root, const std::string& run_id) {
  return fs::exists(root / run_id / "records.jsonl");
}

void TraceStore::write_line(const fs::path& path, const std::string& line) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw StoreError("cannot open " + path.string() + " for append");
  out << line << '\n';
  out.flush();
  if (!out) throw StoreError("write failed on " + path.string());
}

std::uint64_t TraceStore::append(const TraceRecord& record) {
  if (record.token_count < 0) throw StoreError("record token_count must be >= 0");
  TraceRecord stored = record;
  stored.run_id = run_id_;
  const std::string id = stored.identity();
  std::lock_guard lock(mu_);
  if (auto it = index_.find(id); it != index_.end()) throw DuplicateRecord(id, it->second);
  write_line(records_path(), record_to_json(stored).dump());
  const std::uint64_t rid = next_id_++;
  index_.emplace(id, rid);
  return rid;
}

std::vector<TraceRecord> TraceStore::load(const RecordFilter& filter) const {
  std::vector<TraceRecord> out;
  {
    std::lock_guard lock(mu_);
    for_each_line(records_path(), [&](const nlohmann::json& j, std::uint64_t) {
      auto r = record_from_json(j);
      if (filter.matches(r)) out.push_back(std::move(r));
    });
  }
  std::stable_sort(out.begin(), out.end(), record_key_less);
  return out;
}

std::size_t TraceStore::size() const {
  std::lock_guard lock(mu_);
  return index_.size();
}

void TraceStore::append_score(const ScoreRecord& score) {
  if (!std::isfinite(score.score)) throw StoreError("score must be finite");
  ScoreRecord stored = score;
  stored.run_id = run_id_;
  const std::string id = score_identity(stored);
  std::lock_guard lock(mu_);
  if (auto it = score_index_.find(id); it != score_index_.end()) {
    throw DuplicateRecord(id, it->second);
  }
  write_line(scores_path(), score_to_json(stored).dump());
  score_index_.emplace(id, score_index_.size() + 1);
}

std::vector<ScoreRecord> TraceStore::load_scores() const {
  std::vector<ScoreRecord> out;
  std::lock_guard lock(mu_);
  for_each_line(scores_path(), [&](const nlohmann::json& j, std::uint64_t) {
    out.push_back(score_from_json(j));
  });
  return out;
}

bool TraceStore::has_scores() const { return fs::exists(scores_path()); }

void TraceStore::write_summary(const nlohmann::json& summary) const {
  std::ofstream out(summary_path(), std::ios::binary | std::ios::trunc);
  if (!out) throw StoreError("cannot write " + summary_path().string());
  out << summary.dump(2) << '\n';
}

nlohmann::json TraceStore::read_summary() const {
  std::ifstream in(summary_path(), std::ios::binary);
  if (!in) throw StoreError("missing " + summary_path().string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw StoreError(summary_path().string() + ": " + e.what());
  }
}

void TraceStore::mark_partial(const std::string& reason) const {
  std::ofstream out(partial_marker_path(), std::ios::binary | std::ios::trunc);
  out << reason << '\n';
}

bool TraceStore::is_partial() const { return fs::exists(partial_marker_path()); }

// SerializedAppender ---------------------------------------------------------

SerializedAppender::SerializedAppender(TraceStore& store)
    : store_(store), writer_([this] { run(); }) {}

SerializedAppender::~SerializedAppender() { close(); }

std::future<std::uint64_t> SerializedAppender::submit(TraceRecord record) {
  Pending p{std::move(record), {}};
  auto fut = p.ack.get_future();
  {
    std::lock_guard lock(mu_);
    if (closing_) throw StoreError("appender is closed");
    queue_.push_back(std::move(p));
  }
  cv_.notify_one();
  return fut;
}

void SerializedAppender::close() {
  {
    std::lock_guard lock(mu_);
    if (closing_ && !writer_.joinable()) return;
    closing_ = true;
  }
  cv_.notify_one();
  if (writer_.joinable()) writer_.join();
}

void SerializedAppender::run() {
  for (;;) {
    Pending p;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return closing_ || !queue_.empty(); });
      if (queue_.empty()) return;
      p = std::move(queue_.front());
      queue_.pop_front();
    }
    try {
      p.ack.set_value(store_.append(p.record));
    } catch (...) {
      p.ack.set_exception(std::current_exception());
    }
  }
}

}  // namespace fracsample
