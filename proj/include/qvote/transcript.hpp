#pragma once

// Ordered protocol events, persisted one JSON object per line:
//   {"run_id", "rep", "step", "site", "payload", "outcome"}
// `payload.kind` is one of CONFIG, PREPARE, DISTRIBUTE, VOTE, RETURN, MEASURE,
// RESULT. Votes appear only as salted SHA-256 commitments.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qvote/rng.hpp"

namespace qvote {

using Json = nlohmann::ordered_json;

enum class EventKind { Config, Prepare, Distribute, Vote, Return, Measure, Result };

std::string_view to_string(EventKind kind);
EventKind parse_event_kind(std::string_view text);

struct Event {
  std::string run_id;
  std::optional<std::size_t> rep;
  std::size_t step = 0;
  std::optional<std::size_t> site;
  EventKind kind = EventKind::Prepare;
  Json payload = Json::object();  // extra fields, merged after "kind"
  Json outcome = nullptr;

  Json to_json() const;
  static Event from_json(const Json& line);
};

class Transcript {
 public:
  explicit Transcript(std::string run_id) : run_id_(std::move(run_id)) {}

  const std::string& run_id() const { return run_id_; }
  const std::vector<Event>& events() const { return events_; }

  /// Appends an event; steps are numbered consecutively per transcript.
  Event& add(EventKind kind, std::optional<std::size_t> rep = std::nullopt,
             std::optional<std::size_t> site = std::nullopt, Json payload = Json::object(),
             Json outcome = nullptr);

  void append(const Transcript& other);

  std::string to_jsonl() const;

 private:
  std::string run_id_;
  std::vector<Event> events_;
  std::size_t next_step_ = 0;
};

/// "run-" followed by the seed in 16 hex digits.
std::string run_id(std::uint64_t seed);

/// Hex SHA-256 of salt || choice.
std::string commitment(std::string_view choice, std::uint64_t salt);

}  // namespace qvote
