#include "qvote/transcript.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <stdexcept>

#include "qvote/errors.hpp"

namespace qvote {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 7> kKindNames{{
    {EventKind::Config, "CONFIG"},
    {EventKind::Prepare, "PREPARE"},
    {EventKind::Distribute, "DISTRIBUTE"},
    {EventKind::Vote, "VOTE"},
    {EventKind::Return, "RETURN"},
    {EventKind::Measure, "MEASURE"},
    {EventKind::Result, "RESULT"},
}};

Json optional_index(const std::optional<std::size_t>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<std::size_t> read_optional_index(const Json& line, const char* key) {
  const Json& v = line.at(key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number_unsigned()) throw ConfigError(std::string("'") + key + "' must be a non-negative integer or null");
  return v.get<std::size_t>();
}

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "?";
}

EventKind parse_event_kind(std::string_view text) {
  for (const auto& [k, name] : kKindNames)
    if (name == text) return k;
  throw ConfigError("unknown event kind '" + std::string(text) + "'");
}

Json Event::to_json() const {
  Json p = Json::object();
  p["kind"] = to_string(kind);
  for (const auto& [key, value] : payload.items()) p[key] = value;
  Json line = Json::object();
  line["run_id"] = run_id;
  line["rep"] = optional_index(rep);
  line["step"] = step;
  line["site"] = optional_index(site);
  line["payload"] = std::move(p);
  line["outcome"] = outcome;
  return line;
}

Event Event::from_json(const Json& line) {
  if (!line.is_object()) throw ConfigError("event must be a JSON object");
  for (const char* key : {"run_id", "rep", "step", "site", "payload", "outcome"})
    if (!line.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  if (line.size() != 6) throw ConfigError("unexpected extra fields");
  Event e;
  if (!line["run_id"].is_string()) throw ConfigError("'run_id' must be a string");
  e.run_id = line["run_id"].get<std::string>();
  e.rep = read_optional_index(line, "rep");
  if (!line["step"].is_number_unsigned()) throw ConfigError("'step' must be a non-negative integer");
  e.step = line["step"].get<std::size_t>();
  e.site = read_optional_index(line, "site");
  const Json& p = line["payload"];
  if (!p.is_object() || !p.contains("kind") || !p["kind"].is_string())
    throw ConfigError("'payload' must be an object with a string 'kind'");
  e.kind = parse_event_kind(p["kind"].get<std::string>());
  e.payload = p;
  e.payload.erase("kind");
  e.outcome = line["outcome"];
  return e;
}

Event& Transcript::add(EventKind kind, std::optional<std::size_t> rep, std::optional<std::size_t> site,
                       Json payload, Json outcome) {
  Event e;
  e.run_id = run_id_;
  e.rep = rep;
  e.step = next_step_++;
  e.site = site;
  e.kind = kind;
  e.payload = std::move(payload);
  e.outcome = std::move(outcome);
  events_.push_back(std::move(e));
  return events_.back();
}

void Transcript::append(const Transcript& other) {
  for (Event e : other.events_) {
    e.step = next_step_++;
    events_.push_back(std::move(e));
  }
}

std::string Transcript::to_jsonl() const {
  std::string out;
  for (const Event& e : events_) {
    out += e.to_json().dump();
    out += '\n';
  }
  return out;
}

std::string run_id(std::uint64_t seed) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "run-%016llx", static_cast<unsigned long long>(seed));
  return buf;
}

std::string commitment(std::string_view choice, std::uint64_t salt) {
  std::array<unsigned char, 8> salt_bytes;
  for (std::size_t i = 0; i < 8; ++i) salt_bytes[i] = static_cast<unsigned char>(salt >> (8 * (7 - i)));
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, salt_bytes.data(), salt_bytes.size()) == 1 &&
                  EVP_DigestUpdate(ctx, choice.data(), choice.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest.data(), &length) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

}  // namespace qvote
