#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dog/chain_tracker.hpp"
#include "dog/decoder.hpp"
#include "dog/kg_store.hpp"
#include "dog/scorer.hpp"
#include "dog/token_space.hpp"

namespace dog {

inline constexpr std::string_view kTraceSchema = "dog_trace_v1";

struct QaInstance {
  std::string id;
  std::string question;
  std::vector<EntityLabel> query_entities;
  std::vector<std::string> answers;
  GraphPtr graph;
  std::optional<Chain> gold_chain;
};

// One JSON Lines record. `instance` is empty when the line failed to parse
// or its graph could not be loaded; `error` then says why.
struct DatasetEntry {
  std::size_t line = 0;
  std::string id;
  std::optional<QaInstance> instance;
  std::string error;
};

// {"id", "question", "query_entities": [..], "answers": [..],
//  "graph": [[h, r, t], ..] | "relative/or/absolute.tsv",
//  "gold_chain": [[h, r, t], ..]}   (gold_chain optional)
// Graph paths resolve against `base_dir`. Throws dog::DataError on any defect.
QaInstance parse_instance(std::string_view json_line, const std::string& base_dir = ".");

// Per-line failures are recorded, not thrown. Throws dog::DataError when the
// stream holds no records at all.
std::vector<DatasetEntry> load_dataset(std::istream& in, const std::string& base_dir = ".");
std::vector<DatasetEntry> load_dataset_file(const std::string& path);

std::string instance_to_json(const QaInstance& instance);

struct TraceCandidate {
  Chain chain;
  double chain_score = 0.0;
  std::vector<double> step_scores;
  std::string text;
  std::vector<std::string> predicted_answers;
  bool finished = true;

  friend bool operator==(const TraceCandidate&, const TraceCandidate&) = default;
};

struct TraceMetrics {
  std::optional<int> hits_at_1;
  std::optional<double> triplet_f1;
  std::optional<double> ill_triplet_rate;

  friend bool operator==(const TraceMetrics&, const TraceMetrics&) = default;
};

struct DecodeTrace {
  std::string instance_id;
  std::vector<TraceCandidate> candidates;  // best chain score first
  // Answers of the first candidate with an extractable answer.
  std::vector<std::string> answers;
  TraceMetrics metrics;
  std::vector<std::string> warnings;
  std::optional<std::string> error;

  friend bool operator==(const DecodeTrace&, const DecodeTrace&) = default;
};

// Single-line JSON carrying "schema": "dog_trace_v1".
std::string trace_to_json(const DecodeTrace& trace);
DecodeTrace trace_from_json(std::string_view json);

struct AggregateReport {
  std::size_t instances = 0;
  std::size_t decoded = 0;
  std::size_t failed = 0;
  std::size_t with_gold_chain = 0;
  double hits_at_1 = 0.0;  // mean over decoded instances
  std::optional<double> triplet_f1;  // mean over decoded instances with a gold chain
  double ill_triplet_rate = 0.0;     // mean over decoded instances

  std::string to_json() const;
  std::string to_table() const;
};

// Fills candidate texts/answers, the fallback answer and per-instance
// metrics from decoded candidates.
DecodeTrace make_trace(const QaInstance& instance, std::span<const BeamCandidate> candidates,
                       const Tokenizer& tokenizer);

// Recomputes metrics for `traces` against the gold data in `entries`
// (matched by id). Traces with errors or without a matching instance count
// as failed.
AggregateReport evaluate_traces(std::span<const DecodeTrace> traces, std::span<const DatasetEntry> entries);

struct ScorerRequest {
  const QaInstance& instance;
  const Tokenizer& tokenizer;
  std::size_t prompt_length;
  std::uint64_t seed;
};

using TokenizerFactory =
    std::function<std::shared_ptr<const Tokenizer>(const QaInstance& instance, const std::string& prompt)>;
using ScorerFactory = std::function<std::unique_ptr<LmScorer>(const ScorerRequest& request)>;

// Reference tokenizer whose vocabulary covers the prompt, every triplet
// surface of the instance graph and any `extra_texts`.
std::shared_ptr<const Tokenizer> make_reference_tokenizer(const QaInstance& instance, const std::string& prompt,
                                                          std::span<const std::string> extra_texts = {});

struct RunOptions {
  DecodeConfig config;
  std::string prompt_template;  // empty: default_prompt_template()
};

// Decodes every instance and streams one trace per entry to `sink`.
// Instance-level failures become traces with an error. Throws
// dog::DataError for an empty dataset.
AggregateReport run_dataset(std::span<const DatasetEntry> entries, const RunOptions& options,
                            const TokenizerFactory& make_tokenizer, const ScorerFactory& make_scorer,
                            const std::function<void(const DecodeTrace&)>& sink);

}  // namespace dog
