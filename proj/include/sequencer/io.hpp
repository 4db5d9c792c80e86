#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "sequencer/dataset.hpp"
#include "sequencer/pipeline.hpp"

namespace sequencer {

// Dense CSV: one row per object, comma-separated reals, optional header line.
Matrix read_csv_matrix(const std::string& path);
// Written with enough digits to round-trip doubles exactly.
void write_csv_matrix(const std::string& path, const Matrix& m);

// 8-bit PGM, binary (P5) or ASCII (P2); image rows become objects.
Matrix read_pgm(const std::string& path);
// Linearly rescales to 0..255 and writes binary PGM.
void write_pgm(const std::string& path, const Matrix& m);

void write_ordering(const std::string& path, const std::vector<int>& ordering);

nlohmann::json result_to_json(const SequencerResult& result);
SequencerResult result_from_json(const nlohmann::json& j);

nlohmann::json read_json(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& j);

// Reorders rows so that row s of the output is objects.row(ordering[s]).
Matrix reorder_rows(const Matrix& m, const std::vector<int>& ordering);

// Sequence position rescaled to [0, 1] per object, usable as a colorbar
// coordinate when displaying vector-valued data on a map. Pairs of
// (object id, scalar) in sequence order.
std::vector<std::pair<int, double>> rank_map(const SequencerResult& result);
void write_rank_map(const std::string& path, const SequencerResult& result);

// Text listing of the top_k (metric, scale) pairs by descending elongation,
// with their diagnostic orderings. Throws when diagnostics were not collected.
std::string format_scale_report(const SequencerResult& result, std::size_t top_k);

}  // namespace sequencer
