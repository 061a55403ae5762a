#pragma once

#include <filesystem>
#include <istream>
#include <vector>

#include <json.hpp>

#include "tgp/datasets/qa_item.hpp"

namespace tgp::datasets {

/// Reads one item per line:
///   {"id": str, "question": str, "context"?: str,
///    "options"?: {letter: str}, "gold": str, "meta"?: object}
/// Blank lines are skipped. Ternary golds are lower-cased before validation.
/// Throws ParseError / ValidationError (with 1-based line) or IoError.
std::vector<QAItem> load_jsonl(const std::filesystem::path& path, const TaskFormat& format);
std::vector<QAItem> parse_jsonl(std::istream& in, const TaskFormat& format);

nlohmann::json to_json(const QAItem& item);
void write_jsonl(const std::filesystem::path& path, const std::vector<QAItem>& items);

}  // namespace tgp::datasets
