#include "tgp/datasets/jsonl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_set>

#include "tgp/error.hpp"

namespace tgp::datasets {
namespace {

QAItem item_from_json(const nlohmann::json& j, std::size_t line) {
  if (!j.is_object()) throw ValidationError(line, "line is not a JSON object");
  auto require_string = [&](const char* field) -> std::string {
    auto it = j.find(field);
    if (it == j.end()) throw ValidationError(line, std::string("missing field '") + field + "'");
    if (!it->is_string()) {
      throw ValidationError(line, std::string("field '") + field + "' must be a string");
    }
    return it->get<std::string>();
  };

  QAItem item;
  item.id = require_string("id");
  item.question = require_string("question");
  item.gold = require_string("gold");
  if (auto it = j.find("context"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ValidationError(line, "field 'context' must be a string");
    item.context = it->get<std::string>();
  }
  if (auto it = j.find("options"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw ValidationError(line, "field 'options' must be an object");
    for (const auto& [key, value] : it->items()) {
      if (key.size() != 1) throw ValidationError(line, "option key '" + key + "' is not a letter");
      if (!value.is_string()) throw ValidationError(line, "option " + key + " must be a string");
      item.options.emplace(key[0], value.get<std::string>());
    }
  }
  if (auto it = j.find("meta"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw ValidationError(line, "field 'meta' must be an object");
    item.meta = *it;
  }
  return item;
}

}  // namespace

std::vector<QAItem> parse_jsonl(std::istream& in, const TaskFormat& format) {
  std::vector<QAItem> items;
  std::unordered_set<std::string> ids;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, e.what());
    }
    QAItem item = item_from_json(j, line_no);
    if (!format.is_mc()) {
      std::transform(item.gold.begin(), item.gold.end(), item.gold.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    }
    if (auto reason = check(item, format)) throw ValidationError(line_no, *reason);
    if (!ids.insert(item.id).second) {
      throw ValidationError(line_no, "duplicate id '" + item.id + "'");
    }
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<QAItem> load_jsonl(const std::filesystem::path& path, const TaskFormat& format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());
  return parse_jsonl(in, format);
}

nlohmann::json to_json(const QAItem& item) {
  nlohmann::json j = {{"id", item.id}, {"question", item.question}, {"gold", item.gold}};
  if (item.context) j["context"] = *item.context;
  if (!item.options.empty()) {
    nlohmann::json opts = nlohmann::json::object();
    for (const auto& [k, v] : item.options) opts[std::string(1, k)] = v;
    j["options"] = std::move(opts);
  }
  if (!item.meta.empty()) j["meta"] = item.meta;
  return j;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<QAItem>& items) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& item : items) out << to_json(item).dump() << '\n';
}

}  // namespace tgp::datasets
