#include "kex/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "kex/parallel.hpp"
#include "utf8.hpp"

namespace fs = std::filesystem;

namespace kex {

WarningHandler stderr_warnings() {
  return [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string decoded(std::string raw, const fs::path& origin, const WarningHandler& warn) {
  bool lossy = false;
  std::string text = utf8::sanitize(raw, &lossy);
  if (lossy && warn) warn("invalid UTF-8 replaced in " + origin.string());
  return text;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n\xEF\xBB\xBF");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> key_lines(const std::string& content) {
  std::vector<std::string> out;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

Dataset load_benchmark_dir(const fs::path& root, const WarningHandler& warn) {
  Dataset ds;
  ds.name = root.filename().string();
  if (ds.name.empty()) ds.name = root.parent_path().filename().string();

  std::error_code ec;
  fs::directory_iterator it(root / "docsutf8", ec);
  if (ec) throw DataError("cannot list " + (root / "docsutf8").string() + ": " + ec.message());
  for (const auto& entry : it) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    RawDocument doc;
    doc.id = entry.path().stem().string();
    doc.text = decoded(read_file(entry.path()), entry.path(), warn);
    const fs::path key = root / "keys" / (doc.id + ".key");
    if (fs::exists(key)) {
      doc.gold = key_lines(decoded(read_file(key), key, warn));
    } else if (warn) {
      warn("no key file for document " + doc.id);
    }
    ds.documents.push_back(std::move(doc));
  }
  return ds;
}

Dataset load_jsonl(const fs::path& file, const WarningHandler& warn) {
  Dataset ds;
  ds.name = file.stem().string();
  std::istringstream in(decoded(read_file(file), file, warn));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::string where = file.string() + ":" + std::to_string(lineno);
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string()) {
      throw DataError(where + ": record needs a string `id`");
    }
    RawDocument doc;
    doc.id = rec["id"].get<std::string>();
    try {
      if (rec.contains("tokens")) {
        std::vector<TaggedToken> toks;
        for (const auto& t : rec["tokens"]) {
          toks.push_back({t.at("surface").get<std::string>(), t.at("pos").get<std::string>()});
        }
        doc.tagged = std::move(toks);
      } else {
        doc.text = rec.at("text").get<std::string>();
      }
      if (rec.contains("keywords")) {
        for (const auto& k : rec["keywords"]) {
          auto t = trim(k.get<std::string>());
          if (!t.empty()) doc.gold.push_back(std::move(t));
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    ds.documents.push_back(std::move(doc));
  }
  return ds;
}

}  // namespace

Dataset load_dataset(const fs::path& path, const WarningHandler& warn) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw DataError("dataset path does not exist: " + path.string());

  Dataset ds;
  if (fs::is_regular_file(path)) {
    ds = load_jsonl(path, warn);
  } else if (fs::is_directory(path / "docsutf8")) {
    ds = load_benchmark_dir(path, warn);
  } else {
    std::vector<fs::path> jsonl;
    for (const auto& e : fs::directory_iterator(path, ec)) {
      if (e.is_regular_file() && e.path().extension() == ".jsonl") jsonl.push_back(e.path());
    }
    if (jsonl.size() != 1) {
      throw DataError(path.string() + ": expected docsutf8/ or exactly one .jsonl file");
    }
    ds = load_jsonl(jsonl.front(), warn);
    ds.name = path.filename().string();
  }

  std::sort(ds.documents.begin(), ds.documents.end(),
            [](const RawDocument& a, const RawDocument& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < ds.documents.size(); ++i) {
    if (ds.documents[i].id == ds.documents[i - 1].id) {
      throw DataError("duplicate document id: " + ds.documents[i].id);
    }
  }
  return ds;
}

std::set<std::string> gold_stem_keys(std::span<const std::string> gold) {
  std::set<std::string> out;
  for (const auto& g : gold) {
    auto key = phrase_stem_key(g);
    if (!key.empty()) out.insert(std::move(key));
  }
  return out;
}

std::set<std::string> filter_gold(const ProcessedDocument& doc,
                                  const std::set<std::string>& gold_keys) {
  std::unordered_set<std::string_view> keys;
  for (const auto& c : doc.candidates) keys.insert(c.key);
  std::set<std::string> out;
  for (const auto& g : gold_keys) {
    if (keys.contains(g)) out.insert(g);
  }
  return out;
}

std::vector<ProcessedDocument> process_dataset(const TextPipeline& pipeline, const Dataset& ds,
                                               unsigned jobs) {
  std::vector<ProcessedDocument> out(ds.documents.size());
  parallel_for(ds.documents.size(), jobs, [&](std::size_t i) {
    const auto& d = ds.documents[i];
    out[i] = d.tagged ? pipeline.process_tagged(d.id, *d.tagged, d.gold)
                      : pipeline.process(d.id, d.text, d.gold);
  });
  return out;
}

namespace {

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd r;
  for (double x : xs) r.mean += x;
  r.mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  r.std = std::sqrt(ss / static_cast<double>(xs.size()));
  return r;
}

}  // namespace

DatasetStats dataset_stats(const Dataset& ds, std::span<const ProcessedDocument> processed) {
  if (ds.documents.empty()) throw DataError("dataset statistics of an empty dataset");
  if (processed.size() != ds.documents.size()) {
    throw DataError("processed documents do not align with the dataset");
  }
  std::vector<double> tokens, unique, phrases, gold, multi;
  for (std::size_t i = 0; i < processed.size(); ++i) {
    const auto& doc = processed[i];
    if (doc.id != ds.documents[i].id) throw DataError("processed document order mismatch");
    std::unordered_set<std::string> vocab;
    for (const auto& t : doc.tokens) vocab.insert(to_lower(t.surface));
    tokens.push_back(static_cast<double>(doc.tokens.size()));
    unique.push_back(static_cast<double>(vocab.size()));
    phrases.push_back(static_cast<double>(doc.candidates.size()));
    gold.push_back(static_cast<double>(doc.filtered_gold.size()));
    multi.push_back(static_cast<double>(std::count_if(
        doc.filtered_gold.begin(), doc.filtered_gold.end(),
        [](const std::string& k) { return k.find(' ') != std::string::npos; })));
  }
  DatasetStats s;
  s.size = processed.size();
  s.tokens = mean_std(tokens);
  s.unique_tokens = mean_std(unique);
  s.noun_phrases = mean_std(phrases);
  s.gold = mean_std(gold);
  s.multiword_gold = mean_std(multi);
  s.diversity = s.tokens.mean > 0.0 ? s.unique_tokens.mean / s.tokens.mean : 0.0;
  return s;
}

}  // namespace kex
