/* Copyright 2026 The SSMT Desk Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "ssmt/textprep/bpe.h"

#include <set>
#include <sstream>

#include "ssmt/common/io.h"
#include "ssmt/common/status.h"

namespace ssmt {

namespace {

using Symbols = std::vector<std::string>;

Symbols InitialSymbols(const Token& token, const std::string& eow) {
  Symbols s = SplitCodePoints(token);
  s.push_back(eow);
  return s;
}

// Merges every non-overlapping occurrence of `pair`, scanning left to right.
bool MergeInPlace(Symbols& syms, const MergePair& pair) {
  bool changed = false;
  Symbols out;
  out.reserve(syms.size());
  for (size_t i = 0; i < syms.size();) {
    if (i + 1 < syms.size() && syms[i] == pair.first && syms[i + 1] == pair.second) {
      out.push_back(pair.first + pair.second);
      i += 2;
      changed = true;
    } else {
      out.push_back(syms[i]);
      ++i;
    }
  }
  if (changed) syms = std::move(out);
  return changed;
}

class PairTable {
 public:
  void Adjust(const MergePair& pair, std::int64_t delta) {
    auto it = counts_.find(pair);
    std::int64_t old = it == counts_.end() ? 0 : it->second;
    if (old > 0) ordered_.erase({-old, pair});
    std::int64_t now = old + delta;
    if (now > 0) {
      counts_[pair] = now;
      ordered_.insert({-now, pair});
    } else if (it != counts_.end()) {
      counts_.erase(it);
    }
  }

  bool Empty() const { return ordered_.empty(); }
  std::int64_t BestCount() const { return -ordered_.begin()->first; }
  const MergePair& BestPair() const { return ordered_.begin()->second; }

 private:
  std::map<MergePair, std::int64_t> counts_;
  // (-count, pair): begin() is the most frequent, smallest pair on ties.
  std::set<std::pair<std::int64_t, MergePair>> ordered_;
};

}  // namespace

BpeModel::BpeModel(std::vector<MergePair> merges, std::string eow_marker,
                   int num_merges_requested)
    : merges_(std::move(merges)), eow_(std::move(eow_marker)),
      requested_(num_merges_requested) {
  if (eow_.empty()) throw InvalidArgument("empty end-of-word marker");
  for (size_t i = 0; i < merges_.size(); ++i) {
    if (!rank_.emplace(merges_[i], static_cast<int>(i)).second)
      throw FormatError("duplicate merge '" + merges_[i].first + " " +
                        merges_[i].second + "'");
  }
}

int BpeModel::Rank(const MergePair& pair) const {
  auto it = rank_.find(pair);
  return it == rank_.end() ? -1 : it->second;
}

std::string BpeModel::Serialize() const {
  std::ostringstream out;
  out << "bpe v1 " << eow_ << "\n";
  for (const auto& [l, r] : merges_) out << l << '\t' << r << '\n';
  return out.str();
}

BpeModel BpeModel::Parse(const std::string& contents) {
  std::istringstream in(contents);
  std::string header;
  if (!std::getline(in, header) || header.rfind("bpe v1 ", 0) != 0)
    throw FormatError("missing 'bpe v1 <eow>' header");
  std::string eow = Trim(header.substr(7));
  std::vector<MergePair> merges;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos)
      throw FormatError("bad merge on line " + std::to_string(lineno));
    merges.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  int n = static_cast<int>(merges.size());
  return BpeModel(std::move(merges), eow, n);
}

void BpeModel::Save(const std::filesystem::path& path) const {
  WriteFile(path, Serialize());
}

BpeModel BpeModel::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path));
}

BpeModel LearnBpe(const WordCounts& corpus, int num_merges, const std::string& eow) {
  if (num_merges < 0) throw InvalidArgument("num_merges must be >= 0");
  if (corpus.empty()) throw InvalidArgument("empty BPE training corpus");

  std::vector<Symbols> words;
  std::vector<std::int64_t> freq;
  for (const auto& [word, count] : corpus) {
    if (word.empty() || count <= 0) continue;
    words.push_back(InitialSymbols(word, eow));
    freq.push_back(count);
  }
  if (words.empty()) throw InvalidArgument("empty BPE training corpus");

  PairTable table;
  std::map<MergePair, std::set<size_t>> where;
  auto account = [&](size_t w, int sign) {
    const Symbols& s = words[w];
    for (size_t i = 0; i + 1 < s.size(); ++i) {
      MergePair p{s[i], s[i + 1]};
      table.Adjust(p, sign * freq[w]);
      if (sign > 0) where[p].insert(w);
    }
  };
  for (size_t w = 0; w < words.size(); ++w) account(w, +1);

  std::vector<MergePair> merges;
  while (static_cast<int>(merges.size()) < num_merges && !table.Empty() &&
         table.BestCount() >= 2) {
    MergePair best = table.BestPair();
    std::set<size_t> touched = where[best];
    for (size_t w : touched) {
      Symbols merged = words[w];
      if (!MergeInPlace(merged, best)) continue;
      account(w, -1);
      words[w] = std::move(merged);
      account(w, +1);
    }
    where.erase(best);
    merges.push_back(std::move(best));
  }
  return BpeModel(std::move(merges), eow, num_merges);
}

std::vector<Subword> ApplyBpe(const BpeModel& model, const Token& token) {
  if (token.empty()) return {};
  Symbols syms = InitialSymbols(token, model.eow_marker());
  while (syms.size() > 1) {
    int best_rank = -1;
    size_t best_at = 0;
    for (size_t i = 0; i + 1 < syms.size(); ++i) {
      int r = model.Rank({syms[i], syms[i + 1]});
      if (r >= 0 && (best_rank < 0 || r < best_rank)) {
        best_rank = r;
        best_at = i;
      }
    }
    if (best_rank < 0) break;
    MergeInPlace(syms, {syms[best_at], syms[best_at + 1]});
  }
  if (syms.size() > 1 && syms.back() == model.eow_marker()) {
    syms[syms.size() - 2] += syms.back();
    syms.pop_back();
  }
  return syms;
}

Token JoinSubwords(const BpeModel& model, const std::vector<Subword>& subwords) {
  std::string joined;
  for (const auto& s : subwords) joined += s;
  const std::string& eow = model.eow_marker();
  if (joined.size() >= eow.size() &&
      joined.compare(joined.size() - eow.size(), eow.size(), eow) == 0)
    joined.erase(joined.size() - eow.size());
  return joined;
}

WordCounts CountWords(const std::vector<std::string>& lines) {
  WordCounts counts;
  for (const auto& line : lines)
    for (auto& tok : SplitWhitespace(line)) ++counts[tok];
  return counts;
}

}  // namespace ssmt
