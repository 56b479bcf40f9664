// Copyright 2026  The subfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "subfuse/lm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>

#include "subfuse/error.hpp"
#include "subfuse/utf8.hpp"

namespace subfuse {

NGramModel::NGramModel(int order, double backoff_alpha)
    : order_(order), alpha_(backoff_alpha) {
  if (order < 1) fail_validation("language model order must be >= 1");
  if (!(backoff_alpha > 0.0 && backoff_alpha <= 1.0)) {
    fail_validation("backoff alpha must be in (0, 1]");
  }
  tables_.resize(static_cast<size_t>(order));
}

size_t NGramModel::count(int k) const {
  if (k < 1 || k > order_) return 0;
  return tables_[static_cast<size_t>(k - 1)].size();
}

const double* NGramModel::find(std::u32string_view ngram) const {
  if (ngram.empty() || ngram.size() > tables_.size()) return nullptr;
  const auto& table = tables_[ngram.size() - 1];
  auto it = table.find(std::u32string(ngram));
  return it == table.end() ? nullptr : &it->second;
}

void NGramModel::set(std::u32string_view ngram, double log10_prob) {
  if (ngram.empty() || ngram.size() > tables_.size()) {
    fail_validation("n-gram length outside model order");
  }
  if (!std::isfinite(log10_prob) || log10_prob > 0.0) {
    fail_validation("n-gram log10 probability must be finite and <= 0");
  }
  tables_[ngram.size() - 1][std::u32string(ngram)] = log10_prob;
}

double NGramModel::log10_prob(std::u32string_view context, char32_t token) const {
  const size_t max_ctx = std::min(context.size(), static_cast<size_t>(order_ - 1));
  const double log_alpha = std::log10(alpha_);
  double penalty = 0.0;
  std::u32string key;
  for (size_t k = max_ctx + 1; k-- > 0;) {
    key.assign(context.substr(context.size() - k));
    key.push_back(token);
    const auto& table = tables_[k];
    auto it = table.find(key);
    if (it != table.end()) return penalty + it->second;
    if (k > 0) penalty += log_alpha;
  }
  return penalty + std::log10(alpha_ / static_cast<double>(vocab_size() + 1));
}

std::vector<std::pair<std::u32string, double>> NGramModel::sorted_entries(int k) const {
  std::vector<std::pair<std::u32string, double>> out;
  if (k < 1 || k > order_) return out;
  const auto& table = tables_[static_cast<size_t>(k - 1)];
  out.assign(table.begin(), table.end());
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

NGramModel train_lm(std::span<const std::string> lines, int order, double backoff_alpha) {
  NGramModel model(order, backoff_alpha);
  // counts[k] holds n-grams of length k+1.
  std::vector<std::map<std::u32string, size_t>> counts(static_cast<size_t>(order));
  size_t total_tokens = 0;
  for (const std::string& line : lines) {
    const std::u32string tokens = remove_spaces(utf8_decode(line));
    total_tokens += tokens.size();
    for (size_t i = 0; i < tokens.size(); ++i) {
      for (size_t len = 1; len <= static_cast<size_t>(order) && i + len <= tokens.size(); ++len) {
        ++counts[len - 1][tokens.substr(i, len)];
      }
    }
  }
  if (total_tokens == 0) fail_validation("language model corpus has no tokens");

  for (const auto& [gram, c] : counts[0]) {
    model.set(gram, std::log10(static_cast<double>(c) / static_cast<double>(total_tokens)));
  }
  for (size_t k = 1; k < counts.size(); ++k) {
    // Conditional ML estimate: c(h w) / sum_w' c(h w').
    std::map<std::u32string, size_t> context_totals;
    for (const auto& [gram, c] : counts[k]) {
      context_totals[gram.substr(0, gram.size() - 1)] += c;
    }
    for (const auto& [gram, c] : counts[k]) {
      const size_t denom = context_totals.at(gram.substr(0, gram.size() - 1));
      model.set(gram, std::log10(static_cast<double>(c) / static_cast<double>(denom)));
    }
  }
  return model;
}

NGramModel train_lm_text(std::string_view corpus, int order, double backoff_alpha) {
  std::vector<std::string> lines;
  size_t pos = 0;
  while (pos <= corpus.size()) {
    size_t end = corpus.find('\n', pos);
    if (end == std::string_view::npos) end = corpus.size();
    lines.emplace_back(corpus.substr(pos, end - pos));
    pos = end + 1;
  }
  return train_lm(lines, order, backoff_alpha);
}

double score_text(const NGramModel& model, std::string_view text) {
  const std::u32string tokens = remove_spaces(utf8_decode(text));
  if (tokens.empty()) fail_validation("cannot score empty text");
  double sum = 0.0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    sum += model.log10_prob(std::u32string_view(tokens).substr(0, i), tokens[i]);
  }
  return sum / static_cast<double>(tokens.size());
}

void DualLmConfig::validate() const {
  if (!(lambda_domain >= 0.0 && lambda_domain <= 1.0)) {
    fail_validation("lambda_domain must be in [0, 1]");
  }
}

DualLm::DualLm(const NGramModel* universal, const NGramModel* domain, DualLmConfig config)
    : universal_(universal), domain_(domain), config_(config) {
  config_.validate();
  if (universal_ != nullptr && universal_->empty()) fail_validation("universal LM is empty");
  if (domain_ != nullptr && domain_->empty()) fail_validation("domain LM is empty");
}

double DualLm::log10_prob(std::u32string_view context, char32_t token) const {
  if (universal_ == nullptr && domain_ == nullptr) return 0.0;
  if (domain_ == nullptr) return universal_->log10_prob(context, token);
  if (universal_ == nullptr) return domain_->log10_prob(context, token);
  const double lam = config_.lambda_domain;
  const double lu = universal_->log10_prob(context, token);
  const double ld = domain_->log10_prob(context, token);
  if (config_.mix == LmMix::kLogLinear) return (1.0 - lam) * lu + lam * ld;
  // Endpoints exact so lambda in {0, 1} reproduces the single model.
  if (lam == 0.0) return lu;
  if (lam == 1.0) return ld;
  return std::log10((1.0 - lam) * std::pow(10.0, lu) + lam * std::pow(10.0, ld));
}

double DualLm::score(std::u32string_view text) const {
  const std::u32string tokens = remove_spaces(text);
  if (tokens.empty()) fail_validation("cannot score empty text");
  double sum = 0.0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    sum += log10_prob(std::u32string_view(tokens).substr(0, i), tokens[i]);
  }
  return sum / static_cast<double>(tokens.size());
}

double dual_score(const NGramModel& universal, const NGramModel& domain,
                  const DualLmConfig& config, std::string_view text) {
  return DualLm(&universal, &domain, config).score(utf8_decode(text));
}

namespace {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string tokens_field(std::u32string_view gram) {
  std::string out;
  for (size_t i = 0; i < gram.size(); ++i) {
    if (i > 0) out += ' ';
    utf8_append(out, gram[i]);
  }
  return out;
}

constexpr std::string_view kAlphaTag = "# stupid-backoff alpha=";

}  // namespace

std::string write_arpa(const NGramModel& model) {
  if (model.empty()) fail_validation("refusing to write an empty language model");
  const std::string log_alpha = format_double(std::log10(model.backoff_alpha()));
  std::string out;
  out += kAlphaTag;
  out += format_double(model.backoff_alpha());
  out += "\n\n\\data\\\n";
  for (int k = 1; k <= model.order(); ++k) {
    out += "ngram " + std::to_string(k) + "=" + std::to_string(model.count(k)) + "\n";
  }
  for (int k = 1; k <= model.order(); ++k) {
    out += "\n\\" + std::to_string(k) + "-grams:\n";
    for (const auto& [gram, lp] : model.sorted_entries(k)) {
      out += format_double(lp);
      out += '\t';
      out += tokens_field(gram);
      if (k < model.order()) {
        out += '\t';
        out += log_alpha;
      }
      out += '\n';
    }
  }
  out += "\n\\end\\\n";
  return out;
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Next line with trailing CR removed; false at end of input.
  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    ++line_no_;
    return true;
  }

  size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  size_t pos_ = 0;
  size_t line_no_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void arpa_error(size_t line_no, const std::string& what) {
  fail_parse("ARPA line " + std::to_string(line_no) + ": " + what);
}

double parse_double(std::string_view s, size_t line_no) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    arpa_error(line_no, "bad number \"" + std::string(s) + "\"");
  }
  return x;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  size_t pos = 0;
  while (true) {
    const size_t tab = line.find('\t', pos);
    out.push_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return out;
}

}  // namespace

NGramModel read_arpa(std::string_view text) {
  LineReader reader(text);
  std::string_view line;
  double alpha = NGramModel::kDefaultAlpha;
  bool alpha_from_header = false;

  // Preamble up to \data\.
  bool found_data = false;
  while (reader.next(line)) {
    const std::string_view t = trim(line);
    if (t.substr(0, kAlphaTag.size()) == kAlphaTag) {
      alpha = parse_double(t.substr(kAlphaTag.size()), reader.line_no());
      alpha_from_header = true;
    }
    if (t == "\\data\\") {
      found_data = true;
      break;
    }
  }
  if (!found_data) arpa_error(reader.line_no(), "missing \\data\\ header");

  std::vector<size_t> declared;
  while (reader.next(line)) {
    const std::string_view t = trim(line);
    if (t.empty()) {
      if (!declared.empty()) break;
      continue;
    }
    if (t.substr(0, 6) != "ngram ") arpa_error(reader.line_no(), "expected \"ngram k=count\"");
    const size_t eq = t.find('=');
    if (eq == std::string_view::npos) arpa_error(reader.line_no(), "expected \"ngram k=count\"");
    const auto k = static_cast<size_t>(parse_double(trim(t.substr(6, eq - 6)), reader.line_no()));
    const auto c = static_cast<size_t>(parse_double(trim(t.substr(eq + 1)), reader.line_no()));
    if (k != declared.size() + 1) arpa_error(reader.line_no(), "ngram orders must be 1..N in sequence");
    declared.push_back(c);
  }
  if (declared.empty()) arpa_error(reader.line_no(), "no ngram counts declared");
  if (declared[0] == 0) arpa_error(reader.line_no(), "model has an empty vocabulary");

  // Backoff weights only carry alpha when the header comment is absent.
  std::vector<std::vector<std::pair<std::u32string, double>>> sections(declared.size());
  std::optional<double> backoff_seen;
  size_t k = 0;
  bool ended = false;
  while (reader.next(line)) {
    const std::string_view t = trim(line);
    if (t.empty()) continue;
    if (t == "\\end\\") {
      if (k != declared.size()) arpa_error(reader.line_no(), "\\end\\ before all sections");
      ended = true;
      break;
    }
    if (t.front() == '\\') {
      const std::string expected = "\\" + std::to_string(k + 1) + "-grams:";
      if (k >= declared.size() || t != expected) {
        arpa_error(reader.line_no(), "unexpected section header \"" + std::string(t) + "\"");
      }
      if (k > 0 && sections[k - 1].size() != declared[k - 1]) {
        arpa_error(reader.line_no(), "section " + std::to_string(k) + " has " +
                                         std::to_string(sections[k - 1].size()) +
                                         " entries, declared " + std::to_string(declared[k - 1]));
      }
      ++k;
      continue;
    }
    if (k == 0) arpa_error(reader.line_no(), "n-gram entry outside a section");
    const auto fields = split_tabs(t);
    if (fields.size() < 2 || fields.size() > 3) {
      arpa_error(reader.line_no(), "expected log10prob<TAB>tokens[<TAB>backoff]");
    }
    const double lp = parse_double(trim(fields[0]), reader.line_no());
    std::u32string gram;
    std::string_view toks = trim(fields[1]);
    size_t pos = 0;
    while (pos < toks.size()) {
      size_t sp = toks.find(' ', pos);
      if (sp == std::string_view::npos) sp = toks.size();
      std::u32string tok;
      try {
        tok = utf8_decode(toks.substr(pos, sp - pos));
      } catch (const Error&) {
        arpa_error(reader.line_no(), "token is not valid UTF-8");
      }
      if (tok.size() != 1) arpa_error(reader.line_no(), "tokens must be single characters");
      gram += tok;
      pos = sp + 1;
      while (pos < toks.size() && toks[pos] == ' ') ++pos;
    }
    if (gram.size() != k) arpa_error(reader.line_no(), "n-gram length does not match section");
    if (!std::isfinite(lp) || lp > 0.0) arpa_error(reader.line_no(), "log10 probability must be finite and <= 0");
    if (fields.size() == 3 && !backoff_seen) {
      backoff_seen = parse_double(trim(fields[2]), reader.line_no());
    }
    sections[k - 1].emplace_back(std::move(gram), lp);
  }
  if (!ended) arpa_error(reader.line_no(), "missing \\end\\ marker");
  if (sections.back().size() != declared.back()) {
    arpa_error(reader.line_no(), "last section entry count does not match header");
  }

  if (!alpha_from_header && backoff_seen) alpha = std::pow(10.0, *backoff_seen);
  NGramModel model(static_cast<int>(declared.size()), alpha);
  for (const auto& section : sections) {
    for (const auto& [gram, lp] : section) model.set(gram, lp);
  }
  return model;
}

}  // namespace subfuse
