#include "synfix/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace synfix {

NGramModel::NGramModel(std::size_t order) : order_(order) {
  if (order_ < 2) throw NGramError("n-gram order must be at least 2");
  intern(kBos);
  intern(kEos);
}

NGramModel::Id NGramModel::intern(std::string_view label) {
  auto [it, fresh] = index_.emplace(std::string(label), static_cast<Id>(vocab_.size()));
  if (fresh) vocab_.emplace_back(label);
  return it->second;
}

NGramModel::Id NGramModel::id(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) throw NGramError("token not in n-gram vocabulary: " + std::string(label));
  return it->second;
}

void NGramModel::add_window(std::vector<Id> window, std::uint64_t n) {
  std::vector<Id> ctx(window.begin(), window.end() - 1);
  counts_[std::move(window)] += n;
  totals_[std::move(ctx)] += n;
}

NGramModel NGramModel::train(const std::vector<std::vector<std::string>>& corpus,
                             std::size_t order) {
  if (corpus.empty()) throw NGramError("training corpus is empty");
  NGramModel m(order);
  for (const auto& seq : corpus) {
    std::vector<Id> padded(order - 1, m.bos());
    for (const auto& tok : seq) {
      if (tok == kBos || tok == kEos) throw NGramError("corpus contains a reserved sentinel");
      padded.push_back(m.intern(tok));
    }
    padded.push_back(m.eos());
    for (std::size_t i = 0; i + order <= padded.size(); ++i)
      m.add_window({padded.begin() + i, padded.begin() + i + order}, 1);
  }
  return m;
}

void NGramModel::extend_vocabulary(std::span<const std::string> labels) {
  for (const auto& l : labels) intern(l);
}

std::vector<NGramModel::Id> NGramModel::bind(const Alphabet& alphabet) {
  std::vector<Id> out;
  for (const auto& l : alphabet.labels()) {
    if (l == kBos || l == kEos) throw NGramError("grammar uses a reserved sentinel: " + l);
    out.push_back(intern(l));
  }
  return out;
}

std::uint64_t NGramModel::count(std::span<const Id> window) const {
  auto it = counts_.find(std::vector<Id>(window.begin(), window.end()));
  return it == counts_.end() ? 0 : it->second;
}

std::uint64_t NGramModel::total(std::span<const Id> context) const {
  auto it = totals_.find(std::vector<Id>(context.begin(), context.end()));
  return it == totals_.end() ? 0 : it->second;
}

double NGramModel::logprob(std::span<const Id> ctx, Id s) const {
  thread_local std::vector<Id> key;
  key.assign(ctx.begin(), ctx.end());
  const auto t = totals_.find(key);
  const std::uint64_t tot = t == totals_.end() ? 0 : t->second;
  std::uint64_t c = 0;
  if (tot) {
    key.push_back(s);
    const auto it = counts_.find(key);
    if (it != counts_.end()) c = it->second;
  }
  return std::log(static_cast<double>(c + 1)) -
         std::log(static_cast<double>(tot + vocab_.size()));
}

double NGramModel::score(std::span<const Id> sigma) const {
  std::vector<Id> padded(order_ - 1, bos());
  padded.insert(padded.end(), sigma.begin(), sigma.end());
  padded.push_back(eos());
  double sum = 0;
  for (std::size_t i = order_ - 1; i < padded.size(); ++i)
    sum += logprob(std::span<const Id>(padded).subspan(i - (order_ - 1), order_ - 1), padded[i]);
  return sum;
}

double NGramModel::score(const std::vector<std::string>& sigma) const {
  std::vector<Id> ids;
  for (const auto& t : sigma) ids.push_back(id(t));
  return score(ids);
}

std::string NGramModel::serialize() const {
  std::vector<std::pair<std::vector<std::string>, std::uint64_t>> rows;
  for (const auto& [k, n] : counts_) {
    std::vector<std::string> labels;
    for (auto x : k) labels.push_back(vocab_[x]);
    rows.emplace_back(std::move(labels), n);
  }
  std::sort(rows.begin(), rows.end());
  std::ostringstream os;
  os << "ngram " << order_ << ' ' << vocab_.size() << '\n';
  for (std::size_t i = 0; i < vocab_.size(); ++i) os << (i ? " " : "") << vocab_[i];
  os << '\n';
  for (const auto& [labels, n] : rows) {
    for (std::size_t i = 0; i < labels.size(); ++i) os << (i ? " " : "") << labels[i];
    os << '\t' << n << '\n';
  }
  return os.str();
}

NGramModel NGramModel::deserialize(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw NGramError("model file is empty");
  std::istringstream header(line);
  std::string magic;
  std::size_t order = 0, size = 0;
  if (!(header >> magic >> order >> size) || magic != "ngram")
    throw NGramError("bad model header: " + line);
  NGramModel m(order);
  if (!std::getline(in, line)) throw NGramError("model file lacks a vocabulary line");
  std::istringstream vocab(line);
  std::vector<std::string> labels;
  for (std::string tok; vocab >> tok;) labels.push_back(tok);
  if (labels.size() != size || labels.size() < 2 || labels[0] != kBos || labels[1] != kEos)
    throw NGramError("vocabulary line does not match the header");
  m.extend_vocabulary(labels);
  if (m.vocab_size() != size) throw NGramError("vocabulary has duplicate tokens");
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw NGramError("line " + std::to_string(lineno) + ": no TAB");
    std::istringstream win(line.substr(0, tab));
    std::vector<Id> window;
    for (std::string tok; win >> tok;) window.push_back(m.id(tok));
    if (window.size() != order) throw NGramError("line " + std::to_string(lineno) + ": bad window");
    std::uint64_t n = 0;
    try {
      n = std::stoull(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw NGramError("line " + std::to_string(lineno) + ": bad count");
    }
    m.add_window(std::move(window), n);
  }
  return m;
}

}  // namespace synfix
