#include "kex/priors_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include <json.hpp>

namespace kex {

namespace {

constexpr char kMagic[4] = {'K', 'E', 'X', 'P'};
constexpr std::uint16_t kHasStats = 1;
constexpr std::uint16_t kHasTopics = 2;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  template <class T>
  void uint(T v) {
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out_.write(reinterpret_cast<const char*>(buf), sizeof(T));
  }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    uint(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  template <class T>
  T uint() {
    unsigned char buf[sizeof(T)];
    read(reinterpret_cast<char*>(buf), sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }
  std::string str() {
    const auto n = uint<std::uint32_t>();
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
  }
  void read(char* p, std::size_t n) {
    if (!in_.read(p, static_cast<std::streamsize>(n))) throw DataError("truncated priors file");
  }

 private:
  std::istream& in_;
};

template <class Map>
std::vector<typename Map::const_iterator> sorted_entries(const Map& m) {
  std::vector<typename Map::const_iterator> out;
  for (auto it = m.begin(); it != m.end(); ++it) out.push_back(it);
  std::sort(out.begin(), out.end(), [](auto a, auto b) { return a->first < b->first; });
  return out;
}

}  // namespace

void write_priors(std::ostream& out, const CorpusPriors& priors) {
  Writer w(out);
  w.bytes(kMagic, 4);
  w.uint(kPriorsVersion);
  std::uint16_t flags = 0;
  if (priors.stats) flags |= kHasStats;
  if (priors.topics) flags |= kHasTopics;
  w.uint(flags);

  if (priors.stats) {
    const auto& s = *priors.stats;
    w.uint(s.doc_count);
    w.uint(s.total_tokens);
    w.uint(static_cast<std::uint64_t>(s.df.size()));
    for (auto it : sorted_entries(s.df)) {
      w.str(it->first);
      w.uint(it->second);
      w.uint(s.corpus_frequency(it->first));
    }
  }
  if (priors.topics) {
    const auto& t = *priors.topics;
    const int K = t.num_topics();
    w.uint(static_cast<std::uint32_t>(K));
    w.f64(t.params.resolved_alpha());
    w.f64(t.params.beta);
    w.uint(static_cast<std::uint32_t>(t.params.iterations));
    w.uint(t.params.seed);
    w.uint(static_cast<std::uint64_t>(t.vocabulary.size()));
    for (const auto& [stem, row] : t.vocabulary) {
      w.str(stem);
      for (int k = 0; k < K; ++k) w.f64(t.word_topic(row, k));
    }
    w.uint(static_cast<std::uint64_t>(t.doc_topic.size()));
    for (const auto& [id, theta] : t.doc_topic) {
      w.str(id);
      for (int k = 0; k < K; ++k) w.f64(theta(k));
    }
  }
  if (!out) throw DataError("failed writing priors");
}

CorpusPriors read_priors(std::istream& in) {
  Reader r(in);
  char magic[4];
  r.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw DataError("not a priors file (bad magic)");
  const auto version = r.uint<std::uint16_t>();
  if (version != kPriorsVersion) {
    throw DataError("unsupported priors version " + std::to_string(version));
  }
  const auto flags = r.uint<std::uint16_t>();

  CorpusPriors priors;
  if (flags & kHasStats) {
    TermStats s;
    s.doc_count = r.uint<std::uint64_t>();
    s.total_tokens = r.uint<std::uint64_t>();
    const auto n = r.uint<std::uint64_t>();
    for (std::uint64_t i = 0; i < n; ++i) {
      auto stem = r.str();
      s.df[stem] = r.uint<std::uint64_t>();
      s.corpus_tf[stem] = r.uint<std::uint64_t>();
    }
    priors.stats = std::move(s);
  }
  if (flags & kHasTopics) {
    TopicModel t;
    const auto K = static_cast<int>(r.uint<std::uint32_t>());
    if (K < 1) throw DataError("priors file has an empty topic model");
    t.params.num_topics = K;
    t.params.alpha = r.f64();
    t.params.beta = r.f64();
    t.params.iterations = static_cast<int>(r.uint<std::uint32_t>());
    t.params.seed = r.uint<std::uint64_t>();
    const auto V = r.uint<std::uint64_t>();
    t.word_topic.resize(static_cast<Eigen::Index>(V), K);
    for (std::uint64_t v = 0; v < V; ++v) {
      const auto row = static_cast<Eigen::Index>(v);
      t.vocabulary.emplace(r.str(), row);
      for (int k = 0; k < K; ++k) t.word_topic(row, k) = r.f64();
    }
    const auto D = r.uint<std::uint64_t>();
    for (std::uint64_t d = 0; d < D; ++d) {
      auto id = r.str();
      Eigen::VectorXd theta(K);
      for (int k = 0; k < K; ++k) theta(k) = r.f64();
      t.doc_topic.emplace(std::move(id), std::move(theta));
    }
    priors.topics = std::move(t);
  }
  return priors;
}

void save_priors(const std::filesystem::path& path, const CorpusPriors& priors) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  write_priors(out, priors);
}

CorpusPriors load_priors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read priors file " + path.string());
  return read_priors(in);
}

std::string priors_to_json(const CorpusPriors& priors, int indent) {
  nlohmann::ordered_json j;
  j["format"] = "KEXP";
  j["version"] = kPriorsVersion;
  if (priors.stats) {
    const auto& s = *priors.stats;
    auto& js = j["term_stats"];
    js["doc_count"] = s.doc_count;
    js["total_tokens"] = s.total_tokens;
    auto& terms = js["terms"];
    terms = nlohmann::ordered_json::object();
    for (auto it : sorted_entries(s.df)) {
      terms[it->first] = {{"df", it->second}, {"tf", s.corpus_frequency(it->first)}};
    }
  }
  if (priors.topics) {
    const auto& t = *priors.topics;
    auto& jt = j["topic_model"];
    jt["num_topics"] = t.num_topics();
    jt["alpha"] = t.params.resolved_alpha();
    jt["beta"] = t.params.beta;
    jt["iterations"] = t.params.iterations;
    jt["seed"] = t.params.seed;
    auto& words = jt["word_topic"];
    words = nlohmann::ordered_json::object();
    for (const auto& [stem, row] : t.vocabulary) {
      std::vector<double> v(t.word_topic.row(row).begin(), t.word_topic.row(row).end());
      words[stem] = v;
    }
    auto& docs = jt["doc_topic"];
    docs = nlohmann::ordered_json::object();
    for (const auto& [id, theta] : t.doc_topic) {
      docs[id] = std::vector<double>(theta.begin(), theta.end());
    }
  }
  return j.dump(indent);
}

}  // namespace kex
