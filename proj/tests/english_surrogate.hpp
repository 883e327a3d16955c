#pragma once

// Deterministic stand-in for a long English novel in Project Gutenberg
// plain-text form: Zipf-distributed vocabulary, sentences and paragraphs,
// CRLF lines wrapped at 70 columns. Vocabulary size and Zipf exponent are
// set so that bzip2 -9 compresses the default output about 3.6:1.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mrpods::surrogate {

struct Options {
  std::size_t target_bytes = 3'227'000;
  int vocabulary = 30000;
  double zipf_exponent = 1.0;
  std::uint64_t seed = 2600;
};

// Frequent words are short, rare words long.
inline std::string make_word(std::mt19937_64& rng, int rank) {
  static const std::string onsets[] = {"", "b", "c", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t",
                                       "v", "w", "y", "z", "br", "ch", "cl", "dr", "gr", "pr", "sh", "st", "th", "tr"};
  static const std::string vowels[] = {"a", "e", "i", "o", "u", "ea", "ou", "ai", "ie", "o", "e", "a"};
  static const std::string codas[] = {"", "", "n", "r", "s", "t", "l", "d", "ng", "st", "rd", "nt", "m", "ck"};
  std::string w;
  const int n = 1 + static_cast<int>(std::log10(rank + 1.0) * 0.7 + std::uniform_real_distribution<double>(0, 1)(rng));
  for (int i = 0; i < n; ++i) {
    w += onsets[rng() % std::size(onsets)];
    w += vowels[rng() % std::size(vowels)];
    w += codas[rng() % std::size(codas)];
  }
  return w;
}

inline std::string generate(const Options& o = {}) {
  std::mt19937_64 rng(o.seed);
  std::vector<std::string> vocab;
  vocab.reserve(o.vocabulary);
  for (int i = 0; i < o.vocabulary; ++i) vocab.push_back(make_word(rng, i));

  std::vector<double> weights(o.vocabulary);
  for (int i = 0; i < o.vocabulary; ++i) weights[i] = 1.0 / std::pow(i + 1.0, o.zipf_exponent);
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::uniform_int_distribution<int> sentence_len(3, 28);
  std::uniform_int_distribution<int> paragraph_len(1, 9);
  std::uniform_real_distribution<double> unit(0, 1);

  std::string text = "The Project Gutenberg eBook\r\n\r\n";
  std::string line;
  auto emit = [&](const std::string& word) {
    if (!line.empty() && line.size() + 1 + word.size() > 70) {
      text += line + "\r\n";
      line.clear();
    }
    if (!line.empty()) line += ' ';
    line += word;
  };
  while (text.size() < o.target_bytes) {
    const bool dialogue = unit(rng) < 0.2;
    for (int s = paragraph_len(rng); s > 0; --s) {
      const int n = sentence_len(rng);
      for (int i = 0; i < n; ++i) {
        std::string w = vocab[pick(rng)];
        if (i == 0) {
          w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
          if (dialogue) w = "\"" + w;
        }
        if (i + 1 == n) {
          const double r = unit(rng);
          w += r < 0.85 ? "." : (r < 0.93 ? "?" : "!");
          if (dialogue) w += "\"";
        } else if (unit(rng) < 0.09) {
          w += unit(rng) < 0.85 ? "," : ";";
        }
        emit(w);
      }
    }
    if (!line.empty()) text += line + "\r\n";
    line.clear();
    text += "\r\n";
  }
  text.resize(o.target_bytes);
  return text;
}

}  // namespace mrpods::surrogate
