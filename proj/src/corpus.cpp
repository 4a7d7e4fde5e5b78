#include "hmmtag/corpus.hpp"

#include <algorithm>
#include <cmath>

#include "hmmtag/model.hpp"
#include "hmmtag/rng.hpp"

namespace hmmtag {

namespace {

bool is_escapable(char c) { return c == '\\' || c == '/' || c == '#'; }

std::string escape_word(const std::string& word) {
    std::string out;
    out.reserve(word.size());
    for (char c : word) {
        if (is_escapable(c)) out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

// A backslash escapes only \ / #; anything else keeps the backslash.
std::string unescape_word(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == '\\' && i + 1 < raw.size() && is_escapable(raw[i + 1])) {
            out.push_back(raw[i + 1]);
            ++i;
        } else {
            out.push_back(raw[i]);
        }
    }
    return out;
}

// Index of the last unescaped slash, or npos.
std::size_t separator_pos(std::string_view token) {
    std::size_t sep = std::string_view::npos;
    for (std::size_t i = 0; i < token.size(); ++i) {
        if (token[i] == '\\' && i + 1 < token.size() && is_escapable(token[i + 1])) {
            ++i;
        } else if (token[i] == '/') {
            sep = i;
        }
    }
    return sep;
}

void validate_tag(std::string_view tag, int line_no, int token_no) {
    if (tag.empty()) throw ParseError(line_no, token_no, "empty tag");
    for (char c : tag) {
        if (c == '/' || c == '\\')
            throw ParseError(line_no, token_no, "tag contains '/' or '\\'");
    }
}

std::vector<std::string_view> split_fields(std::string_view line, int line_no) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t sp = line.find(' ', start);
        std::string_view field = (sp == std::string_view::npos)
                                     ? line.substr(start)
                                     : line.substr(start, sp - start);
        if (field.empty())
            throw ParseError(line_no, static_cast<int>(fields.size()) + 1, "empty token");
        fields.push_back(field);
        if (sp == std::string_view::npos) break;
        start = sp + 1;
    }
    return fields;
}

// Calls fn(line_view, line_no) for every non-comment, non-empty line.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = (nl == std::string_view::npos)
                                    ? text.substr(pos)
                                    : text.substr(pos, nl - pos);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty() && line.front() != '#') fn(line, line_no);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
}

}  // namespace

ParseError::ParseError(int line, int token, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", token " +
                         std::to_string(token) + ": " + what),
      line_(line),
      token_(token) {}

std::set<std::string> TaggedCorpus::tagset() const {
    std::set<std::string> tags;
    for (const auto& sentence : sentences)
        for (const auto& token : sentence) tags.insert(token.tag);
    return tags;
}

std::int64_t TaggedCorpus::token_count() const {
    std::int64_t n = 0;
    for (const auto& sentence : sentences) n += static_cast<std::int64_t>(sentence.size());
    return n;
}

std::int64_t RawCorpus::token_count() const {
    std::int64_t n = 0;
    for (const auto& sentence : sentences) n += static_cast<std::int64_t>(sentence.size());
    return n;
}

TaggedCorpus parse_tagged(std::string_view text) {
    TaggedCorpus corpus;
    for_each_line(text, [&](std::string_view line, int line_no) {
        TaggedSentence sentence;
        auto fields = split_fields(line, line_no);
        for (std::size_t t = 0; t < fields.size(); ++t) {
            int token_no = static_cast<int>(t) + 1;
            std::string_view field = fields[t];
            std::size_t sep = separator_pos(field);
            if (sep == std::string_view::npos)
                throw ParseError(line_no, token_no, "missing /TAG separator");
            if (sep == 0) throw ParseError(line_no, token_no, "empty word");
            std::string_view tag = field.substr(sep + 1);
            validate_tag(tag, line_no, token_no);
            sentence.push_back({unescape_word(field.substr(0, sep)), std::string(tag)});
        }
        corpus.sentences.push_back(std::move(sentence));
    });
    return corpus;
}

std::string emit_tagged(const TaggedCorpus& corpus) {
    std::string out;
    for (const auto& sentence : corpus.sentences) {
        for (std::size_t t = 0; t < sentence.size(); ++t) {
            if (t) out.push_back(' ');
            out += escape_word(sentence[t].word);
            out.push_back('/');
            out += sentence[t].tag;
        }
        out.push_back('\n');
    }
    return out;
}

RawCorpus parse_raw(std::string_view text) {
    RawCorpus corpus;
    for_each_line(text, [&](std::string_view line, int line_no) {
        RawSentence sentence;
        for (std::string_view field : split_fields(line, line_no))
            sentence.push_back(unescape_word(field));
        corpus.sentences.push_back(std::move(sentence));
    });
    return corpus;
}

std::string emit_raw(const RawCorpus& corpus) {
    std::string out;
    for (const auto& sentence : corpus.sentences) {
        for (std::size_t t = 0; t < sentence.size(); ++t) {
            if (t) out.push_back(' ');
            out += escape_word(sentence[t]);
        }
        out.push_back('\n');
    }
    return out;
}

RawCorpus strip_tags(const TaggedCorpus& corpus) {
    RawCorpus raw;
    raw.sentences.reserve(corpus.sentences.size());
    for (const auto& sentence : corpus.sentences) {
        RawSentence words;
        words.reserve(sentence.size());
        for (const auto& token : sentence) words.push_back(token.word);
        raw.sentences.push_back(std::move(words));
    }
    return raw;
}

TaggedCorpus generate_synthetic(const HmmModel& truth, int n_sentences,
                                int mean_length, std::uint64_t seed) {
    if (n_sentences < 0) throw ModelError("generate: sentence count must be >= 0");
    if (mean_length < 1) throw ModelError("generate: mean length must be >= 1");

    const int k = truth.num_tags();
    const int boundary = truth.boundary_id();

    // Per-tag emission tables, words in lexicographic order.
    std::vector<std::vector<double>> emit_cum(k);
    std::vector<std::vector<const std::string*>> emit_word(k);
    for (const auto& [word, entry] : truth.lexicon()) {
        for (const auto& [tag, score] : entry.scores) {
            if (score <= 0.0) continue;
            double prev = emit_cum[tag].empty() ? 0.0 : emit_cum[tag].back();
            emit_cum[tag].push_back(prev + score);
            emit_word[tag].push_back(&word);
        }
    }

    // Mid-sentence transition tables over real tags only.
    std::vector<std::vector<double>> trans_cum(k);
    std::vector<std::vector<int>> trans_tag(k);
    for (int i = 0; i < k; ++i) {
        double running = 0.0;
        for (int j = 0; j < k; ++j) {
            if (j == boundary) continue;
            running += truth.transition(i, j);
            trans_cum[i].push_back(running);
            trans_tag[i].push_back(j);
        }
        if (running <= 0.0) throw ModelError("generate: no real-tag successors");
    }
    for (int j = 0; j < k; ++j) {
        if (j != boundary && emit_cum[j].empty())
            throw ModelError("generate: tag '" + truth.tag_name(j) + "' has no emissions");
    }

    SampleRng rng(seed);
    TaggedCorpus corpus;
    corpus.sentences.reserve(static_cast<std::size_t>(n_sentences));
    for (int s = 0; s < n_sentences; ++s) {
        int length = rng.geometric_length(mean_length);
        TaggedSentence sentence;
        sentence.reserve(static_cast<std::size_t>(length));
        int prev = boundary;
        for (int t = 0; t < length; ++t) {
            int tag = trans_tag[prev][rng.categorical(trans_cum[prev])];
            const std::string& word = *emit_word[tag][rng.categorical(emit_cum[tag])];
            sentence.push_back({word, truth.tag_name(tag)});
            prev = tag;
        }
        corpus.sentences.push_back(std::move(sentence));
    }
    return corpus;
}

}  // namespace hmmtag
