#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hmmtag {

class HmmModel;

struct TaggedToken {
    std::string word;
    std::string tag;
    bool operator==(const TaggedToken&) const = default;
};

using TaggedSentence = std::vector<TaggedToken>;
using RawSentence = std::vector<std::string>;

/// Sentence-segmented corpus with a gold tag on every token.
struct TaggedCorpus {
    std::vector<TaggedSentence> sentences;

    std::set<std::string> tagset() const;
    std::int64_t token_count() const;
    bool operator==(const TaggedCorpus&) const = default;
};

/// Sentence-segmented corpus of bare words.
struct RawCorpus {
    std::vector<RawSentence> sentences;

    std::int64_t token_count() const;
    bool operator==(const RawCorpus&) const = default;
};

/// Malformed corpus text. line and token are 1-based; token is 0 for
/// line-level problems.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, int token, const std::string& what);
    int line() const { return line_; }
    int token() const { return token_; }

private:
    int line_;
    int token_;
};

/// Line formats. One sentence per line, tokens separated by single spaces,
/// tagged tokens written word/TAG where the separator is the last unescaped
/// slash. Inside words, backslash, slash and hash are escaped as \\ \/ \#.
/// Lines starting with # are comments; empty lines are skipped.
TaggedCorpus parse_tagged(std::string_view text);
std::string emit_tagged(const TaggedCorpus& corpus);
RawCorpus parse_raw(std::string_view text);
std::string emit_raw(const RawCorpus& corpus);

RawCorpus strip_tags(const TaggedCorpus& corpus);

/// Sample a corpus from a generating model. Sentence lengths are geometric
/// with the given mean (truncated to [1, 10*mean]); the tag chain starts at
/// the boundary tag and mid-sentence steps renormalise each transition row
/// over the real tags; words are drawn from the per-tag lexical scores.
/// Same arguments, same output, byte for byte.
TaggedCorpus generate_synthetic(const HmmModel& truth, int n_sentences,
                                int mean_length, std::uint64_t seed);

}  // namespace hmmtag
