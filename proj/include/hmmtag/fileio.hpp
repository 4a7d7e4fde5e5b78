#pragma once

#include <stdexcept>
#include <string>

#include "hmmtag/corpus.hpp"
#include "hmmtag/model.hpp"

namespace hmmtag {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

TaggedCorpus load_tagged_corpus(const std::string& path);
RawCorpus load_raw_corpus(const std::string& path);
HmmModel load_model_file(const std::string& path);
void save_model_file(const HmmModel& model, const std::string& path);

}  // namespace hmmtag
